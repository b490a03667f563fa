#pragma once

#include "nashw/instance.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nashw::ptas {

// Rounding precision: delta = 1/lambda with lambda even.
struct PtasParams {
  int lambda = 12;
  std::optional<double> epsilon;

  Rational delta() const { return Rational(1, lambda); }
  std::int64_t lambda_squared() const { return std::int64_t{lambda} * lambda; }

  // lambda = smallest even integer >= (16 - 8 eps) / eps; eps in (0, 1).
  static PtasParams from_epsilon(double epsilon);
  // Throws ParameterError unless lambda is even and >= 2.
  static PtasParams from_lambda(int lambda, std::optional<double> epsilon = std::nullopt);

  // The (1 - eps) bound is only proven for lambda >= 12 and lambda >= (16 - 8 eps) / eps.
  bool guarantee_applies() const;
};

int lambda_for_epsilon(double epsilon);

Rational pow2(int exponent);
// Smallest e with u <= 2^e (u > 0).
int ceil_exponent(const Rational& u);

// r(u) = i * delta^2 * w with w the largest power of two below lambda * u and
// i the smallest integer with u <= i * delta^2 * w. r(0) = 0.
Rational round_value(const Rational& u, const PtasParams& params);

// Rounding data for a list of positive good values; ids index `values`.
class RoundedGoods {
 public:
  RoundedGoods(std::vector<Rational> values, PtasParams params);

  std::size_t size() const { return values_.size(); }
  const PtasParams& params() const { return params_; }
  const Rational& value(int good) const { return values_[static_cast<std::size_t>(good)]; }
  Rational rounded(int good) const;
  // r(u_j) = rounding_level(j) * delta^2 * 2^rounding_exponent(j).
  int rounding_exponent(int good) const { return exponents_[static_cast<std::size_t>(good)]; }
  std::int64_t rounding_level(int good) const { return levels_[static_cast<std::size_t>(good)]; }

  // u_j <= 2^e
  bool fits(int good, int exponent) const;
  // u_j <= delta * 2^e
  bool small(int good, int exponent) const;
  // r(u_j) / (delta^2 * 2^e) for a good that fits and is not small at e.
  std::int64_t level_at(int good, int exponent) const;

 private:
  std::vector<Rational> values_;
  PtasParams params_;
  std::vector<int> exponents_;
  std::vector<std::int64_t> levels_;
};

// (w, m): w = 0 (no exponent, only for the empty set) or 2^exponent, and sparse
// counts m_i for levels i in [lambda, lambda^2 + lambda). Level lambda holds the
// small-goods count; larger levels count goods of rounded value i * delta^2 * w.
struct Configuration {
  std::optional<int> exponent;
  std::vector<std::pair<int, std::int64_t>> counts;  // sorted by level, counts > 0

  bool is_empty_set() const { return !exponent.has_value(); }
  std::int64_t count(int level) const;
  // Σ m_i * i, i.e. the value in units of delta^2 * w.
  std::int64_t units() const;
  Rational magnitude() const;
  Rational value(const PtasParams& params) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

// Componentwise a <= b on the count vectors (magnitudes ignored).
bool dominated_by(const Configuration& a, const Configuration& b);

// Principal configuration: smallest w representing `goods`, with
// m_lambda = ceil(Vr(A(w)) / (delta w)). The empty set maps to w = 0.
Configuration principal_configuration_of(const RoundedGoods& goods, std::span<const int> subset);

// All principal configurations: for each candidate w (0 and every u_j rounded
// up to a power of two) the vectors m <= principal(M(w)) having some m_i > 0
// with i > lambda^2 / 2. Throws BudgetExceeded above `cap` configurations.
std::vector<Configuration> enumerate_principal_configurations(const RoundedGoods& goods, std::size_t cap = 20000);
std::vector<Configuration> enumerate_principal_configurations(const Instance& instance, const PtasParams& params,
                                                              std::size_t cap = 20000);

// Re-expresses (w, m) at magnitude 2^target_exponent >= w, treating m as the
// multiset of m_i goods of rounded value i * delta^2 * w. The small count is
// the nearest integer to Vr(K(w')) / (delta w'), ties toward the larger.
Configuration scale_configuration(const Configuration& config, int target_exponent, const PtasParams& params);

// Given A represented by config_a, returns B ⊇ A represented by `target`:
// adds the missing large goods level by level (largest raw value first), then
// small goods until their rounded total exceeds (m'_lambda - 1) * delta * w'.
// Throws InternalError when a level runs out of unused goods.
std::vector<int> extend_bundle(const RoundedGoods& goods, std::span<const int> allocated,
                               const Configuration& config_a, const Configuration& target);

}  // namespace nashw::ptas
