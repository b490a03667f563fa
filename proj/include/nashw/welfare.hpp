#pragma once

#include "nashw/instance.hpp"

#include <compare>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace nashw {

// Log-domain welfare with an explicit zero. Zero sorts below every nonzero
// value; nonzero values are ordered by log_value.
struct WelfareValue {
  bool is_zero = true;
  double log_value = 0.0;

  static WelfareValue zero() { return {}; }
  static WelfareValue from_log(double log_value) { return {false, log_value}; }

  // exp(log_value), or 0. May overflow to infinity for huge welfare.
  double linear() const;

  friend std::partial_ordering operator<=>(const WelfareValue& a, const WelfareValue& b) {
    if (a.is_zero || b.is_zero) return (!a.is_zero) <=> (!b.is_zero);
    return a.log_value <=> b.log_value;
  }
  friend bool operator==(const WelfareValue& a, const WelfareValue& b) {
    return a.is_zero == b.is_zero && (a.is_zero || a.log_value == b.log_value);
  }
};

inline constexpr double kLogRelativeTolerance = 1e-12;

// True when two log-domain scores are too close to order by floating point.
bool log_near_tie(double a, double b);

// Orders utility vectors by Π u_i^{η_i}: log domain first, then an exact
// big-integer comparison of Π u_i^{η_i·L} (L clears weight denominators)
// when the log gap is below tolerance.
class NashComparator {
 public:
  explicit NashComparator(std::span<const Rational> weights);

  // Σ η_i ln u_i with a zero flag; not normalised by Σ η_i.
  WelfareValue log_product(std::span<const Rational> utilities) const;

  // -1, 0, +1 as a is worse than, tied with, or better than b.
  int compare(std::span<const Rational> a, std::span<const Rational> b) const;
  // Same, reusing precomputed log products (as returned by log_product).
  int compare(const WelfareValue& la, std::span<const Rational> a, const WelfareValue& lb,
              std::span<const Rational> b) const;
  int compare_exact(std::span<const Rational> a, std::span<const Rational> b) const;

  std::span<const double> weights() const { return weights_; }
  double total_weight() const { return total_weight_; }

 private:
  std::vector<double> weights_;
  double total_weight_ = 0.0;
  std::vector<unsigned> exponents_;  // empty when exponents are too large to expand
};

inline constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

WelfareValue nash_welfare_of(std::span<const Rational> weights, std::span<const Rational> utilities);
WelfareValue nash_welfare(const Instance& instance, const Allocation& allocation);

// ((1/n) Σ u_i^p)^{1/p}; p = 0 is the unweighted geometric mean and
// p = -inf the minimum. Nonpositive p with a zero utility gives zero.
WelfareValue p_mean_of(std::span<const Rational> utilities, double p);
// p = 0 delegates to nash_welfare (any weights); otherwise weights must be equal.
WelfareValue p_mean_welfare(const Instance& instance, const Allocation& allocation, double p);

// Exact-aware comparison of p-means; the exact fallback covers integral p and -inf.
int compare_p_mean(double p, std::span<const Rational> a, std::span<const Rational> b);

// Ordered pairs (i, h), 0-based, such that i is not wwEF1 towards h.
std::vector<std::pair<AgentId, AgentId>> wwef1_violations(const Instance& instance, const Allocation& allocation);

}  // namespace nashw
