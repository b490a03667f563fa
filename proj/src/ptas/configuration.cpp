#include "nashw/configuration.hpp"

#include "nashw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace nashw::ptas {

namespace {

BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if (q * b < a) ++q;
  return q;
}

BigInt ceil_of(const Rational& r) {
  return ceil_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

// Largest e with 2^e < x (x > 0).
int floor_exponent_below(const Rational& x) {
  int e = static_cast<int>(std::floor(log_of(x) / std::log(2.0)));
  while (pow2(e + 1) < x) ++e;
  while (pow2(e) >= x) --e;
  return e;
}

}  // namespace

int lambda_for_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  const Rational eps = rational_from_double(epsilon);
  const Rational bound = (Rational(16) - 8 * eps) / eps;
  BigInt k = ceil_of(bound);
  if (k % 2 != 0) ++k;
  if (k < 2) k = 2;
  if (k > 1'000'000) throw ParameterError("epsilon too small: lambda would exceed 10^6");
  return k.convert_to<int>();
}

PtasParams PtasParams::from_epsilon(double epsilon) { return from_lambda(lambda_for_epsilon(epsilon), epsilon); }

PtasParams PtasParams::from_lambda(int lambda, std::optional<double> epsilon) {
  if (lambda < 2 || lambda % 2 != 0) throw ParameterError("lambda must be an even integer >= 2");
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  return PtasParams{lambda, epsilon};
}

bool PtasParams::guarantee_applies() const {
  if (lambda < 12) return false;
  if (!epsilon) return true;
  const Rational eps = rational_from_double(*epsilon);
  return Rational(lambda) >= (Rational(16) - 8 * eps) / eps;
}

Rational pow2(int exponent) {
  if (exponent >= 0) return Rational(BigInt(1) << exponent);
  return Rational(BigInt(1), BigInt(1) << -exponent);
}

int ceil_exponent(const Rational& u) {
  int e = static_cast<int>(std::ceil(log_of(u) / std::log(2.0)));
  while (pow2(e) < u) ++e;
  while (pow2(e - 1) >= u) --e;
  return e;
}

Rational round_value(const Rational& u, const PtasParams& params) {
  if (u <= 0) return 0;
  const int e = floor_exponent_below(u * params.lambda);
  const BigInt i = ceil_of(u * params.lambda_squared() / pow2(e));
  return Rational(i) * pow2(e) / params.lambda_squared();
}

RoundedGoods::RoundedGoods(std::vector<Rational> values, PtasParams params)
    : values_(std::move(values)), params_(params) {
  for (const auto& u : values_) {
    if (u <= 0) throw ParameterError("rounded goods must have positive value");
    const int e = floor_exponent_below(u * params_.lambda);
    exponents_.push_back(e);
    levels_.push_back(ceil_of(u * params_.lambda_squared() / pow2(e)).convert_to<std::int64_t>());
  }
}

Rational RoundedGoods::rounded(int good) const {
  return Rational(rounding_level(good)) * pow2(rounding_exponent(good)) / params_.lambda_squared();
}

bool RoundedGoods::fits(int good, int exponent) const { return value(good) <= pow2(exponent); }

bool RoundedGoods::small(int good, int exponent) const { return value(good) * params_.lambda <= pow2(exponent); }

std::int64_t RoundedGoods::level_at(int good, int exponent) const {
  const int shift = rounding_exponent(good) - exponent;
  if (shift < 0) throw InternalError("level_at called for a good that is small at this magnitude");
  return rounding_level(good) << shift;
}

std::int64_t Configuration::count(int level) const {
  auto it = std::lower_bound(counts.begin(), counts.end(), std::pair<int, std::int64_t>(level, 0),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  return it != counts.end() && it->first == level ? it->second : 0;
}

std::int64_t Configuration::units() const {
  std::int64_t total = 0;
  for (const auto& [level, c] : counts) total += level * c;
  return total;
}

Rational Configuration::magnitude() const { return exponent ? pow2(*exponent) : Rational(0); }

Rational Configuration::value(const PtasParams& params) const {
  if (!exponent) return 0;
  return Rational(units()) * pow2(*exponent) / params.lambda_squared();
}

bool dominated_by(const Configuration& a, const Configuration& b) {
  return std::all_of(a.counts.begin(), a.counts.end(), [&](const auto& lc) { return lc.second <= b.count(lc.first); });
}

namespace {

// Representation of `subset` at magnitude 2^e with m_lambda rounded up.
Configuration represent_at(const RoundedGoods& goods, std::span<const int> subset, int e) {
  const int lambda = goods.params().lambda;
  std::map<int, std::int64_t> counts;
  Rational small_total = 0;
  for (int j : subset) {
    if (goods.small(j, e)) {
      small_total += goods.rounded(j);
    } else {
      ++counts[static_cast<int>(goods.level_at(j, e))];
    }
  }
  const BigInt small_count = ceil_of(small_total * lambda / pow2(e));
  if (small_count > 0) counts[lambda] += small_count.convert_to<std::int64_t>();
  Configuration c;
  c.exponent = e;
  c.counts.assign(counts.begin(), counts.end());
  return c;
}

}  // namespace

Configuration principal_configuration_of(const RoundedGoods& goods, std::span<const int> subset) {
  if (subset.empty()) return {};
  int e = ceil_exponent(goods.value(subset.front()));
  for (int j : subset) e = std::max(e, ceil_exponent(goods.value(j)));
  return represent_at(goods, subset, e);
}

std::vector<Configuration> enumerate_principal_configurations(const RoundedGoods& goods, std::size_t cap) {
  const std::int64_t lambda_sq = goods.params().lambda_squared();
  std::vector<Configuration> out;
  out.push_back(Configuration{});

  std::vector<int> exponents;
  for (std::size_t j = 0; j < goods.size(); ++j) exponents.push_back(ceil_exponent(goods.value(static_cast<int>(j))));
  std::sort(exponents.begin(), exponents.end());
  exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());

  for (int e : exponents) {
    std::vector<int> market;
    for (std::size_t j = 0; j < goods.size(); ++j) {
      if (goods.fits(static_cast<int>(j), e)) market.push_back(static_cast<int>(j));
    }
    const Configuration full = represent_at(goods, market, e);
    const auto& caps = full.counts;
    std::vector<std::int64_t> current(caps.size(), 0);
    // Odometer over 0 <= m <= caps.
    while (true) {
      bool has_large_half = false;
      for (std::size_t k = 0; k < caps.size(); ++k) {
        if (current[k] > 0 && 2 * std::int64_t{caps[k].first} > lambda_sq) has_large_half = true;
      }
      if (has_large_half) {
        Configuration c;
        c.exponent = e;
        for (std::size_t k = 0; k < caps.size(); ++k) {
          if (current[k] > 0) c.counts.emplace_back(caps[k].first, current[k]);
        }
        out.push_back(std::move(c));
        if (out.size() > cap) {
          throw BudgetExceeded("more than " + std::to_string(cap) + " principal configurations");
        }
      }
      std::size_t k = 0;
      while (k < caps.size() && current[k] == caps[k].second) current[k++] = 0;
      if (k == caps.size()) break;
      ++current[k];
    }
  }
  return out;
}

std::vector<Configuration> enumerate_principal_configurations(const Instance& instance, const PtasParams& params,
                                                              std::size_t cap) {
  std::vector<Rational> positive;
  for (const auto& u : instance.identical_values()) {
    if (u > 0) positive.push_back(u);
  }
  return enumerate_principal_configurations(RoundedGoods(std::move(positive), params), cap);
}

Configuration scale_configuration(const Configuration& config, int target_exponent, const PtasParams& params) {
  if (config.is_empty_set()) return Configuration{target_exponent, {}};
  const int shift = target_exponent - *config.exponent;
  if (shift < 0) throw InternalError("cannot scale a configuration to a smaller magnitude");
  if (shift == 0) return config;
  const int lambda = params.lambda;
  // Small mass in units of delta^2 * w.
  BigInt small_units = 0;
  std::map<int, std::int64_t> counts;
  const BigInt factor = BigInt(1) << shift;
  for (const auto& [level, c] : config.counts) {
    if (level != lambda && shift < 62) {
      const std::int64_t step = std::int64_t{1} << shift;
      if (level % step == 0 && level / step > lambda) {
        counts[static_cast<int>(level / step)] += c;
        continue;
      }
    }
    small_units += BigInt(level) * c;
  }
  // m'_lambda = floor(S / (lambda 2^shift) + 1/2)
  const BigInt denom = BigInt(2 * lambda) * factor;
  const BigInt small_count = (2 * small_units + lambda * factor) / denom;
  if (small_count > 0) counts[lambda] += small_count.convert_to<std::int64_t>();
  Configuration out;
  out.exponent = target_exponent;
  out.counts.assign(counts.begin(), counts.end());
  return out;
}

std::vector<int> extend_bundle(const RoundedGoods& goods, std::span<const int> allocated,
                               const Configuration& config_a, const Configuration& target) {
  if (target.is_empty_set()) {
    if (!allocated.empty()) throw InternalError("empty target configuration for a nonempty set");
    return {};
  }
  const PtasParams& params = goods.params();
  const int e = *target.exponent;
  const Configuration scaled = scale_configuration(config_a, e, params);
  if (!dominated_by(scaled, target)) throw InternalError("target configuration does not dominate the scaled one");

  std::vector<char> used(goods.size(), 0);
  std::vector<int> out(allocated.begin(), allocated.end());
  for (int j : allocated) used[static_cast<std::size_t>(j)] = 1;

  auto by_value_desc = [&](int a, int b) {
    if (goods.value(a) != goods.value(b)) return goods.value(a) > goods.value(b);
    return a < b;
  };

  for (const auto& [level, want] : target.counts) {
    if (level == params.lambda) continue;
    const std::int64_t need = want - scaled.count(level);
    if (need < 0) throw InternalError("negative demand at level " + std::to_string(level));
    std::vector<int> pool;
    for (std::size_t j = 0; j < goods.size(); ++j) {
      const int g = static_cast<int>(j);
      if (!used[j] && goods.fits(g, e) && !goods.small(g, e) && goods.level_at(g, e) == level) pool.push_back(g);
    }
    if (static_cast<std::int64_t>(pool.size()) < need) {
      throw InternalError("not enough unused goods at level " + std::to_string(level));
    }
    std::sort(pool.begin(), pool.end(), by_value_desc);
    for (std::int64_t k = 0; k < need; ++k) {
      used[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])] = 1;
      out.push_back(pool[static_cast<std::size_t>(k)]);
    }
  }

  Rational small_total = 0;
  for (int j : out) {
    if (goods.small(j, e)) small_total += goods.rounded(j);
  }
  const Rational threshold = Rational(target.count(params.lambda) - 1) * pow2(e) / params.lambda;
  std::vector<int> pool;
  for (std::size_t j = 0; j < goods.size(); ++j) {
    if (!used[j] && goods.small(static_cast<int>(j), e)) pool.push_back(static_cast<int>(j));
  }
  std::sort(pool.begin(), pool.end(), by_value_desc);
  for (int g : pool) {
    if (small_total > threshold) break;
    small_total += goods.rounded(g);
    out.push_back(g);
  }
  return out;
}

}  // namespace nashw::ptas
