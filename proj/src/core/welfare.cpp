#include "nashw/welfare.hpp"

#include "nashw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nashw {

namespace {

constexpr unsigned kMaxExactExponent = 1u << 12;

double log_sum_exp(const std::vector<double>& terms) {
  double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

int sign_of(double d) { return (d > 0) - (d < 0); }

int compare_rational(const Rational& a, const Rational& b) { return (a > b) - (a < b); }

}  // namespace

double WelfareValue::linear() const { return is_zero ? 0.0 : std::exp(log_value); }

bool log_near_tie(double a, double b) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kLogRelativeTolerance * scale;
}

NashComparator::NashComparator(std::span<const Rational> weights) {
  weights_.reserve(weights.size());
  for (const auto& w : weights) {
    weights_.push_back(to_double(w));
    total_weight_ += weights_.back();
  }
  BigInt common = 1;
  for (const auto& w : weights) common = lcm(common, boost::multiprecision::denominator(w));
  std::vector<BigInt> raw;
  BigInt g = 0;
  for (const auto& w : weights) {
    raw.push_back(boost::multiprecision::numerator(w) * (common / boost::multiprecision::denominator(w)));
    g = boost::multiprecision::gcd(g, raw.back());
  }
  for (auto& e : raw) {
    e /= g;
    if (e > kMaxExactExponent) {
      exponents_.clear();
      return;
    }
    exponents_.push_back(e.convert_to<unsigned>());
  }
}

WelfareValue NashComparator::log_product(std::span<const Rational> utilities) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    if (utilities[i] <= 0) return WelfareValue::zero();
    sum += weights_[i] * log_of(utilities[i]);
  }
  return WelfareValue::from_log(sum);
}

int NashComparator::compare(std::span<const Rational> a, std::span<const Rational> b) const {
  return compare(log_product(a), a, log_product(b), b);
}

int NashComparator::compare(const WelfareValue& la, std::span<const Rational> a, const WelfareValue& lb,
                            std::span<const Rational> b) const {
  if (la.is_zero || lb.is_zero) return static_cast<int>(!la.is_zero) - static_cast<int>(!lb.is_zero);
  if (!log_near_tie(la.log_value, lb.log_value)) return sign_of(la.log_value - lb.log_value);
  return compare_exact(a, b);
}

int NashComparator::compare_exact(std::span<const Rational> a, std::span<const Rational> b) const {
  bool a_zero = std::any_of(a.begin(), a.end(), [](const Rational& u) { return u <= 0; });
  bool b_zero = std::any_of(b.begin(), b.end(), [](const Rational& u) { return u <= 0; });
  if (a_zero || b_zero) return static_cast<int>(!a_zero) - static_cast<int>(!b_zero);
  if (exponents_.empty()) {
    // Exponents too large to expand; the log comparison is the best available.
    return sign_of(log_product(a).log_value - log_product(b).log_value);
  }
  // Π (na/da)^e vs Π (nb/db)^e  <=>  Π na^e · db^e vs Π nb^e · da^e
  BigInt lhs = 1, rhs = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned e = exponents_[i];
    lhs *= boost::multiprecision::pow(BigInt(boost::multiprecision::numerator(a[i]) *
                                             boost::multiprecision::denominator(b[i])),
                                      e);
    rhs *= boost::multiprecision::pow(BigInt(boost::multiprecision::numerator(b[i]) *
                                             boost::multiprecision::denominator(a[i])),
                                      e);
  }
  return (lhs > rhs) - (lhs < rhs);
}

WelfareValue nash_welfare_of(std::span<const Rational> weights, std::span<const Rational> utilities) {
  double total = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    if (utilities[i] <= 0) return WelfareValue::zero();
    double w = to_double(weights[i]);
    total += w;
    sum += w * log_of(utilities[i]);
  }
  return WelfareValue::from_log(sum / total);
}

WelfareValue nash_welfare(const Instance& instance, const Allocation& allocation) {
  validate_allocation(instance, allocation, true);
  auto u = utilities(instance, allocation);
  return nash_welfare_of(instance.weights(), u);
}

WelfareValue p_mean_of(std::span<const Rational> utilities, double p) {
  const auto n = static_cast<double>(utilities.size());
  if (p == kNegativeInfinity) {
    Rational low = *std::min_element(utilities.begin(), utilities.end());
    return low <= 0 ? WelfareValue::zero() : WelfareValue::from_log(log_of(low));
  }
  if (p == 0.0) {
    double sum = 0.0;
    for (const auto& u : utilities) {
      if (u <= 0) return WelfareValue::zero();
      sum += log_of(u);
    }
    return WelfareValue::from_log(sum / n);
  }
  std::vector<double> terms;
  for (const auto& u : utilities) {
    if (u <= 0) {
      if (p < 0) return WelfareValue::zero();
      continue;
    }
    terms.push_back(p * log_of(u));
  }
  if (terms.empty()) return WelfareValue::zero();
  return WelfareValue::from_log((log_sum_exp(terms) - std::log(n)) / p);
}

WelfareValue p_mean_welfare(const Instance& instance, const Allocation& allocation, double p) {
  if (p == 0.0) return nash_welfare(instance, allocation);
  if (!instance.symmetric()) throw UnsupportedError("p-mean welfare with p != 0 requires equal weights");
  validate_allocation(instance, allocation, true);
  auto u = utilities(instance, allocation);
  return p_mean_of(u, p);
}

int compare_p_mean(double p, std::span<const Rational> a, std::span<const Rational> b) {
  WelfareValue wa = p_mean_of(a, p), wb = p_mean_of(b, p);
  if (wa.is_zero || wb.is_zero) return static_cast<int>(!wa.is_zero) - static_cast<int>(!wb.is_zero);
  if (!log_near_tie(wa.log_value, wb.log_value)) return sign_of(wa.log_value - wb.log_value);
  if (p == kNegativeInfinity) {
    return compare_rational(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
  }
  if (p == 0.0) {
    Rational pa = 1, pb = 1;
    for (const auto& u : a) pa *= u;
    for (const auto& u : b) pb *= u;
    return compare_rational(pa, pb);
  }
  if (std::floor(p) == p && std::abs(p) <= 64) {
    const auto k = static_cast<unsigned>(std::abs(p));
    Rational sa = 0, sb = 0;
    auto power = [&](const Rational& u) {
      Rational r(boost::multiprecision::pow(boost::multiprecision::numerator(u), k),
                 boost::multiprecision::pow(boost::multiprecision::denominator(u), k));
      return p > 0 ? r : 1 / r;
    };
    for (const auto& u : a) {
      if (u > 0) sa += power(u);
    }
    for (const auto& u : b) {
      if (u > 0) sb += power(u);
    }
    return p > 0 ? compare_rational(sa, sb) : compare_rational(sb, sa);
  }
  return 0;
}

std::vector<std::pair<AgentId, AgentId>> wwef1_violations(const Instance& instance, const Allocation& allocation) {
  validate_allocation(instance, allocation, true);
  const auto n = static_cast<AgentId>(instance.num_agents());
  std::vector<std::pair<AgentId, AgentId>> out;
  for (AgentId i = 0; i < n; ++i) {
    const Rational own = instance.value(i, allocation.bundles[static_cast<std::size_t>(i)]) / instance.weight(i);
    for (AgentId h = 0; h < n; ++h) {
      const auto& other = allocation.bundles[static_cast<std::size_t>(h)];
      if (h == i || other.empty()) continue;
      // Violated for every removable good iff violated for the most valuable one.
      Rational dearest = 0;
      for (GoodId j : other) dearest = std::max(dearest, instance.good_value(i, j));
      const Rational envy = instance.value(i, other) / instance.weight(h) -
                            dearest / std::min(instance.weight(i), instance.weight(h));
      if (own < envy) out.emplace_back(i, h);
    }
  }
  return out;
}

}  // namespace nashw
