#include "nashw/fptas.hpp"

#include "nashw/errors.hpp"
#include "nashw/welfare.hpp"

#include <boost/container_hash/hash.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace nashw::fptas {

FptasParams FptasParams::make(double epsilon, std::size_t goods, std::int64_t max_value) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  FptasParams p;
  p.epsilon = epsilon;
  p.alpha = 1 + rational_from_double(epsilon) / (2 * static_cast<std::int64_t>(std::max<std::size_t>(goods, 1)));
  p.max_utility = static_cast<std::int64_t>(goods) * max_value;
  p.K = p.max_utility > 1 ? std::max(0, Bucketer(p).bucket(p.max_utility)) : 0;
  return p;
}

FptasParams FptasParams::for_instance(double epsilon, const Instance& instance) {
  std::int64_t vmax = 0;
  for (const auto& row : integer_valuations(instance)) {
    for (std::int64_t v : row) vmax = std::max(vmax, v);
  }
  return make(epsilon, instance.num_goods(), vmax);
}

Bucketer::Bucketer(const FptasParams& params)
    : alpha_(params.alpha), log_alpha_(log_of(params.alpha)), powers_{Rational(1)} {}

const Rational& Bucketer::power(int k) const {
  while (static_cast<int>(powers_.size()) <= k) powers_.push_back(powers_.back() * alpha_);
  return powers_[static_cast<std::size_t>(k)];
}

int Bucketer::bucket(std::int64_t utility) const {
  if (utility <= 0) return -1;
  if (utility == 1) return 0;
  int k = std::max(0, static_cast<int>(std::ceil(std::log(static_cast<double>(utility)) / log_alpha_)));
  const Rational u(utility);
  while (u > power(k)) ++k;
  while (k > 0 && u <= power(k - 1)) --k;
  return k;
}

std::size_t Enumeration::max_layer_size() const {
  std::size_t best = 0;
  for (const auto& layer : layers) best = std::max(best, layer.size());
  return best;
}

std::vector<std::vector<std::int64_t>> integer_valuations(const Instance& instance) {
  if (instance.kind() == ProfileKind::two_valuable) throw UnsupportedError("the FPTAS requires an additive profile");
  const std::size_t n = instance.num_agents(), m = instance.num_goods();
  std::vector<std::vector<std::int64_t>> out(n, std::vector<std::int64_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const Rational v = instance.good_value(static_cast<AgentId>(i), static_cast<GoodId>(j));
      if (!is_integer(v) || v > Rational(std::int64_t{1} << 40)) throw UnsupportedError("integer valuations required");
      out[i][j] = boost::multiprecision::numerator(v).convert_to<std::int64_t>();
    }
  }
  return out;
}

namespace {

using Key = std::vector<std::int64_t>;
using KeySet = std::unordered_set<Key, boost::hash<Key>>;

VectorLayer expand(const VectorLayer& previous, const std::vector<std::vector<std::int64_t>>& values, GoodId good,
                   std::size_t cap) {
  VectorLayer next;
  KeySet seen;
  for (std::size_t p = 0; p < previous.size(); ++p) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      UtilityVector v;
      v.utilities = previous[p].utilities;
      v.utilities[i] += values[i][static_cast<std::size_t>(good)];
      if (!seen.insert(v.utilities).second) continue;
      v.parent = static_cast<int>(p);
      v.good = good;
      v.agent = static_cast<AgentId>(i);
      next.push_back(std::move(v));
      if (next.size() > cap) {
        throw BudgetExceeded("more than " + std::to_string(cap) + " utility vectors after good " +
                             std::to_string(good));
      }
    }
  }
  return next;
}

template <class Trim>
Enumeration run(const Instance& instance, std::size_t cap, Trim&& trim) {
  const auto values = integer_valuations(instance);
  Enumeration e;
  e.layers.push_back({UtilityVector{std::vector<std::int64_t>(instance.num_agents(), 0), -1, -1, -1}});
  for (std::size_t j = 0; j < instance.num_goods(); ++j) {
    e.layers.push_back(trim(expand(e.layers.back(), values, static_cast<GoodId>(j), cap)));
  }
  return e;
}

}  // namespace

Enumeration enumerate_utility_vectors(const Instance& instance, std::size_t cap) {
  return run(instance, cap, [](VectorLayer layer) { return layer; });
}

VectorLayer reduce_vectors(const VectorLayer& vectors, const Bucketer& bucketer) {
  VectorLayer out;
  std::unordered_set<std::vector<int>, boost::hash<std::vector<int>>> classes;
  for (const auto& v : vectors) {
    std::vector<int> key;
    key.reserve(v.utilities.size());
    for (std::int64_t u : v.utilities) key.push_back(bucketer.bucket(u));
    if (classes.insert(std::move(key)).second) out.push_back(v);
  }
  return out;
}

VectorLayer reduce_vectors(const VectorLayer& vectors, const FptasParams& params) {
  return reduce_vectors(vectors, Bucketer(params));
}

Enumeration fptas_enumerate(const Instance& instance, const FptasParams& params, std::size_t cap) {
  const Bucketer bucketer(params);
  return run(instance, cap, [&](const VectorLayer& layer) { return reduce_vectors(layer, bucketer); });
}

Solution best_allocation(const Instance& instance, const Enumeration& enumeration) {
  const auto& last = enumeration.layers.back();
  const NashComparator cmp(instance.weights());
  std::size_t best = 0;
  std::vector<Rational> best_u(last[0].utilities.begin(), last[0].utilities.end());
  WelfareValue best_log = cmp.log_product(best_u);
  for (std::size_t k = 1; k < last.size(); ++k) {
    std::vector<Rational> u(last[k].utilities.begin(), last[k].utilities.end());
    const WelfareValue lg = cmp.log_product(u);
    if (cmp.compare(lg, u, best_log, best_u) > 0) {
      best = k;
      best_u = std::move(u);
      best_log = lg;
    }
  }
  Solution s;
  s.allocation.bundles.assign(instance.num_agents(), {});
  std::size_t at = best;
  for (std::size_t layer = enumeration.layers.size() - 1; layer > 0; --layer) {
    const auto& v = enumeration.layers[layer][at];
    s.allocation.bundles[static_cast<std::size_t>(v.agent)].push_back(v.good);
    at = static_cast<std::size_t>(v.parent);
  }
  for (auto& b : s.allocation.bundles) std::sort(b.begin(), b.end());
  s.zero_optimum = best_log.is_zero;
  return s;
}

FptasResult fptas_solve(const Instance& instance, double epsilon, std::size_t cap) {
  FptasResult r;
  r.params = FptasParams::for_instance(epsilon, instance);
  const Enumeration e = fptas_enumerate(instance, r.params, cap);
  r.solution = best_allocation(instance, e);
  r.max_layer_size = e.max_layer_size();
  return r;
}

Solution exact_enumeration_solve(const Instance& instance, std::size_t cap) {
  return best_allocation(instance, enumerate_utility_vectors(instance, cap));
}

}  // namespace nashw::fptas
