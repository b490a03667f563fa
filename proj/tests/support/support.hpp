#pragma once

// Shared generators and independent oracles for the unit and acceptance tests.

#include "nashw/configuration.hpp"
#include "nashw/instance.hpp"
#include "nashw/matching.hpp"
#include "nashw/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace testsupport {

using nashw::Allocation;
using nashw::Instance;
using nashw::Rational;

using Rng = std::mt19937_64;

inline std::int64_t draw(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Weights in {1, 3/2, 2, 5/2, 3, 7/2, 4} unless `symmetric`.
inline std::vector<Rational> random_weights(Rng& rng, std::size_t n, bool symmetric = false) {
  std::vector<Rational> w(n, Rational(1));
  if (!symmetric) {
    for (auto& x : w) x = Rational(draw(rng, 2, 8), 2);
  }
  return w;
}

inline Instance random_identical(Rng& rng, std::size_t n, std::size_t m, std::int64_t vmax, bool symmetric = false) {
  std::vector<Rational> values(m);
  for (auto& v : values) v = draw(rng, 1, vmax);
  return Instance(random_weights(rng, n, symmetric), m, nashw::IdenticalAdditive{values});
}

inline Instance random_kary(Rng& rng, std::size_t n, std::size_t m, std::size_t k, std::int64_t vmax) {
  std::set<std::int64_t> pool;
  while (pool.size() < k) pool.insert(draw(rng, 1, vmax));
  const std::vector<std::int64_t> vals(pool.begin(), pool.end());
  std::vector<Rational> values(m);
  for (auto& v : values) v = vals[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(k) - 1))];
  // An occasional worthless good.
  if (m > 1 && draw(rng, 0, 4) == 0) values[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(m) - 1))] = 0;
  return Instance(random_weights(rng, n), m, nashw::IdenticalAdditive{values});
}

inline Instance random_additive(Rng& rng, std::size_t n, std::size_t m, std::int64_t vmax, bool symmetric = false) {
  nashw::AdditiveMatrix a{std::vector<std::vector<Rational>>(n, std::vector<Rational>(m))};
  for (auto& row : a.values) {
    for (auto& v : row) v = draw(rng, 0, vmax);
  }
  return Instance(random_weights(rng, n, symmetric), m, a);
}

// Mix of additive pairs, singletons and complementary pairs.
inline Instance random_two_valuable(Rng& rng, std::size_t n, std::size_t m, std::int64_t vmax) {
  nashw::TwoValuable tv;
  for (std::size_t i = 0; i < n; ++i) {
    nashw::TwoValuableTable t;
    const auto first = static_cast<nashw::GoodId>(draw(rng, 0, static_cast<std::int64_t>(m) - 1));
    t.goods.push_back(first);
    const std::int64_t shape = draw(rng, 0, 5);
    if (m >= 2 && shape > 0) {
      auto second = static_cast<nashw::GoodId>(draw(rng, 0, static_cast<std::int64_t>(m) - 2));
      if (second >= first) ++second;
      t.goods.push_back(second);
      if (shape == 1) {
        t.single = {0, 0};
        t.pair = draw(rng, 1, vmax);
      } else if (shape == 2) {
        const std::int64_t a = draw(rng, 0, vmax), b = draw(rng, 0, vmax);
        t.single = {a, b};
        t.pair = std::max<std::int64_t>({a, b, 1}) + draw(rng, 0, vmax);
      } else {
        const std::int64_t a = draw(rng, 0, vmax), b = draw(rng, 1, vmax);
        t.single = {a, b};
        t.pair = a + b;
      }
    } else {
      t.single = {draw(rng, 1, vmax)};
    }
    tv.tables.push_back(std::move(t));
  }
  return Instance(random_weights(rng, n), m, tv);
}

// Exact welfare equality: log domain first, exact products on near ties.
inline bool same_nash_welfare(const Instance& inst, const Allocation& a, const Allocation& b) {
  const nashw::NashComparator cmp(inst.weights());
  return cmp.compare(nashw::utilities(inst, a), nashw::utilities(inst, b)) == 0;
}

// log NW(a) >= log(factor) + log NW(b) - 1e-12 (zero-aware).
inline bool nash_at_least(const nashw::WelfareValue& got, double factor, const nashw::WelfareValue& best) {
  if (best.is_zero) return true;
  if (got.is_zero) return false;
  return got.log_value >= std::log(factor) + best.log_value - nashw::kLogRelativeTolerance * (1 + std::abs(best.log_value));
}

// ---- rounding and representation, written from the definitions ----

inline Rational power_of_two(int e) {
  const nashw::BigInt p = nashw::BigInt(1) << (e < 0 ? -e : e);
  return e < 0 ? Rational(nashw::BigInt(1), p) : Rational(p);
}

// r(u): w the largest power of two with u > delta*w, i the smallest integer with u <= i*delta^2*w.
inline Rational oracle_round(const Rational& u, int lambda) {
  if (u == 0) return 0;
  // Start safely above the answer and walk down.
  int e = static_cast<int>(std::ceil(std::log2(nashw::to_double(u) * lambda))) + 2;
  while (!(u * lambda > power_of_two(e))) --e;
  const Rational unit = power_of_two(e) / (lambda * lambda);
  Rational q = u / unit;
  nashw::BigInt i = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
  if (Rational(i) * unit < u) ++i;
  return Rational(i) * unit;
}

// Does (2^e, counts) represent the set A (good ids into `values`)?
inline bool represents(const nashw::ptas::Configuration& c, const std::vector<int>& A,
                       const std::vector<Rational>& values, int lambda) {
  if (c.is_empty_set()) return A.empty() && c.counts.empty();
  const Rational w = power_of_two(*c.exponent);
  const Rational delta(1, lambda);
  Rational small = 0;
  std::map<Rational, std::int64_t> by_rounded;
  for (int j : A) {
    const Rational& u = values[static_cast<std::size_t>(j)];
    if (u > w) return false;  // (i)
    const Rational r = oracle_round(u, lambda);
    if (u <= delta * w) {
      small += r;
    } else {
      ++by_rounded[r];
    }
  }
  // (ii) for every level above lambda
  std::map<Rational, std::int64_t> expected;
  for (const auto& [level, count] : c.counts) {
    if (level > lambda) expected[Rational(level) * delta * delta * w] = count;
  }
  if (expected != by_rounded) return false;
  // (iii)
  const Rational gap = small - Rational(c.count(lambda)) * delta * w;
  return (gap < 0 ? -gap : gap) < delta * w;
}

// Every configuration at magnitude 2^e representing A (one or two of them).
inline std::vector<nashw::ptas::Configuration> representing_configs(const std::vector<int>& A,
                                                                    const std::vector<Rational>& values, int lambda,
                                                                    int e) {
  const Rational w = power_of_two(e);
  const Rational delta(1, lambda);
  std::map<int, std::int64_t> large;
  Rational small = 0;
  for (int j : A) {
    const Rational& u = values[static_cast<std::size_t>(j)];
    if (u > w) return {};
    const Rational r = oracle_round(u, lambda);
    if (u <= delta * w) {
      small += r;
    } else {
      const Rational level = r / (delta * delta * w);
      ++large[static_cast<int>(boost::multiprecision::numerator(level))];
    }
  }
  std::vector<nashw::ptas::Configuration> out;
  const Rational q = small / (delta * w);
  const nashw::BigInt fl = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
  for (nashw::BigInt mlam = fl - 1; mlam <= fl + 1; ++mlam) {
    if (mlam < 0) continue;
    nashw::ptas::Configuration c;
    c.exponent = e;
    auto counts = large;
    if (mlam > 0) counts[lambda] += mlam.convert_to<std::int64_t>();
    c.counts.assign(counts.begin(), counts.end());
    if (represents(c, A, values, lambda)) out.push_back(c);
  }
  return out;
}

inline std::vector<std::vector<int>> all_subsets(int m) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> s;
    for (int j = 0; j < m; ++j) {
      if (mask >> j & 1) s.push_back(j);
    }
    out.push_back(s);
  }
  return out;
}

// ---- matching ----

// Lowest free vertex either stays single or pairs with a later free neighbour.
template <class W>
W brute_force_matching_weight(int vertices, const std::vector<nashw::matching::WeightedEdge<W>>& edges) {
  const auto nv = static_cast<std::size_t>(vertices);
  std::vector<std::vector<std::optional<W>>> adj(nv, std::vector<std::optional<W>>(nv));
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)] = e.weight;
    adj[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)] = e.weight;
  }
  std::vector<char> used(nv, 0);
  std::function<W(std::size_t)> go = [&](std::size_t v) -> W {
    while (v < nv && used[v]) ++v;
    if (v >= nv) return W{};
    used[v] = 1;
    W best = go(v + 1);
    for (std::size_t u = v + 1; u < nv; ++u) {
      if (used[u] || !adj[v][u]) continue;
      used[u] = 1;
      best = std::max(best, *adj[v][u] + go(v + 1));
      used[u] = 0;
    }
    used[v] = 0;
    return best;
  };
  return go(0);
}

// mate is symmetric and every matched pair is an edge.
template <class W>
bool valid_mate(int vertices, const std::vector<nashw::matching::WeightedEdge<W>>& edges, const std::vector<int>& mate) {
  if (mate.size() != static_cast<std::size_t>(vertices)) return false;
  std::set<std::pair<int, int>> present;
  for (const auto& e : edges) present.insert(std::minmax(e.u, e.v));
  for (int v = 0; v < vertices; ++v) {
    const int u = mate[static_cast<std::size_t>(v)];
    if (u == -1) continue;
    if (u < 0 || u >= vertices || mate[static_cast<std::size_t>(u)] != v || !present.count(std::minmax(u, v))) return false;
  }
  return true;
}

inline std::vector<nashw::matching::WeightedEdge<std::int64_t>> random_graph(Rng& rng, int vertices, int density_pct,
                                                                            std::int64_t lo, std::int64_t hi) {
  std::vector<nashw::matching::WeightedEdge<std::int64_t>> edges;
  for (int u = 0; u < vertices; ++u) {
    for (int v = u + 1; v < vertices; ++v) {
      if (draw(rng, 1, 100) <= density_pct) edges.push_back({u, v, draw(rng, lo, hi)});
    }
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

}  // namespace testsupport
