#include "nashw/two_valuable.hpp"

#include "nashw/errors.hpp"
#include "nashw/welfare.hpp"

#include <algorithm>
#include <cmath>

namespace nashw::two_valuable {

namespace {

const TwoValuable& profile_of(const Instance& instance) {
  const auto* tv = std::get_if<TwoValuable>(&instance.profile());
  if (!tv) throw UnsupportedError("the 2-valuable solver requires a two_valuable profile");
  return *tv;
}

std::size_t at(int i) { return static_cast<std::size_t>(i); }

class Reducer {
 public:
  explicit Reducer(const Instance& instance) : inst_(instance), tv_(profile_of(instance)) {
    const std::size_t n = instance.num_agents();
    state_.held.assign(n, {});
    state_.active.assign(n, 1);
    state_.free_good.assign(instance.num_goods(), 1);
    state_.neighbors.assign(n, {});
    state_.n_prime.assign(n, 0);
  }

  ReducedState run() {
    while (!state_.zero_flag && step()) {
    }
    refresh();
    for (std::size_t i = 0; i < state_.active.size(); ++i) {
      state_.n_prime[i] = state_.active[i] && !state_.held[i].empty();
    }
    return std::move(state_);
  }

 private:
  Rational value(AgentId i, std::vector<GoodId> bundle) const { return inst_.value(i, bundle); }

  std::vector<GoodId> remaining(AgentId i) const {
    std::vector<GoodId> out;
    for (GoodId j : tv_.tables[at(i)].goods) {
      if (state_.free_good[at(j)]) out.push_back(j);
    }
    return out;
  }

  // j can raise i's utility for some completion by the other free goods of T_i.
  bool useful(AgentId i, GoodId j, const std::vector<GoodId>& rest) const {
    auto with = state_.held[at(i)];
    const Rational base = value(i, with);
    with.push_back(j);
    if (value(i, with) > base) return true;
    for (GoodId r : rest) {
      if (r == j) continue;
      auto a = state_.held[at(i)];
      a.push_back(r);
      auto b = a;
      b.push_back(j);
      if (value(i, b) > value(i, a)) return true;
    }
    return false;
  }

  void refresh() {
    for (std::size_t i = 0; i < state_.active.size(); ++i) {
      state_.neighbors[i].clear();
      if (!state_.active[i]) continue;
      const auto rest = remaining(static_cast<AgentId>(i));
      for (GoodId j : rest) {
        if (useful(static_cast<AgentId>(i), j, rest)) state_.neighbors[i].push_back(j);
      }
      std::sort(state_.neighbors[i].begin(), state_.neighbors[i].end());
    }
  }

  void give(AgentId i, GoodId j) {
    state_.held[at(i)].push_back(j);
    state_.free_good[at(j)] = 0;
  }

  // One reduction; false at the fixpoint.
  bool step() {
    refresh();
    const std::size_t n = state_.active.size();
    // Agents left without useful goods are finished.
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (state_.active[i] && state_.neighbors[i].empty()) {
        state_.active[i] = 0;
        if (value(static_cast<AgentId>(i), state_.held[i]) == 0) state_.zero_flag = true;
        changed = true;
      }
    }
    if (changed) return true;

    // A good wanted by a single agent goes to it.
    std::vector<std::vector<AgentId>> interested(state_.free_good.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (GoodId j : state_.neighbors[i]) interested[at(j)].push_back(static_cast<AgentId>(i));
    }
    for (std::size_t j = 0; j < interested.size(); ++j) {
      if (interested[j].size() == 1) {
        give(interested[j].front(), static_cast<GoodId>(j));
        return true;
      }
    }

    // An empty-handed agent with one useful good must get it.
    for (std::size_t i = 0; i < n; ++i) {
      if (state_.active[i] && state_.held[i].empty() && state_.neighbors[i].size() == 1) {
        give(static_cast<AgentId>(i), state_.neighbors[i].front());
        return true;
      }
    }

    if (!hall_condition()) {
      state_.zero_flag = true;
      return false;
    }

    // Two empty-handed agents sharing the same pair of goods split it.
    for (std::size_t a = 0; a < n; ++a) {
      if (!full(a)) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!full(b) || state_.neighbors[a] != state_.neighbors[b]) continue;
        const GoodId j1 = state_.neighbors[a][0], j2 = state_.neighbors[a][1];
        const auto ia = static_cast<AgentId>(a), ib = static_cast<AgentId>(b);
        const std::vector<Rational> weights = {inst_.weight(ia), inst_.weight(ib)};
        const std::vector<Rational> keep = {value(ia, {j1}), value(ib, {j2})};
        const std::vector<Rational> swap = {value(ia, {j2}), value(ib, {j1})};
        const NashComparator cmp(weights);
        if (cmp.log_product(keep).is_zero && cmp.log_product(swap).is_zero) {
          state_.zero_flag = true;
          return false;
        }
        if (cmp.compare(keep, swap) >= 0) {
          give(ia, j1);
          give(ib, j2);
        } else {
          give(ia, j2);
          give(ib, j1);
        }
        return true;
      }
    }
    return false;
  }

  bool full(std::size_t i) const {
    return state_.active[i] && state_.held[i].empty() && state_.neighbors[i].size() == 2;
  }

  // Every agent still at utility 0 needs a distinct useful good.
  bool hall_condition() const {
    const std::size_t n = state_.active.size();
    const int vertices = static_cast<int>(n + state_.free_good.size());
    std::vector<matching::WeightedEdge<std::int64_t>> edges;
    int needy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!state_.active[i] || value(static_cast<AgentId>(i), state_.held[i]) > 0) continue;
      ++needy;
      for (GoodId j : state_.neighbors[i]) {
        edges.push_back({static_cast<int>(i), static_cast<int>(n) + j, 1});
      }
    }
    if (needy == 0) return true;
    const auto mate = matching::max_weight_matching(vertices, edges);
    return static_cast<int>(matching::matched_edges(mate, edges).size()) == needy;
  }

  const Instance& inst_;
  const TwoValuable& tv_;
  ReducedState state_;
};

double log_or(const Rational& v, double fallback) { return v > 0 ? log_of(v) : fallback; }

}  // namespace

ReducedState reduce_instance(const Instance& instance) { return Reducer(instance).run(); }

MatchingGraph build_matching_graph(const Instance& instance, const ReducedState& state) {
  const TwoValuable& tv = profile_of(instance);
  const std::size_t n = instance.num_agents();
  MatchingGraph g;
  g.vertices = static_cast<int>(n + instance.num_goods());

  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.active[i]) continue;
    const auto& t = tv.tables[i];
    double worst = 0.0;
    for (const auto& v : t.single) worst = std::max(worst, std::abs(log_or(v, 0.0)));
    if (t.goods.size() == 2) worst = std::max(worst, std::abs(log_or(t.pair, 0.0)));
    spread += to_double(instance.weight(static_cast<AgentId>(i))) * worst;
  }
  g.big = 1.0 + 4.0 * spread;
  g.sentinel = -(2.0 + static_cast<double>(n) * g.big);

  auto add = [&](int u, int v, double w, AgentId owner) {
    g.edges.push_back({u, v, w});
    g.owner.push_back(owner);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.active[i]) continue;
    const auto agent = static_cast<AgentId>(i);
    const double eta = to_double(instance.weight(agent));
    const auto& nb = state.neighbors[i];
    const int vi = static_cast<int>(i);
    if (state.n_prime[i]) {
      const GoodId j = nb.front();
      const Rational alone = instance.value(agent, state.held[i]);
      std::vector<GoodId> both = state.held[i];
      both.push_back(j);
      const double with_j = log_of(instance.value(agent, both));
      const double w = alone > 0 ? eta * (with_j - log_of(alone)) : g.big + eta * with_j;
      add(vi, static_cast<int>(n) + j, w, agent);
      continue;
    }
    for (GoodId j : nb) {
      const Rational v = instance.value(agent, std::vector<GoodId>{j});
      add(vi, static_cast<int>(n) + j, v > 0 ? g.big + eta * log_of(v) : g.sentinel, agent);
    }
    const Rational pair = instance.value(agent, nb);
    add(static_cast<int>(n) + nb[0], static_cast<int>(n) + nb[1], g.big + eta * log_of(pair), agent);
  }
  return g;
}

Solution solve_two_valuable(const Instance& instance) {
  const TwoValuable& tv = profile_of(instance);
  const std::size_t n = instance.num_agents();
  const ReducedState state = reduce_instance(instance);

  Solution solution;
  Allocation& alloc = solution.allocation;
  alloc.bundles = state.held;
  std::vector<char> placed(instance.num_goods(), 0);
  for (const auto& b : alloc.bundles) {
    for (GoodId j : b) placed[at(j)] = 1;
  }
  auto give = [&](AgentId i, GoodId j) {
    alloc.bundles[at(i)].push_back(j);
    placed[at(j)] = 1;
  };

  if (!state.zero_flag) {
    const MatchingGraph g = build_matching_graph(instance, state);
    const auto mate = matching::max_weight_matching(g.vertices, g.edges);
    for (std::size_t k : matching::matched_edges(mate, g.edges)) {
      const auto& e = g.edges[k];
      if (e.u >= static_cast<int>(n)) give(g.owner[k], static_cast<GoodId>(e.u - static_cast<int>(n)));
      give(g.owner[k], static_cast<GoodId>(e.v - static_cast<int>(n)));
    }
    // A good left out of the matching joins an interested agent: an unmatched
    // N' agent, or an agent matched to the other good of its pair.
    for (std::size_t j = 0; j < instance.num_goods(); ++j) {
      if (placed[j]) continue;
      AgentId target = -1, fallback = -1;
      for (std::size_t i = 0; i < n && target < 0; ++i) {
        const auto& nb = state.neighbors[i];
        if (!state.active[i] || std::find(nb.begin(), nb.end(), static_cast<GoodId>(j)) == nb.end()) continue;
        if (fallback < 0) fallback = static_cast<AgentId>(i);
        if (state.n_prime[i] ? mate[i] == -1 : mate[i] >= static_cast<int>(n)) target = static_cast<AgentId>(i);
      }
      if (target < 0) target = fallback;
      if (target >= 0) give(target, static_cast<GoodId>(j));
    }
  }
  // Goods nobody can use.
  for (std::size_t j = 0; j < instance.num_goods(); ++j) {
    if (placed[j]) continue;
    AgentId owner = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& goods = tv.tables[i].goods;
      if (state.zero_flag && std::find(goods.begin(), goods.end(), static_cast<GoodId>(j)) != goods.end()) {
        owner = static_cast<AgentId>(i);
        break;
      }
    }
    give(owner, static_cast<GoodId>(j));
  }
  for (auto& b : alloc.bundles) std::sort(b.begin(), b.end());

  const auto u = utilities(instance, alloc);
  solution.zero_optimum = state.zero_flag || std::any_of(u.begin(), u.end(), [](const Rational& v) { return v == 0; });
  return solution;
}

}  // namespace nashw::two_valuable
