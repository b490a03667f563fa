#include "nashw/ptas.hpp"

#include "nashw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace nashw::ptas {

Rational Edge::bundle_value(const PtasParams& params) const {
  if (empty_bundle) return 0;
  return Rational(units) * pow2(exponent) / params.lambda_squared();
}

double Edge::log_bundle_value(const PtasParams& params) const {
  if (empty_bundle) return kNegativeInfinity;
  return std::log(static_cast<double>(units)) + exponent * std::log(2.0) -
         std::log(static_cast<double>(params.lambda_squared()));
}

double ConfigGraph::log_cost(const Edge& edge, std::size_t layer) const {
  if (edge.empty_bundle) return kNegativeInfinity;
  return layer_weights[layer - 1] * edge.log_bundle_value(params);
}

ConfigGraph build_configuration_graph(std::vector<Configuration> configs, const Configuration& target,
                                      std::span<const double> ordered_weights, const PtasParams& params) {
  ConfigGraph g;
  g.params = params;
  g.configs = std::move(configs);
  g.layer_weights.assign(ordered_weights.begin(), ordered_weights.end());
  const auto source_it = std::find_if(g.configs.begin(), g.configs.end(),
                                      [](const Configuration& c) { return c.is_empty_set(); });
  const auto target_it = std::find(g.configs.begin(), g.configs.end(), target);
  if (source_it == g.configs.end() || target_it == g.configs.end()) {
    throw InternalError("configuration list lacks the source or the target");
  }
  g.source = static_cast<int>(source_it - g.configs.begin());
  g.target = static_cast<int>(target_it - g.configs.begin());

  const std::size_t count = g.configs.size();
  std::vector<int> exponents;
  for (const auto& c : g.configs) {
    if (c.exponent) exponents.push_back(*c.exponent);
  }
  std::sort(exponents.begin(), exponents.end());
  exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());

  // scaled[c][k]: configuration c rescaled to exponents[k] (when >= its own).
  std::vector<std::vector<std::optional<Configuration>>> scaled(count);
  std::vector<std::vector<std::int64_t>> scaled_units(count);
  for (std::size_t c = 0; c < count; ++c) {
    scaled[c].resize(exponents.size());
    scaled_units[c].resize(exponents.size(), 0);
    for (std::size_t k = 0; k < exponents.size(); ++k) {
      if (g.configs[c].exponent && *g.configs[c].exponent > exponents[k]) continue;
      scaled[c][k] = scale_configuration(g.configs[c], exponents[k], params);
      scaled_units[c][k] = scaled[c][k]->units();
    }
  }
  std::vector<std::size_t> exponent_index(count, 0);
  for (std::size_t c = 0; c < count; ++c) {
    if (g.configs[c].exponent) {
      exponent_index[c] = static_cast<std::size_t>(
          std::lower_bound(exponents.begin(), exponents.end(), *g.configs[c].exponent) - exponents.begin());
    }
  }

  const std::int64_t lambda_sq = params.lambda_squared();
  g.out_edges.resize(count);
  for (std::size_t from = 0; from < count; ++from) {
    for (std::size_t to = 0; to < count; ++to) {
      Edge edge;
      edge.from = static_cast<int>(from);
      edge.to = static_cast<int>(to);
      if (from == to) {
        edge.empty_bundle = true;
        edge.exponent = g.configs[to].exponent.value_or(0);
      } else {
        if (!g.configs[to].exponent) continue;
        const std::size_t k = exponent_index[to];
        if (!scaled[from][k]) continue;
        if (!dominated_by(*scaled[from][k], g.configs[to])) continue;
        const std::int64_t units = g.configs[to].units() - scaled_units[from][k];
        // V(w', m' - m'') >= w' / 3
        if (3 * units < lambda_sq) continue;
        edge.units = units;
        edge.exponent = exponents[k];
      }
      g.out_edges[from].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(edge);
    }
  }
  return g;
}

ConfigGraph build_configuration_graph(const RoundedGoods& goods, std::span<const double> ordered_weights,
                                      std::size_t config_cap) {
  std::vector<int> all(goods.size());
  std::iota(all.begin(), all.end(), 0);
  Configuration target = principal_configuration_of(goods, all);
  return build_configuration_graph(enumerate_principal_configurations(goods, config_cap), target, ordered_weights,
                                   goods.params());
}

Aggregation Aggregation::p_mean(double p) {
  if (p == 0.0) return weighted_product();
  if (p == kNegativeInfinity) return bottleneck();
  return {Kind::p_sum, p};
}

namespace {

// Remaining-path score. `zeros` counts empty bundles where they annihilate the
// objective; `value` is a log-domain sum, log-sum-exp or minimum.
struct Score {
  int zeros = 0;
  double value = 0.0;
};

double log_add(double a, double b) {
  if (a == kNegativeInfinity) return b;
  if (b == kNegativeInfinity) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

bool same_value(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return log_near_tie(a, b);
}

}  // namespace

Path best_path(const ConfigGraph& graph, const Aggregation& aggregation) {
  using Kind = Aggregation::Kind;
  const std::size_t n = graph.layers();
  const std::size_t count = graph.configs.size();
  const bool minimize = aggregation.kind == Kind::p_sum && aggregation.p < 0;

  Score terminal;
  if (aggregation.kind == Kind::p_sum) terminal.value = kNegativeInfinity;
  if (aggregation.kind == Kind::bottleneck) terminal.value = std::numeric_limits<double>::infinity();

  auto combine = [&](const Edge& e, std::size_t layer, Score rest) {
    if (e.empty_bundle) {
      if (!(aggregation.kind == Kind::p_sum && aggregation.p > 0)) ++rest.zeros;
      return rest;
    }
    const double lv = e.log_bundle_value(graph.params);
    switch (aggregation.kind) {
      case Kind::weighted_product: rest.value += graph.layer_weights[layer - 1] * lv; break;
      case Kind::p_sum: rest.value = log_add(rest.value, aggregation.p * lv); break;
      case Kind::bottleneck: rest.value = std::min(rest.value, lv); break;
    }
    return rest;
  };
  // Strictly better; ties keep the incumbent (smaller destination id).
  auto better = [&](const Score& a, const Score& b) {
    if (a.zeros != b.zeros) return a.zeros < b.zeros;
    if (same_value(a.value, b.value)) return false;
    return minimize ? a.value < b.value : a.value > b.value;
  };

  std::vector<std::vector<std::optional<Score>>> best(n + 1, std::vector<std::optional<Score>>(count));
  std::vector<std::vector<int>> choice(n + 1, std::vector<int>(count, -1));
  best[n][static_cast<std::size_t>(graph.target)] = terminal;

  for (std::size_t layer = n; layer-- > 0;) {
    for (std::size_t c = 0; c < count; ++c) {
      if (layer == 0 && static_cast<int>(c) != graph.source) continue;
      std::optional<Score> incumbent;
      int pick = -1;
      for (int id : graph.out_edges[c]) {
        const Edge& e = graph.edges[static_cast<std::size_t>(id)];
        const auto& rest = best[layer + 1][static_cast<std::size_t>(e.to)];
        if (!rest) continue;
        Score s = combine(e, layer + 1, *rest);
        if (!incumbent || better(s, *incumbent)) {
          incumbent = s;
          pick = id;
        }
      }
      best[layer][c] = incumbent;
      choice[layer][c] = pick;
    }
  }
  if (!best[0][static_cast<std::size_t>(graph.source)]) throw InternalError("no source-to-target path");

  Path path;
  int at = graph.source;
  path.configs.push_back(at);
  for (std::size_t layer = 0; layer < n; ++layer) {
    const int id = choice[layer][static_cast<std::size_t>(at)];
    path.edges.push_back(id);
    at = graph.edges[static_cast<std::size_t>(id)].to;
    path.configs.push_back(at);
  }
  return path;
}

namespace {

PtasResult solve_with(const Instance& instance, const PtasParams& params, const Aggregation& aggregation,
                      std::size_t config_cap) {
  const auto& values = instance.identical_values();
  const std::size_t n = instance.num_agents();

  PtasResult result;
  result.params = params;
  result.agent_order.resize(n);
  std::iota(result.agent_order.begin(), result.agent_order.end(), 0);
  std::stable_sort(result.agent_order.begin(), result.agent_order.end(),
                   [&](AgentId a, AgentId b) { return instance.weight(a) < instance.weight(b); });

  std::vector<GoodId> positive, worthless;
  for (std::size_t j = 0; j < values.size(); ++j) {
    (values[j] > 0 ? positive : worthless).push_back(static_cast<GoodId>(j));
  }
  Allocation& alloc = result.solution.allocation;
  alloc.bundles.assign(n, {});

  if (positive.size() < n) {
    // Some agent must end up empty-handed: every allocation has welfare 0.
    result.solution.zero_optimum = true;
    for (std::size_t k = 0; k < positive.size(); ++k) alloc.bundles[k].push_back(positive[k]);
    for (GoodId j : worthless) alloc.bundles[0].push_back(j);
    for (auto& b : alloc.bundles) std::sort(b.begin(), b.end());
    return result;
  }

  std::vector<Rational> positive_values;
  for (GoodId j : positive) positive_values.push_back(values[static_cast<std::size_t>(j)]);
  RoundedGoods goods(std::move(positive_values), params);

  std::vector<double> ordered_weights;
  for (AgentId a : result.agent_order) ordered_weights.push_back(to_double(instance.weight(a)));
  ConfigGraph graph = build_configuration_graph(goods, ordered_weights, config_cap);
  result.configurations = graph.configs.size();
  result.edges = graph.edges.size();
  Path path = best_path(graph, aggregation);

  // Replay the path from the source, growing the allocated set one agent at a time.
  std::vector<std::vector<int>> sorted_bundles(n);
  std::vector<int> allocated;
  Configuration current = graph.configs[static_cast<std::size_t>(graph.source)];
  for (std::size_t layer = 1; layer <= n; ++layer) {
    const Edge& e = graph.edges[static_cast<std::size_t>(path.edges[layer - 1])];
    if (e.empty_bundle) {
      result.path_has_empty_bundle = true;
      continue;
    }
    result.path_log_cost += graph.log_cost(e, layer);
    const Configuration& next = graph.configs[static_cast<std::size_t>(e.to)];
    std::vector<int> grown = extend_bundle(goods, allocated, current, next);
    sorted_bundles[layer - 1].assign(grown.begin() + static_cast<std::ptrdiff_t>(allocated.size()), grown.end());
    allocated = std::move(grown);
    current = next;
  }
  std::vector<char> used(goods.size(), 0);
  for (int j : allocated) used[static_cast<std::size_t>(j)] = 1;
  for (std::size_t j = 0; j < goods.size(); ++j) {
    if (!used[j]) sorted_bundles[n - 1].push_back(static_cast<int>(j));
  }

  for (std::size_t k = 0; k < n; ++k) {
    auto& bundle = alloc.bundles[static_cast<std::size_t>(result.agent_order[k])];
    for (int j : sorted_bundles[k]) bundle.push_back(positive[static_cast<std::size_t>(j)]);
  }
  for (GoodId j : worthless) alloc.bundles[0].push_back(j);
  for (auto& b : alloc.bundles) std::sort(b.begin(), b.end());
  return result;
}

}  // namespace

PtasResult ptas_solve(const Instance& instance, const PtasParams& params, std::size_t config_cap) {
  return solve_with(instance, params, Aggregation::weighted_product(), config_cap);
}

PtasResult ptas_solve(const Instance& instance, double epsilon) {
  return ptas_solve(instance, PtasParams::from_epsilon(epsilon));
}

PtasResult pmean_ptas_solve(const Instance& instance, const PtasParams& params, double p, std::size_t config_cap) {
  if (p == 0.0) return ptas_solve(instance, params, config_cap);
  if (!instance.symmetric()) throw UnsupportedError("the p-mean PTAS requires equal weights");
  return solve_with(instance, params, Aggregation::p_mean(p), config_cap);
}

PtasResult pmean_ptas_solve(const Instance& instance, double epsilon, double p) {
  return pmean_ptas_solve(instance, PtasParams::from_epsilon(epsilon), p);
}

}  // namespace nashw::ptas
