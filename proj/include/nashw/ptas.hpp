#pragma once

#include "nashw/configuration.hpp"
#include "nashw/welfare.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nashw::ptas {

// Transition between two principal configurations. Shared by every layer;
// the layer only contributes the agent weight.
struct Edge {
  int from = 0;
  int to = 0;
  bool empty_bundle = false;  // from == to: the agent receives nothing
  std::int64_t units = 0;     // V(w', m' - m'') in units of delta^2 * w'
  int exponent = 0;           // w' = 2^exponent

  Rational bundle_value(const PtasParams& params) const;
  double log_bundle_value(const PtasParams& params) const;  // -inf for empty bundles
};

// Layered DAG: layer 0 holds only the source (the empty configuration), layers
// 1..n-1 every principal configuration, layer n only the principal
// configuration of all goods.
struct ConfigGraph {
  PtasParams params;
  std::vector<Configuration> configs;
  std::vector<double> layer_weights;  // eta of the agent placed at layer i (1-based: index i-1)
  int source = 0;
  int target = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // by config id, sorted by destination id

  std::size_t layers() const { return layer_weights.size(); }
  // Log-domain cost eta_layer * ln V of using `edge` at 1-based `layer`.
  double log_cost(const Edge& edge, std::size_t layer) const;
};

// Builds the graph over the given principal configurations. `target` must be
// the principal configuration of all goods. `ordered_weights` lists the
// agents' weights in the order they are placed (non-decreasing for the PTAS).
ConfigGraph build_configuration_graph(std::vector<Configuration> configs, const Configuration& target,
                                      std::span<const double> ordered_weights, const PtasParams& params);
ConfigGraph build_configuration_graph(const RoundedGoods& goods, std::span<const double> ordered_weights,
                                      std::size_t config_cap = 20000);

struct Aggregation {
  enum class Kind { weighted_product, p_sum, bottleneck };
  Kind kind = Kind::weighted_product;
  double p = 0.0;

  static Aggregation weighted_product() { return {}; }
  // p > 0 maximizes Σ V^p, p < 0 minimizes it; p = 0 and p = -inf map to the
  // weighted product and the bottleneck respectively.
  static Aggregation p_mean(double p);
  static Aggregation bottleneck() { return {Kind::bottleneck, 0.0}; }
};

struct Path {
  std::vector<int> configs;  // n + 1 config ids, source first
  std::vector<int> edges;    // n edge ids
};

// Optimal source-to-target path. Paths through empty-bundle edges rank below
// every all-positive path for the product, negative-p and bottleneck
// aggregations. Ties go to the lexicographically smallest config sequence.
Path best_path(const ConfigGraph& graph, const Aggregation& aggregation);

struct PtasResult {
  Solution solution;
  PtasParams params;
  std::size_t configurations = 0;
  std::size_t edges = 0;
  double path_log_cost = 0.0;  // Σ eta_i ln V_i of the chosen path (empty edges excluded)
  bool path_has_empty_bundle = false;
  std::vector<AgentId> agent_order;  // agents by non-decreasing weight
};

// Nash welfare PTAS for identical additive valuations with arbitrary weights.
PtasResult ptas_solve(const Instance& instance, const PtasParams& params, std::size_t config_cap = 20000);
PtasResult ptas_solve(const Instance& instance, double epsilon);

// p-mean welfare PTAS; requires equal weights (p = 0 gives the Nash PTAS).
PtasResult pmean_ptas_solve(const Instance& instance, const PtasParams& params, double p,
                            std::size_t config_cap = 20000);
PtasResult pmean_ptas_solve(const Instance& instance, double epsilon, double p);

}  // namespace nashw::ptas
