#pragma once

#include <cstdint>
#include <vector>

namespace nashw::matching {

template <class W>
struct WeightedEdge {
  int u = 0;
  int v = 0;
  W weight{};
};

// Maximum-weight matching in a general simple graph (blossom algorithm,
// primal-dual). Negative edges are never forced; cardinality is not
// maximised. Returns mate[v] (or -1) for every vertex in [0, vertices).
// Throws ParameterError on loops, parallel edges or out-of-range endpoints.
// Instantiated for std::int64_t and double.
template <class W>
std::vector<int> max_weight_matching(int vertices, const std::vector<WeightedEdge<W>>& edges);

// Indices of the edges whose endpoints are mated to each other.
template <class W>
std::vector<std::size_t> matched_edges(const std::vector<int>& mate, const std::vector<WeightedEdge<W>>& edges);

template <class W>
W matching_weight(const std::vector<int>& mate, const std::vector<WeightedEdge<W>>& edges) {
  W total{};
  for (std::size_t k : matched_edges(mate, edges)) total += edges[k].weight;
  return total;
}

}  // namespace nashw::matching
