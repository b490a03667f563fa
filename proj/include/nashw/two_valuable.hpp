#pragma once

#include "nashw/instance.hpp"
#include "nashw/matching.hpp"

#include <vector>

namespace nashw::two_valuable {

// Result of the reduction rules. Agents still active form, with the goods
// still free, the bipartite interest graph G: an agent in N' holds one good
// and keeps one neighbour, every other active agent holds nothing and keeps
// two neighbours.
struct ReducedState {
  std::vector<std::vector<GoodId>> held;       // committed goods per agent
  std::vector<char> active;                    // agent still in G
  std::vector<char> free_good;                 // good not yet committed
  std::vector<std::vector<GoodId>> neighbors;  // useful free goods of each active agent
  std::vector<char> n_prime;
  bool zero_flag = false;
};

// Applies the reductions to a fixpoint: forced goods, single-neighbour agents,
// finished agents, the Hall test and K22 resolution. 2-valuable profiles only.
ReducedState reduce_instance(const Instance& instance);

// Matching graph H over the reduced state: vertices 0..n-1 are agents,
// n + j is good j.
struct MatchingGraph {
  std::vector<matching::WeightedEdge<double>> edges;
  std::vector<AgentId> owner;  // agent whose value the edge encodes
  double big = 0.0;            // the constant C
  double sentinel = 0.0;       // weight standing in for ln 0
  int vertices = 0;
};

MatchingGraph build_matching_graph(const Instance& instance, const ReducedState& state);

// Exact maximum Nash welfare allocation for a 2-valuable instance.
Solution solve_two_valuable(const Instance& instance);

}  // namespace nashw::two_valuable
