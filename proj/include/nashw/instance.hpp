#pragma once

#include "nashw/rational.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace nashw {

using AgentId = int;
using GoodId = int;

// v_ij for every agent/good pair.
struct AdditiveMatrix {
  std::vector<std::vector<Rational>> values;
};

// Common value u_j of every good; all agents share the valuation.
struct IdenticalAdditive {
  std::vector<Rational> values;
};

// An agent that cares about at most two goods. `single[k]` is v({goods[k]});
// `pair` is v({goods[0], goods[1]}) and only meaningful when two goods are listed.
struct TwoValuableTable {
  std::vector<GoodId> goods;
  std::vector<Rational> single;
  Rational pair = 0;
};

struct TwoValuable {
  std::vector<TwoValuableTable> tables;
};

using Profile = std::variant<AdditiveMatrix, IdenticalAdditive, TwoValuable>;

enum class ProfileKind { additive, identical, two_valuable };

const char* to_string(ProfileKind kind);

// An immutable fair-division instance: agents with positive entitlements and
// a valuation profile over goods 0..m-1. The constructor validates every
// invariant and throws ParseError with a field path on violation.
class Instance {
 public:
  Instance(std::vector<Rational> weights, std::size_t num_goods, Profile profile);

  std::size_t num_agents() const { return weights_.size(); }
  std::size_t num_goods() const { return num_goods_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(AgentId i) const { return weights_[static_cast<std::size_t>(i)]; }
  const Profile& profile() const { return profile_; }
  ProfileKind kind() const;

  bool symmetric() const;

  // v_i(S) for a bundle of distinct goods.
  Rational value(AgentId agent, std::span<const GoodId> bundle) const;
  // v_ij = v_i({j}).
  Rational good_value(AgentId agent, GoodId good) const;

  // Identical profile only: the common good values.
  const std::vector<Rational>& identical_values() const;

 private:
  std::vector<Rational> weights_;
  std::size_t num_goods_;
  Profile profile_;
};

// Bundles indexed by agent.
struct Allocation {
  std::vector<std::vector<GoodId>> bundles;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Throws InvalidAllocation on wrong agent count, out-of-range or repeated
// goods, and (when `require_complete`) uncovered goods.
void validate_allocation(const Instance& instance, const Allocation& allocation, bool require_complete = true);

std::vector<Rational> utilities(const Instance& instance, const Allocation& allocation);

// Every solver returns a complete allocation; `zero_optimum` marks instances
// whose best achievable Nash welfare is 0, where the allocation is arbitrary.
struct Solution {
  Allocation allocation;
  bool zero_optimum = false;
};

}  // namespace nashw
