#pragma once

#include "nashw/instance.hpp"
#include "nashw/welfare.hpp"

#include <cstdint>
#include <optional>

namespace nashw::oracle {

struct Objective {
  // nullopt: weighted Nash welfare; otherwise the p-mean with this exponent.
  std::optional<double> p;

  static Objective nash() { return {}; }
  static Objective p_mean(double p) { return {p}; }
};

struct OracleResult {
  Allocation best_allocation;
  WelfareValue best_welfare;
  std::uint64_t enumerated = 0;
};

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

// n^m, saturating at UINT64_MAX.
std::uint64_t allocation_count(std::size_t agents, std::size_t goods);

// Exhaustive sweep over all n^m complete allocations, good j's digit being
// the agent that receives it. Ties keep the lexicographically smallest
// assignment vector. Throws BudgetExceeded when n^m > cap.
OracleResult brute_force_optimum(const Instance& instance, Objective objective = Objective::nash(),
                                 std::uint64_t cap = kDefaultCap);

}  // namespace nashw::oracle
