#pragma once

#include "nashw/instance.hpp"

#include <cstdint>
#include <vector>

namespace nashw::kary {

// Positive good values grouped into classes; classes[c] lists the goods of
// value values[c] in increasing id order.
struct KarySignature {
  std::vector<Rational> values;  // distinct, increasing
  std::vector<std::int64_t> counts;
  std::vector<std::vector<GoodId>> classes;
  std::vector<GoodId> worthless;  // goods of value 0

  std::size_t k() const { return values.size(); }
  // Number of count vectors 0 <= m <= counts, saturating at UINT64_MAX.
  std::uint64_t state_count() const;
};

KarySignature kary_signature(const Instance& instance);

inline constexpr std::uint64_t kDefaultStateCap = 20000;

struct KaryResult {
  Solution solution;
  KarySignature signature;
  std::uint64_t states = 0;
};

// Exact maximum Nash welfare for identical additive valuations by a layered DP
// over count vectors. Throws UnsupportedError for other profiles and
// BudgetExceeded when the state count exceeds `state_cap`.
KaryResult kary_solve(const Instance& instance, std::uint64_t state_cap = kDefaultStateCap);

}  // namespace nashw::kary
