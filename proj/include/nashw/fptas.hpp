#pragma once

#include "nashw/instance.hpp"

#include <cstdint>
#include <vector>

namespace nashw::fptas {

struct FptasParams {
  double epsilon = 0.5;
  Rational alpha;                // 1 + eps / (2m)
  std::int64_t max_utility = 0;  // m * v_max
  int K = 0;                     // ceil(log_alpha max_utility), 0 when max_utility <= 1

  // Throws ParameterError unless 0 < eps < 1.
  static FptasParams make(double epsilon, std::size_t goods, std::int64_t max_value);
  static FptasParams for_instance(double epsilon, const Instance& instance);
};

// Bucket of a utility under ~: -1 for 0, otherwise the smallest k >= 0 with
// u <= alpha^k, computed exactly.
class Bucketer {
 public:
  explicit Bucketer(const FptasParams& params);
  int bucket(std::int64_t utility) const;
  const Rational& power(int k) const;

 private:
  Rational alpha_;
  double log_alpha_;
  mutable std::vector<Rational> powers_;
};

// `parent` indexes the previous layer; `good` went to `agent`.
struct UtilityVector {
  std::vector<std::int64_t> utilities;
  int parent = -1;
  GoodId good = -1;
  AgentId agent = -1;
};

using VectorLayer = std::vector<UtilityVector>;

// layers[j] holds the vectors after goods 0..j-1 have been placed.
struct Enumeration {
  std::vector<VectorLayer> layers;

  std::size_t max_layer_size() const;
};

inline constexpr std::size_t kDefaultVectorCap = 2'000'000;

// Integer additive valuations as an n x m matrix; throws UnsupportedError
// ("integer valuations required") otherwise.
std::vector<std::vector<std::int64_t>> integer_valuations(const Instance& instance);

// Every reachable utility vector, layer by layer (distinct vectors, first
// occurrence kept). Throws BudgetExceeded when a layer exceeds `cap`.
Enumeration enumerate_utility_vectors(const Instance& instance, std::size_t cap = kDefaultVectorCap);

// One representative (the first) per ~ class; parents are preserved.
VectorLayer reduce_vectors(const VectorLayer& vectors, const Bucketer& bucketer);
VectorLayer reduce_vectors(const VectorLayer& vectors, const FptasParams& params);

// The trimmed enumeration: every layer is reduced before the next expansion.
Enumeration fptas_enumerate(const Instance& instance, const FptasParams& params, std::size_t cap = kDefaultVectorCap);

// Best weighted Nash welfare vector of the last layer, turned into an allocation.
Solution best_allocation(const Instance& instance, const Enumeration& enumeration);

struct FptasResult {
  Solution solution;
  FptasParams params;
  std::size_t max_layer_size = 0;
};

FptasResult fptas_solve(const Instance& instance, double epsilon, std::size_t cap = kDefaultVectorCap);
Solution exact_enumeration_solve(const Instance& instance, std::size_t cap = kDefaultVectorCap);

}  // namespace nashw::fptas
