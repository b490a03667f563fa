#include "nashw/kary.hpp"

#include "nashw/errors.hpp"
#include "nashw/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace nashw::kary {

std::uint64_t KarySignature::state_count() const {
  std::uint64_t total = 1;
  for (std::int64_t c : counts) {
    const auto f = static_cast<std::uint64_t>(c) + 1;
    if (total > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    total *= f;
  }
  return total;
}

KarySignature kary_signature(const Instance& instance) {
  const auto& values = instance.identical_values();
  std::map<Rational, std::vector<GoodId>> by_value;
  KarySignature sig;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > 0) {
      by_value[values[j]].push_back(static_cast<GoodId>(j));
    } else {
      sig.worthless.push_back(static_cast<GoodId>(j));
    }
  }
  for (auto& [v, goods] : by_value) {
    sig.values.push_back(v);
    sig.counts.push_back(static_cast<std::int64_t>(goods.size()));
    sig.classes.push_back(std::move(goods));
  }
  return sig;
}

namespace {

struct Score {
  int zeros = 0;
  double log = 0.0;
};

// Count vectors in mixed radix: state = Σ digit_c * stride_c.
class Lattice {
 public:
  explicit Lattice(const KarySignature& sig) : sig_(sig) {
    std::size_t stride = 1;
    for (std::int64_t c : sig.counts) {
      strides_.push_back(stride);
      stride *= static_cast<std::size_t>(c) + 1;
    }
    size_ = stride;
    values_.resize(size_);
    logs_.resize(size_);
    for (std::size_t s = 0; s < size_; ++s) {
      Rational v = 0;
      for (std::size_t c = 0; c < sig.k(); ++c) v += Rational(digit(s, c)) * sig.values[c];
      logs_[s] = v > 0 ? log_of(v) : kNegativeInfinity;
      values_[s] = std::move(v);
    }
  }

  std::size_t size() const { return size_; }
  std::size_t full() const { return size_ - 1; }
  std::int64_t digit(std::size_t s, std::size_t c) const {
    return static_cast<std::int64_t>((s / strides_[c]) % (static_cast<std::size_t>(sig_.counts[c]) + 1));
  }
  const Rational& value(std::size_t s) const { return values_[s]; }
  double log_value(std::size_t s) const { return logs_[s]; }

  // Calls f(sub) for every sub <= s componentwise, in increasing order.
  template <class F>
  void for_each_below(std::size_t s, F&& f) const {
    const std::size_t k = sig_.k();
    std::vector<std::int64_t> top(k), cur(k, 0);
    for (std::size_t c = 0; c < k; ++c) top[c] = digit(s, c);
    std::size_t sub = 0;
    while (true) {
      f(sub);
      std::size_t c = 0;
      while (c < k && cur[c] == top[c]) {
        sub -= static_cast<std::size_t>(cur[c]) * strides_[c];
        cur[c++] = 0;
      }
      if (c == k) return;
      ++cur[c];
      sub += strides_[c];
    }
  }

 private:
  const KarySignature& sig_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  std::vector<Rational> values_;
  std::vector<double> logs_;
};

}  // namespace

KaryResult kary_solve(const Instance& instance, std::uint64_t state_cap) {
  if (instance.kind() != ProfileKind::identical) throw UnsupportedError("kary requires an identical additive profile");
  KaryResult result;
  result.signature = kary_signature(instance);
  const KarySignature& sig = result.signature;
  const std::size_t n = instance.num_agents();
  result.states = sig.state_count();
  if (result.states > state_cap) {
    throw BudgetExceeded("kary needs " + std::to_string(result.states) + " count vectors, above the cap of " +
                         std::to_string(state_cap));
  }

  Allocation& alloc = result.solution.allocation;
  alloc.bundles.assign(n, {});
  std::int64_t positive = 0;
  for (std::int64_t c : sig.counts) positive += c;

  if (positive < static_cast<std::int64_t>(n)) {
    result.solution.zero_optimum = true;
    std::size_t next = 0;
    for (const auto& cls : sig.classes) {
      for (GoodId j : cls) alloc.bundles[next++].push_back(j);
    }
  } else {
    const Lattice lattice(sig);
    const std::size_t size = lattice.size();
    std::vector<double> eta(n);
    for (std::size_t i = 0; i < n; ++i) eta[i] = to_double(instance.weight(static_cast<AgentId>(i)));

    std::vector<std::vector<std::optional<Score>>> best(n + 1, std::vector<std::optional<Score>>(size));
    std::vector<std::vector<std::size_t>> parent(n + 1, std::vector<std::size_t>(size, 0));
    best[0][0] = Score{};

    // Utilities of agents 0..layer-1 along the path ending with prev -> last.
    auto prefix_utilities = [&](std::size_t layer, std::size_t last, std::size_t prev) {
      std::vector<Rational> u(layer);
      u[layer - 1] = lattice.value(last - prev);
      std::size_t at = prev;
      for (std::size_t l = layer - 1; l > 0; --l) {
        const std::size_t p = parent[l][at];
        u[l - 1] = lattice.value(at - p);
        at = p;
      }
      return u;
    };
    std::vector<NashComparator> comparators;
    for (std::size_t l = 0; l <= n; ++l) {
      comparators.emplace_back(std::span<const Rational>(instance.weights().data(), l));
    }

    for (std::size_t layer = 1; layer <= n; ++layer) {
      const double w = eta[layer - 1];
      for (std::size_t s = 0; s < size; ++s) {
        if (layer == n && s != lattice.full()) continue;
        std::optional<Score> incumbent;
        std::size_t pick = 0;
        lattice.for_each_below(s, [&](std::size_t prev) {
          const auto& before = best[layer - 1][prev];
          if (!before) return;
          Score cand = *before;
          const std::size_t bundle = s - prev;
          if (lattice.value(bundle) == 0) {
            ++cand.zeros;
          } else {
            cand.log += w * lattice.log_value(bundle);
          }
          bool take = !incumbent;
          if (incumbent) {
            if (cand.zeros != incumbent->zeros) {
              take = cand.zeros < incumbent->zeros;
            } else if (!log_near_tie(cand.log, incumbent->log)) {
              take = cand.log > incumbent->log;
            } else if (cand.zeros == 0) {
              take = comparators[layer].compare_exact(prefix_utilities(layer, s, prev),
                                                      prefix_utilities(layer, s, pick)) > 0;
            }
          }
          if (take) {
            incumbent = cand;
            pick = prev;
          }
        });
        best[layer][s] = incumbent;
        parent[layer][s] = pick;
      }
    }

    // Walk back to per-agent count vectors, then draw concrete goods.
    std::vector<std::size_t> bundles(n);
    std::size_t at = lattice.full();
    for (std::size_t layer = n; layer > 0; --layer) {
      const std::size_t p = parent[layer][at];
      bundles[layer - 1] = at - p;
      at = p;
    }
    std::vector<std::size_t> next(sig.k(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < sig.k(); ++c) {
        for (std::int64_t t = 0; t < lattice.digit(bundles[i], c); ++t) alloc.bundles[i].push_back(sig.classes[c][next[c]++]);
      }
    }
  }
  for (GoodId j : sig.worthless) alloc.bundles[0].push_back(j);
  for (auto& b : alloc.bundles) std::sort(b.begin(), b.end());
  return result;
}

}  // namespace nashw::kary
