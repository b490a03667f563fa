#include "nashw/fairness.hpp"

#include "nashw/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace nashw::fairness {

namespace {

class RepairState {
 public:
  RepairState(const Instance& instance, Allocation allocation)
      : values_(instance.identical_values()), weights_(instance.weights()), alloc_(std::move(allocation)) {
    for (const auto& b : alloc_.bundles) {
      Rational total = 0;
      for (GoodId j : b) total += values_[static_cast<std::size_t>(j)];
      totals_.push_back(total);
    }
  }

  std::size_t agents() const { return alloc_.bundles.size(); }
  const Allocation& allocation() const { return alloc_; }
  const Rational& value(GoodId j) const { return values_[static_cast<std::size_t>(j)]; }
  Rational scaled(AgentId i) const { return totals_[idx(i)] / weights_[idx(i)]; }

  // i is not wwEF1 towards h, given i's and h's totals; max_good is the
  // largest good value in x_h.
  bool envies_with(AgentId i, const Rational& own, AgentId h, const Rational& other, const Rational& max_good) const {
    const Rational& wi = weights_[idx(i)];
    const Rational& wh = weights_[idx(h)];
    return own / wi < other / wh - max_good / std::min(wi, wh);
  }

  bool envies(AgentId i, AgentId h) const {
    if (i == h || alloc_.bundles[idx(h)].empty()) return false;
    Rational most = 0;
    for (GoodId j : alloc_.bundles[idx(h)]) most = std::max(most, value(j));
    return envies_with(i, totals_[idx(i)], h, totals_[idx(h)], most);
  }

  // Would i still envy h after receiving g from h?
  bool envies_after(AgentId i, AgentId h, GoodId g) const {
    const auto& bundle = alloc_.bundles[idx(h)];
    if (bundle.size() == 1) return false;
    Rational most = 0;
    for (GoodId j : bundle) {
      if (j != g) most = std::max(most, value(j));
    }
    return envies_with(i, totals_[idx(i)] + value(g), h, totals_[idx(h)] - value(g), most);
  }

  void move(GoodId g, AgentId from, AgentId to) {
    auto& src = alloc_.bundles[idx(from)];
    src.erase(std::find(src.begin(), src.end(), g));
    auto& dst = alloc_.bundles[idx(to)];
    dst.insert(std::upper_bound(dst.begin(), dst.end(), g), g);
    totals_[idx(from)] -= value(g);
    totals_[idx(to)] += value(g);
  }

  const std::vector<GoodId>& bundle(AgentId i) const { return alloc_.bundles[idx(i)]; }

 private:
  static std::size_t idx(AgentId i) { return static_cast<std::size_t>(i); }

  const std::vector<Rational>& values_;
  const std::vector<Rational>& weights_;
  Allocation alloc_;
  std::vector<Rational> totals_;
};

}  // namespace

RepairResult wwef1_repair(const Instance& instance, const Allocation& allocation, std::size_t transfer_cap) {
  if (instance.kind() != ProfileKind::identical) {
    throw UnsupportedError("wwEF1 repair requires an identical additive profile");
  }
  validate_allocation(instance, allocation, true);
  const std::size_t n = instance.num_agents();
  if (transfer_cap == 0) transfer_cap = 64 * (n * instance.num_goods() + 1);

  Allocation sorted_input = allocation;
  for (auto& b : sorted_input.bundles) std::sort(b.begin(), b.end());
  RepairState state(instance, std::move(sorted_input));
  RepairResult result;

  auto record = [&](int round, AgentId from, AgentId to, GoodId g) {
    state.move(g, from, to);
    result.log.push_back({round, from, to, g, false});
    if (result.log.size() > transfer_cap) {
      throw InternalError("wwEF1 repair exceeded " + std::to_string(transfer_cap) + " transfers");
    }
  };

  for (int round = 0;; ++round) {
    std::vector<AgentId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Rational> key(n);
    for (std::size_t a = 0; a < n; ++a) key[a] = state.scaled(static_cast<AgentId>(a));
    std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
      return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)];
    });

    AgentId envious = -1, envied = -1;
    for (AgentId i : order) {
      for (AgentId h : order) {
        if (state.envies(i, h)) {
          envied = h;
          break;
        }
      }
      if (envied >= 0) {
        envious = i;
        break;
      }
    }
    if (envious < 0) break;
    result.rounds = round + 1;

    // Smallest good whose transfer settles i's envy towards h, else the largest.
    std::vector<GoodId> candidates = state.bundle(envied);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](GoodId a, GoodId b) { return state.value(a) < state.value(b); });
    GoodId g = -1;
    for (GoodId c : candidates) {
      if (!state.envies_after(envious, envied, c)) {
        g = c;
        break;
      }
    }
    if (g < 0) {
      g = candidates.back();
      for (GoodId c : candidates) {
        if (state.value(c) == state.value(candidates.back())) {
          g = c;
          break;
        }
      }
    }
    record(round, envied, envious, g);

    AgentId holder = envious;
    while (true) {
      AgentId next = -1;
      for (AgentId l : order) {
        if (l != holder && state.envies(l, holder)) {
          next = l;
          break;
        }
      }
      if (next < 0) break;
      record(round, holder, next, g);
      holder = next;
    }
    result.log.back().final_in_cascade = true;
  }
  result.allocation = state.allocation();
  return result;
}

std::string transfer_log_jsonl(const std::vector<Transfer>& log) {
  std::string out;
  for (const auto& t : log) {
    nlohmann::ordered_json line = {{"round", t.round}, {"from", t.from}, {"to", t.to}, {"good", t.good}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace nashw::fairness
