#include "nashw/instance.hpp"

#include "nashw/errors.hpp"

#include <algorithm>
#include <string>

namespace nashw {

namespace {

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::additive: return "additive";
    case ProfileKind::identical: return "identical";
    case ProfileKind::two_valuable: return "two_valuable";
  }
  return "unknown";
}

Instance::Instance(std::vector<Rational> weights, std::size_t num_goods, Profile profile)
    : weights_(std::move(weights)), num_goods_(num_goods), profile_(std::move(profile)) {
  const std::size_t n = weights_.size();
  if (n == 0) throw ParseError("weights", "at least one agent is required");
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_[i] <= 0) throw ParseError(idx("weights", i), "weights must be positive");
  }
  std::visit(overloaded{
                 [&](const AdditiveMatrix& p) {
                   if (p.values.size() != n) throw ParseError("profile.matrix", "expected one row per agent");
                   for (std::size_t i = 0; i < n; ++i) {
                     if (p.values[i].size() != num_goods_) {
                       throw ParseError(idx("profile.matrix", i), "row length must equal the number of goods");
                     }
                     for (std::size_t j = 0; j < num_goods_; ++j) {
                       if (p.values[i][j] < 0) {
                         throw ParseError(idx(idx("profile.matrix", i), j), "values must be nonnegative");
                       }
                     }
                   }
                 },
                 [&](const IdenticalAdditive& p) {
                   if (p.values.size() != num_goods_) throw ParseError("profile.values", "length must equal m");
                   for (std::size_t j = 0; j < num_goods_; ++j) {
                     if (p.values[j] < 0) throw ParseError(idx("profile.values", j), "values must be nonnegative");
                   }
                 },
                 [&](const TwoValuable& p) {
                   if (p.tables.size() != n) throw ParseError("profile.tables", "expected one table per agent");
                   for (std::size_t i = 0; i < n; ++i) {
                     const auto& t = p.tables[i];
                     const std::string path = idx("profile.tables", i);
                     if (t.goods.size() > 2) throw ParseError(path + ".goods", "at most two valued goods per agent");
                     if (t.single.size() != t.goods.size()) {
                       throw ParseError(path + ".single", "one value per listed good required");
                     }
                     for (std::size_t k = 0; k < t.goods.size(); ++k) {
                       if (t.goods[k] < 0 || static_cast<std::size_t>(t.goods[k]) >= num_goods_) {
                         throw ParseError(idx(path + ".goods", k), "good index out of range");
                       }
                       if (t.single[k] < 0) throw ParseError(idx(path + ".single", k), "values must be nonnegative");
                     }
                     if (t.goods.size() == 2) {
                       if (t.goods[0] == t.goods[1]) throw ParseError(path + ".goods", "goods must be distinct");
                       if (t.pair < t.single[0] || t.pair < t.single[1]) {
                         throw ParseError(path + ".pair", "valuation must be monotone");
                       }
                     }
                   }
                 },
             },
             profile_);
}

ProfileKind Instance::kind() const {
  switch (profile_.index()) {
    case 0: return ProfileKind::additive;
    case 1: return ProfileKind::identical;
    default: return ProfileKind::two_valuable;
  }
}

bool Instance::symmetric() const {
  return std::all_of(weights_.begin(), weights_.end(), [&](const Rational& w) { return w == weights_.front(); });
}

Rational Instance::value(AgentId agent, std::span<const GoodId> bundle) const {
  const auto i = static_cast<std::size_t>(agent);
  return std::visit(overloaded{
                        [&](const AdditiveMatrix& p) {
                          Rational sum = 0;
                          for (GoodId j : bundle) sum += p.values[i][static_cast<std::size_t>(j)];
                          return sum;
                        },
                        [&](const IdenticalAdditive& p) {
                          Rational sum = 0;
                          for (GoodId j : bundle) sum += p.values[static_cast<std::size_t>(j)];
                          return sum;
                        },
                        [&](const TwoValuable& p) {
                          const auto& t = p.tables[i];
                          bool held[2] = {false, false};
                          for (GoodId j : bundle) {
                            for (std::size_t k = 0; k < t.goods.size(); ++k) {
                              if (t.goods[k] == j) held[k] = true;
                            }
                          }
                          if (held[0] && held[1]) return t.pair;
                          if (held[0]) return t.single[0];
                          if (held[1]) return t.single[1];
                          return Rational(0);
                        },
                    },
                    profile_);
}

Rational Instance::good_value(AgentId agent, GoodId good) const {
  const GoodId single[1] = {good};
  return value(agent, single);
}

const std::vector<Rational>& Instance::identical_values() const {
  const auto* p = std::get_if<IdenticalAdditive>(&profile_);
  if (!p) throw UnsupportedError("identical additive profile required");
  return p->values;
}

void validate_allocation(const Instance& instance, const Allocation& allocation, bool require_complete) {
  if (allocation.bundles.size() != instance.num_agents()) {
    throw InvalidAllocation("allocation has " + std::to_string(allocation.bundles.size()) + " bundles for " +
                            std::to_string(instance.num_agents()) + " agents");
  }
  std::vector<char> seen(instance.num_goods(), 0);
  for (std::size_t i = 0; i < allocation.bundles.size(); ++i) {
    for (GoodId j : allocation.bundles[i]) {
      if (j < 0 || static_cast<std::size_t>(j) >= instance.num_goods()) {
        throw InvalidAllocation("good " + std::to_string(j) + " in bundle " + std::to_string(i) + " is out of range");
      }
      if (seen[static_cast<std::size_t>(j)]) {
        throw InvalidAllocation("good " + std::to_string(j) + " appears in more than one bundle");
      }
      seen[static_cast<std::size_t>(j)] = 1;
    }
  }
  if (require_complete) {
    for (std::size_t j = 0; j < seen.size(); ++j) {
      if (!seen[j]) throw InvalidAllocation("good " + std::to_string(j) + " is not allocated");
    }
  }
}

std::vector<Rational> utilities(const Instance& instance, const Allocation& allocation) {
  validate_allocation(instance, allocation, false);
  std::vector<Rational> out;
  out.reserve(allocation.bundles.size());
  for (std::size_t i = 0; i < allocation.bundles.size(); ++i) {
    out.push_back(instance.value(static_cast<AgentId>(i), allocation.bundles[i]));
  }
  return out;
}

}  // namespace nashw
