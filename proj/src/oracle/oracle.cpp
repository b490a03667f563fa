#include "nashw/oracle.hpp"

#include "nashw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nashw::oracle {

namespace {

// Valuations rescaled by one common factor so that every bundle value is an
// int64. A common factor preserves both the Nash and the p-mean order.
class ScaledValuation {
 public:
  explicit ScaledValuation(const Instance& instance) : instance_(instance) {
    BigInt common = 1;
    auto absorb = [&](const Rational& v) { common = lcm(common, boost::multiprecision::denominator(v)); };
    const std::size_t n = instance.num_agents(), m = instance.num_goods();
    if (const auto* tv = std::get_if<TwoValuable>(&instance.profile())) {
      for (const auto& t : tv->tables) {
        for (const auto& v : t.single) absorb(v);
        absorb(t.pair);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) absorb(instance.good_value(static_cast<AgentId>(i), static_cast<GoodId>(j)));
    }
    const BigInt limit = BigInt(1) << 62;
    auto scale = [&](const Rational& v) -> std::int64_t {
      BigInt s = boost::multiprecision::numerator(v) * (common / boost::multiprecision::denominator(v));
      if (s >= limit) throw std::overflow_error("scaled value too large");
      return s.convert_to<std::int64_t>();
    };
    if (const auto* tv = std::get_if<TwoValuable>(&instance.profile())) {
      two_valuable_ = true;
      for (const auto& t : tv->tables) {
        Table table;
        table.goods = t.goods;
        for (const auto& v : t.single) table.single.push_back(scale(v));
        table.pair = t.goods.size() == 2 ? scale(t.pair) : 0;
        tables_.push_back(std::move(table));
      }
    } else {
      matrix_.assign(n, std::vector<std::int64_t>(m, 0));
      for (std::size_t i = 0; i < n; ++i) {
        BigInt total = 0;
        for (std::size_t j = 0; j < m; ++j) {
          matrix_[i][j] = scale(instance.good_value(static_cast<AgentId>(i), static_cast<GoodId>(j)));
          total += matrix_[i][j];
        }
        if (total >= limit) throw std::overflow_error("scaled utility too large");
      }
    }
  }

  void utilities(const std::vector<int>& assignment, std::vector<std::int64_t>& out) const {
    std::fill(out.begin(), out.end(), 0);
    if (!two_valuable_) {
      for (std::size_t j = 0; j < assignment.size(); ++j) {
        const auto i = static_cast<std::size_t>(assignment[j]);
        out[i] += matrix_[i][j];
      }
      return;
    }
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      const Table& t = tables_[i];
      bool held[2] = {false, false};
      for (std::size_t k = 0; k < t.goods.size(); ++k) {
        held[k] = assignment[static_cast<std::size_t>(t.goods[k])] == static_cast<int>(i);
      }
      out[i] = held[0] && held[1] ? t.pair : held[0] ? t.single[0] : held[1] ? t.single[1] : 0;
    }
  }

 private:
  struct Table {
    std::vector<GoodId> goods;
    std::vector<std::int64_t> single;
    std::int64_t pair = 0;
  };
  const Instance& instance_;
  bool two_valuable_ = false;
  std::vector<std::vector<std::int64_t>> matrix_;
  std::vector<Table> tables_;
};

Allocation to_allocation(const std::vector<int>& assignment, std::size_t agents) {
  Allocation a;
  a.bundles.resize(agents);
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    a.bundles[static_cast<std::size_t>(assignment[j])].push_back(static_cast<GoodId>(j));
  }
  return a;
}

std::vector<Rational> as_rationals(const std::vector<std::int64_t>& v) {
  return std::vector<Rational>(v.begin(), v.end());
}

}  // namespace

std::uint64_t allocation_count(std::size_t agents, std::size_t goods) {
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < goods; ++j) {
    if (total > std::numeric_limits<std::uint64_t>::max() / std::max<std::size_t>(agents, 1)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= agents;
  }
  return total;
}

OracleResult brute_force_optimum(const Instance& instance, Objective objective, std::uint64_t cap) {
  const std::size_t n = instance.num_agents(), m = instance.num_goods();
  const std::uint64_t total = allocation_count(n, m);
  if (total > cap) {
    throw BudgetExceeded("brute force needs " + std::to_string(n) + "^" + std::to_string(m) +
                         " allocations, above the cap of " + std::to_string(cap));
  }
  if (objective.p && *objective.p != 0.0 && !instance.symmetric()) {
    throw UnsupportedError("p-mean objective with p != 0 requires equal weights");
  }
  const bool nash = !objective.p || *objective.p == 0.0;
  const double p = objective.p.value_or(0.0);

  ScaledValuation valuation(instance);
  NashComparator comparator(instance.weights());
  const auto weights = comparator.weights();
  std::vector<double> exps(n);
  for (std::size_t i = 0; i < n; ++i) exps[i] = weights[i];

  // Score in double log domain; zero utilities flag the whole score.
  auto score = [&](const std::vector<std::int64_t>& u) -> WelfareValue {
    if (nash) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (u[i] <= 0) return WelfareValue::zero();
        s += exps[i] * std::log(static_cast<double>(u[i]));
      }
      return WelfareValue::from_log(s);
    }
    return p_mean_of(as_rationals(u), p);
  };
  auto exact = [&](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (nash) {
      // Permutations among equal-weight agents are the common exact tie.
      std::vector<std::pair<double, std::int64_t>> sa, sb;
      for (std::size_t i = 0; i < n; ++i) {
        sa.emplace_back(exps[i], a[i]);
        sb.emplace_back(exps[i], b[i]);
      }
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (sa == sb) return 0;
      return comparator.compare_exact(as_rationals(a), as_rationals(b));
    }
    return compare_p_mean(p, as_rationals(a), as_rationals(b));
  };

  std::vector<int> assignment(m, 0), best_assignment(m, 0);
  std::vector<std::int64_t> u(n, 0), best_u(n, 0);
  valuation.utilities(assignment, best_u);
  WelfareValue best_score = score(best_u);
  std::uint64_t visited = 1;

  while (true) {
    // Mixed-radix increment with the last good as the least significant digit.
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++assignment[pos] < static_cast<int>(n)) break;
      assignment[pos] = 0;
      if (pos == 0) {
        pos = m + 1;
        break;
      }
    }
    if (m == 0 || pos == m + 1) break;
    ++visited;
    valuation.utilities(assignment, u);
    WelfareValue s = score(u);
    int cmp;
    if (s.is_zero || best_score.is_zero) {
      cmp = static_cast<int>(!s.is_zero) - static_cast<int>(!best_score.is_zero);
    } else if (!log_near_tie(s.log_value, best_score.log_value)) {
      cmp = s.log_value > best_score.log_value ? 1 : -1;
    } else {
      cmp = exact(u, best_u);
    }
    if (cmp > 0) {
      best_score = s;
      best_assignment = assignment;
      best_u = u;
    }
  }

  OracleResult result;
  result.best_allocation = to_allocation(best_assignment, n);
  result.best_welfare = nash ? nash_welfare(instance, result.best_allocation)
                             : p_mean_welfare(instance, result.best_allocation, p);
  result.enumerated = visited;
  return result;
}

}  // namespace nashw::oracle
