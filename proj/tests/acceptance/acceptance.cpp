// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "nashw/cli.hpp"
#include "nashw/errors.hpp"
#include "nashw/fairness.hpp"
#include "nashw/fptas.hpp"
#include "nashw/io.hpp"
#include "nashw/kary.hpp"
#include "nashw/oracle.hpp"
#include "nashw/ptas.hpp"
#include "nashw/two_valuable.hpp"

#include "../support/support.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace nashw;
using namespace testsupport;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Outcome kary_exactness() {
  Outcome out;
  Rng rng(1001);
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(draw(rng, 1, 4));
    const auto m = static_cast<std::size_t>(draw(rng, 1, 8));
    const auto k = static_cast<std::size_t>(draw(rng, 1, 3));
    const Instance inst = random_kary(rng, n, m, k, 12);
    const auto got = kary::kary_solve(inst);
    const auto best = oracle::brute_force_optimum(inst);
    validate_allocation(inst, got.solution.allocation);
    if (!same_nash_welfare(inst, got.solution.allocation, best.best_allocation)) {
      out.fail("instance " + std::to_string(trial) + ": " + serialize_instance(inst));
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 60) out.fail("runtime " + fmt(secs) + " s");
  out.detail = "200 instances, " + fmt(secs) + " s";
  return out;
}

Outcome two_valuable_exactness() {
  Outcome out;
  Rng rng(2002);
  const auto t0 = Clock::now();
  int complementary = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(draw(rng, 1, 5));
    const auto m = static_cast<std::size_t>(draw(rng, 1, 6));
    const Instance inst = random_two_valuable(rng, n, m, 9);
    for (const auto& t : std::get<TwoValuable>(inst.profile()).tables) {
      if (t.goods.size() == 2 && t.pair > t.single[0] + t.single[1]) ++complementary;
    }
    const auto got = two_valuable::solve_two_valuable(inst);
    const auto best = oracle::brute_force_optimum(inst);
    validate_allocation(inst, got.allocation);
    if (!same_nash_welfare(inst, got.allocation, best.best_allocation)) {
      out.fail("instance " + std::to_string(trial) + ": " + serialize_instance(inst));
    }
    if (got.zero_optimum != best.best_welfare.is_zero) out.fail("zero flag mismatch on instance " + std::to_string(trial));
  }
  const double secs = seconds_since(t0);
  if (secs >= 60) out.fail("runtime " + fmt(secs) + " s");
  out.detail = "300 instances (" + std::to_string(complementary) + " complementary tables), " + fmt(secs) + " s";
  return out;
}

Outcome ptas_guarantee() {
  Outcome out;
  Rng rng(3003);
  const auto t0 = Clock::now();
  const double chain = (1.0 - 8.0 / 12) / (1.0 + 8.0 / 12);
  double worst = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(draw(rng, 1, 3));
    const auto m = static_cast<std::size_t>(draw(rng, 1, 6));
    const Instance inst = random_identical(rng, n, m, 16);
    const auto got = ptas::ptas_solve(inst, 0.8);
    if (got.params.lambda != 12) out.fail("eps 0.8 gave lambda " + std::to_string(got.params.lambda));
    validate_allocation(inst, got.solution.allocation);
    const auto nw = nash_welfare(inst, got.solution.allocation);
    const auto best = oracle::brute_force_optimum(inst).best_welfare;
    if (!best.is_zero) worst = std::min(worst, nw.is_zero ? 0.0 : std::exp(nw.log_value - best.log_value));
    if (!nash_at_least(nw, 0.2, best) || !nash_at_least(nw, chain, best)) {
      out.fail("instance " + std::to_string(trial) + ": " + serialize_instance(inst));
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 300) out.fail("runtime " + fmt(secs) + " s");
  out.detail = "100 instances, worst ratio " + fmt(worst) + ", " + fmt(secs) + " s";
  return out;
}

Outcome ptas_internals() {
  Outcome out;
  Rng rng(4004);
  const ptas::PtasParams params = ptas::PtasParams::from_lambda(12);
  const Rational delta(1, 12);
  const auto subsets = all_subsets(5);
  long scaled_checks = 0, bracket_checks = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Rational> values(5);
    for (auto& v : values) {
      // Mostly integers over a wide range, some fractions.
      v = trial % 4 == 3 ? Rational(draw(rng, 1, 200), draw(rng, 1, 16)) : Rational(draw(rng, 1, trial < 20 ? 16 : 300));
    }
    const ptas::RoundedGoods goods(values, params);
    const auto enumerated = ptas::enumerate_principal_configurations(goods);
    const std::set<ptas::Configuration> known(enumerated.begin(), enumerated.end());

    std::vector<ptas::Configuration> principal;
    for (const auto& a : subsets) {
      const auto c = ptas::principal_configuration_of(goods, a);
      principal.push_back(c);
      if (!represents(c, a, values, 12)) out.fail("principal config does not represent its set");
      if (!known.count(c)) out.fail("principal config missing from the enumeration");
      if (a.empty()) continue;
      for (int e = *c.exponent; e <= *c.exponent + 6; ++e) {
        ++scaled_checks;
        if (!represents(ptas::scale_configuration(c, e, params), a, values, 12)) {
          out.fail("scaled config fails to represent, trial " + std::to_string(trial) + " e=" + std::to_string(e));
        }
      }
    }

    for (int ma = 0; ma < 32; ++ma) {
      for (int mb = 0; mb < 32; ++mb) {
        if ((ma & mb) != ma || mb == 0) continue;
        const auto& a = subsets[static_cast<std::size_t>(ma)];
        const auto& b = subsets[static_cast<std::size_t>(mb)];
        Rational rest = 0;
        for (int j : b) {
          if (!(ma >> j & 1)) rest += values[static_cast<std::size_t>(j)];
        }
        const int eb = *principal[static_cast<std::size_t>(mb)].exponent;
        for (int e = eb; e <= eb + 3; ++e) {
          const Rational w = power_of_two(e);
          auto reps_a = a.empty() ? std::vector<ptas::Configuration>{} : representing_configs(a, values, 12, e);
          if (a.empty()) {
            ptas::Configuration zero;
            zero.exponent = e;
            reps_a.push_back(zero);
          }
          const auto reps_b = representing_configs(b, values, 12, e);
          if (reps_b.empty()) out.fail("no representation of B at its own magnitude");
          for (const auto& ca : reps_a) {
            for (const auto& cb : reps_b) {
              ++bracket_checks;
              const Rational diff = Rational(cb.units() - ca.units()) * delta * delta * w;
              if (!(rest - 2 * delta * w < diff && diff < (1 + delta) * rest + 2 * delta * w)) {
                out.fail("bracket violated, trial " + std::to_string(trial));
              }
            }
          }
        }
      }
    }
  }
  out.detail = "40 instances, " + std::to_string(scaled_checks) + " scaled representations, " +
               std::to_string(bracket_checks) + " nested-pair brackets";
  return out;
}

Outcome pmean_ptas() {
  Outcome out;
  const auto t0 = Clock::now();
  std::string worst;
  for (double p : {1.0, -1.0, kNegativeInfinity}) {
    Rng rng(5005);
    double worst_ratio = 1.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto n = static_cast<std::size_t>(draw(rng, 1, 3));
      const auto m = static_cast<std::size_t>(draw(rng, 1, 6));
      const Instance inst = random_identical(rng, n, m, 16, true);
      const auto got = ptas::pmean_ptas_solve(inst, 0.8, p);
      validate_allocation(inst, got.solution.allocation);
      const auto best = oracle::brute_force_optimum(inst, oracle::Objective::p_mean(p));
      const auto pm = p_mean_welfare(inst, got.solution.allocation, p);
      if (!best.best_welfare.is_zero) {
        worst_ratio = std::min(worst_ratio, pm.is_zero ? 0.0 : std::exp(pm.log_value - best.best_welfare.log_value));
      }
      if (!nash_at_least(pm, 0.2, best.best_welfare)) {
        out.fail("p=" + fmt(p) + " instance " + std::to_string(trial) + ": " + serialize_instance(inst));
      }
      if (p == 1.0 && compare_p_mean(1.0, utilities(inst, got.solution.allocation),
                                     utilities(inst, best.best_allocation)) != 0) {
        out.fail("p=1 ratio not exactly 1 on instance " + std::to_string(trial));
      }
    }
    worst += (worst.empty() ? "" : ", ") + std::string("p=") + fmt(p) + " worst " + fmt(worst_ratio);
  }
  out.detail = "100 instances per p (" + worst + "), " + fmt(seconds_since(t0)) + " s";
  return out;
}

Outcome repair() {
  Outcome out;
  Rng rng(6006);
  const auto t0 = Clock::now();
  std::size_t most = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(draw(rng, 1, 4));
    const auto m = static_cast<std::size_t>(draw(rng, 1, 8));
    const Instance inst = random_identical(rng, n, m, 20);
    Allocation start{std::vector<std::vector<GoodId>>(n)};
    for (std::size_t j = 0; j < m; ++j) {
      start.bundles[static_cast<std::size_t>(draw(rng, 0, static_cast<std::int64_t>(n) - 1))].push_back(
          static_cast<GoodId>(j));
    }
    const auto fixed = fairness::wwef1_repair(inst, start);
    validate_allocation(inst, fixed.allocation);
    if (!wwef1_violations(inst, fixed.allocation).empty()) out.fail("violations remain on instance " + std::to_string(trial));
    if (fixed.log.size() > 4 * n * m) out.fail("too many transfers on instance " + std::to_string(trial));
    most = std::max(most, fixed.log.size());

    const NashComparator cmp(inst.weights());
    Allocation cur = start;
    auto prev = utilities(inst, cur);
    for (const auto& t : fixed.log) {
      auto& from = cur.bundles[static_cast<std::size_t>(t.from)];
      const auto it = std::find(from.begin(), from.end(), t.good);
      if (it == from.end()) {
        out.fail("log moves a good its sender does not hold");
        break;
      }
      from.erase(it);
      cur.bundles[static_cast<std::size_t>(t.to)].push_back(t.good);
      const auto u = utilities(inst, cur);
      if (cmp.compare(u, prev) < 0) out.fail("Nash welfare decreased on instance " + std::to_string(trial));
      prev = u;
    }
    if (cmp.compare(prev, utilities(inst, fixed.allocation)) != 0) out.fail("log replay does not reach the output");

    const auto composed = fairness::wwef1_repair(inst, ptas::ptas_solve(inst, 0.8).solution.allocation);
    const auto best = oracle::brute_force_optimum(inst).best_welfare;
    if (!nash_at_least(nash_welfare(inst, composed.allocation), 0.2, best)) {
      out.fail("ptas then repair below 0.2 on instance " + std::to_string(trial));
    }
    if (!wwef1_violations(inst, composed.allocation).empty()) out.fail("composed pipeline not wwEF1");
  }
  out.detail = "300 instances, most transfers " + std::to_string(most) + ", " + fmt(seconds_since(t0)) + " s";
  return out;
}

// Every exact vector at layer j is covered by some trimmed vector v* with
// v*_i * alpha^j >= v_i.
bool dominated(const fptas::Enumeration& exact, const fptas::Enumeration& trimmed, const Rational& alpha) {
  Rational scale = 1;
  for (std::size_t j = 0; j < exact.layers.size(); ++j) {
    std::vector<std::vector<std::int64_t>> stretched;
    for (const auto& v : trimmed.layers[j]) {
      std::vector<std::int64_t> s;
      for (auto x : v.utilities) {
        const Rational y = Rational(x) * scale;
        s.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(y) / boost::multiprecision::denominator(y)));
      }
      stretched.push_back(std::move(s));
    }
    for (const auto& v : exact.layers[j]) {
      const bool covered = std::any_of(stretched.begin(), stretched.end(), [&](const std::vector<std::int64_t>& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s[i] < v.utilities[i]) return false;
        }
        return true;
      });
      if (!covered) return false;
    }
    scale *= alpha;
  }
  return true;
}

Outcome fptas_guarantee() {
  Outcome out;
  const auto t0 = Clock::now();
  double worst = 1.0;
  for (double eps : {0.25, 0.5}) {
    Rng rng(7007);
    for (int trial = 0; trial < 200; ++trial) {
      const auto n = static_cast<std::size_t>(draw(rng, 1, 3));
      const auto m = static_cast<std::size_t>(draw(rng, 1, 7));
      const Instance inst = random_additive(rng, n, m, 8);
      const auto best = oracle::brute_force_optimum(inst);
      const auto got = fptas::fptas_solve(inst, eps);
      validate_allocation(inst, got.solution.allocation);
      const auto nw = nash_welfare(inst, got.solution.allocation);
      if (!best.best_welfare.is_zero) {
        worst = std::min(worst, nw.is_zero ? 0.0 : std::exp(nw.log_value - best.best_welfare.log_value));
      }
      if (!nash_at_least(nw, 1.0 - eps, best.best_welfare)) {
        out.fail("eps=" + fmt(eps) + " instance " + std::to_string(trial) + ": " + serialize_instance(inst));
      }
      if (eps == 0.25) {
        const auto exact = fptas::exact_enumeration_solve(inst);
        if (!same_nash_welfare(inst, exact.allocation, best.best_allocation)) {
          out.fail("exact enumerator differs from the oracle on instance " + std::to_string(trial));
        }
      }
      const auto params = got.params;
      if (!dominated(fptas::enumerate_utility_vectors(inst), fptas::fptas_enumerate(inst, params), params.alpha)) {
        out.fail("domination invariant broken, eps=" + fmt(eps) + " instance " + std::to_string(trial));
      }
    }
  }
  out.detail = "200 instances per eps, worst ratio " + fmt(worst) + ", " + fmt(seconds_since(t0)) + " s";
  return out;
}

Outcome matching_engine() {
  Outcome out;
  Rng rng(8008);
  int odd_cycles = 0, negative = 0, real = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int vertices = static_cast<int>(draw(rng, 1, 12));
    std::vector<matching::WeightedEdge<std::int64_t>> edges;
    if (trial % 5 == 0 && vertices >= 3) {
      // Odd cycle plus a few chords.
      const int len = vertices % 2 ? vertices : vertices - 1;
      for (int v = 0; v < len; ++v) edges.push_back({v, (v + 1) % len, draw(rng, 1, 20)});
      if (len == 3) edges.pop_back(), edges.push_back({2, 0, draw(rng, 1, 20)});
      ++odd_cycles;
    } else {
      edges = random_graph(rng, vertices, static_cast<int>(draw(rng, 10, 100)), trial % 3 ? -10 : 1, 25);
    }
    if (std::any_of(edges.begin(), edges.end(), [](const auto& e) { return e.weight < 0; })) ++negative;
    const auto mate = matching::max_weight_matching(vertices, edges);
    if (!valid_mate(vertices, edges, mate)) out.fail("invalid mate vector on graph " + std::to_string(trial));
    if (matching::matching_weight(mate, edges) != brute_force_matching_weight(vertices, edges)) {
      out.fail("suboptimal matching on graph " + std::to_string(trial));
    }
    if (trial % 4 == 0) {
      // Same graph with real weights.
      ++real;
      std::vector<matching::WeightedEdge<double>> dedges;
      for (const auto& e : edges) dedges.push_back({e.u, e.v, static_cast<double>(e.weight) + 0.37 * static_cast<double>(draw(rng, 0, 3))});
      const auto dmate = matching::max_weight_matching(vertices, dedges);
      if (!valid_mate(vertices, dedges, dmate) ||
          std::abs(matching::matching_weight(dmate, dedges) - brute_force_matching_weight(vertices, dedges)) > 1e-9) {
        out.fail("suboptimal real-weight matching on graph " + std::to_string(trial));
      }
    }
  }
  out.detail = "1000 graphs (" + std::to_string(odd_cycles) + " odd cycles, " + std::to_string(negative) +
               " with negative edges, " + std::to_string(real) + " real-weight reruns)";
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_round_trip() {
  Outcome out;
  const auto dir = std::filesystem::temp_directory_path() / ("nashw_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  int solved = 0;
  struct Case {
    std::string kind;
    int n, m;
    std::vector<std::string> extra;
  };
  const std::vector<Case> cases = {
      {"identical", 3, 6, {}},          {"identical", 3, 6, {"--method", "ptas", "--repair"}},
      {"identical", 2, 5, {"--method", "pmean", "--p=-inf"}}, {"kary", 4, 8, {"--repair"}},
      {"two-valuable", 4, 5, {}},       {"additive", 3, 5, {}},
      {"additive", 2, 4, {"--method", "oracle"}},
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const auto& cs = cases[c];
      const auto tag = cs.kind + "_" + std::to_string(seed) + "_" + std::to_string(c);
      const auto inst_path = dir / (tag + ".json");
      const auto report_path = dir / (tag + "_report.json");
      std::ostringstream o1, o2, e;
      const std::vector<std::string> gen = {"gen", cs.kind, "--n", std::to_string(cs.n), "--m", std::to_string(cs.m),
                                            "--seed", std::to_string(seed)};
      auto gen_out = gen;
      gen_out.insert(gen_out.end(), {"--out", inst_path.string()});
      if (cli::run(gen, o1, e) != 0 || cli::run(gen, o2, e) != 0 || cli::run(gen_out, o1, e) != 0) {
        out.fail("gen failed: " + e.str());
        continue;
      }
      if (o1.str() != o2.str() || slurp(inst_path) != o2.str()) out.fail("gen not byte-identical for " + tag);
      if (std::find(cs.extra.begin(), cs.extra.end(), "pmean") != cs.extra.end()) {
        // The p-mean path needs equal weights.
        auto doc = nlohmann::json::parse(o2.str());
        for (auto& w : doc["weights"]) w = 1;
        std::ofstream(inst_path) << doc.dump();
      }
      std::vector<std::string> solve = {"solve", inst_path.string(), "--out", report_path.string()};
      solve.insert(solve.end(), cs.extra.begin(), cs.extra.end());
      std::ostringstream so, se;
      if (cli::run(solve, so, se) != 0) {
        out.fail("solve failed for " + tag + ": " + se.str());
        continue;
      }
      std::ostringstream co, ce;
      if (cli::run({"check", inst_path.string(), report_path.string(), "--json"}, co, ce) != 0) {
        out.fail("check rejected the solve output for " + tag + ": " + ce.str());
        continue;
      }
      const auto report = nlohmann::json::parse(slurp(report_path));
      const auto checked = nlohmann::json::parse(co.str());
      if (report["welfare"] != checked["welfare"]) out.fail("welfare differs between solve and check for " + tag);
      if (report.contains("repair")) {
        const auto repaired = dir / (tag + "_repaired.json");
        std::ofstream(repaired) << report["repair"]["allocation"].dump();
        std::ostringstream ro, re;
        if (cli::run({"check", inst_path.string(), repaired.string(), "--json"}, ro, re) != 0 ||
            nlohmann::json::parse(ro.str())["welfare"] != report["repair"]["welfare"]) {
          out.fail("repaired allocation does not round-trip for " + tag);
        }
      }
      ++solved;
    }
  }
  // A different seed must give a different instance.
  std::ostringstream a, b, e;
  cli::run({"gen", "additive", "--n", "3", "--m", "6", "--seed", "1"}, a, e);
  cli::run({"gen", "additive", "--n", "3", "--m", "6", "--seed", "2"}, b, e);
  if (a.str() == b.str()) out.fail("seeds 1 and 2 produced the same instance");
  std::filesystem::remove_all(dir);
  out.detail = std::to_string(solved) + " solve/check round trips, gen byte-exact";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"k-ary DP matches the oracle", kary_exactness},
      {"2-valuable solver matches the oracle", two_valuable_exactness},
      {"Nash PTAS at eps=0.8 within 1/5 of optimum", ptas_guarantee},
      {"scaled representation and bracketing, exhaustive", ptas_internals},
      {"p-mean PTAS for p in {1,-1,-inf}", pmean_ptas},
      {"wwEF1 repair", repair},
      {"FPTAS at eps in {0.25,0.5}", fptas_guarantee},
      {"matching engine vs exhaustive search", matching_engine},
      {"CLI round trip and generator determinism", cli_round_trip},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[c].second();
    } catch (const std::exception& ex) {
      o.fail(std::string("exception: ") + ex.what());
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << c + 1 << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[c].first;
    std::cout << " [" << fmt(seconds_since(t0)) << " s]";
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    if (!o.pass) std::cout << "; first failure: " << o.first_failure;
    std::cout << std::endl;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
