#include "nashw/cli.hpp"

#include "nashw/configuration.hpp"
#include "nashw/errors.hpp"
#include "nashw/fairness.hpp"
#include "nashw/fptas.hpp"
#include "nashw/io.hpp"
#include "nashw/kary.hpp"
#include "nashw/oracle.hpp"
#include "nashw/ptas.hpp"
#include "nashw/two_valuable.hpp"
#include "nashw/welfare.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace nashw::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) { return nlohmann::json(x).dump(); }

ordered_json p_json(double p) {
  if (p == kNegativeInfinity) return "-inf";
  return p;
}

ordered_json welfare_block(const WelfareValue& w) {
  ordered_json out;
  out["zero"] = w.is_zero;
  if (w.is_zero) {
    out["log"] = nullptr;
    out["linear"] = 0.0;
  } else {
    out["log"] = w.log_value;
    const double linear = w.linear();
    out["linear"] = std::isfinite(linear) ? ordered_json(linear) : ordered_json(nullptr);
  }
  return out;
}

std::string ptas_guarantee(const ptas::PtasParams& params) {
  if (params.lambda < 12) return "none: lambda below 12";
  if (params.guarantee_applies() && params.epsilon) return "(1-eps) with eps=" + format_double(*params.epsilon);
  // lambda >= (16 - 8 eps) / eps  <=>  eps >= 16 / (lambda + 8)
  return "(1-eps) with eps=" + format_double(16.0 / (params.lambda + 8));
}

ptas::PtasParams ptas_params(const SolveOptions& o) {
  if (o.lambda) return ptas::PtasParams::from_lambda(*o.lambda, o.epsilon);
  return ptas::PtasParams::from_epsilon(o.epsilon.value_or(0.8));
}

// Multiplies each agent's row by the lcm of its denominators; the Nash
// optimum is unchanged by per-agent scaling.
Instance integer_scaled(const Instance& instance) {
  const auto* matrix = std::get_if<AdditiveMatrix>(&instance.profile());
  if (!matrix) return instance;
  AdditiveMatrix scaled = *matrix;
  for (auto& row : scaled.values) {
    BigInt common = 1;
    for (const auto& v : row) common = lcm(common, boost::multiprecision::denominator(v));
    for (auto& v : row) v *= common;
  }
  return Instance(instance.weights(), instance.num_goods(), scaled);
}

std::string resolve_method(const Instance& instance, const SolveOptions& o) {
  if (o.method != "auto") return o.method;
  switch (instance.kind()) {
    case ProfileKind::two_valuable: return "two-valuable";
    case ProfileKind::identical:
      return kary::kary_signature(instance).state_count() <= o.budget.value_or(kary::kDefaultStateCap) ? "kary"
                                                                                                      : "ptas";
    case ProfileKind::additive:
      if (instance.num_agents() <= 4) return "fptas";
      throw UnsupportedError(
          "no automatic method for additive instances with more than 4 agents; choose one of "
          "ptas|pmean|kary|two-valuable|fptas|oracle");
  }
  throw InternalError("unknown profile kind");
}

}  // namespace

double parse_p(const std::string& text) {
  if (text == "-inf" || text == "-infinity" || text == "-Infinity") return kNegativeInfinity;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(p)) throw ParameterError("bad value for p: '" + text + "'");
  return p;
}

ordered_json welfare_json(const Instance& instance, const Allocation& allocation) {
  return welfare_block(nash_welfare(instance, allocation));
}

ordered_json solve_report(const Instance& instance, const SolveOptions& o) {
  const std::string method = resolve_method(instance, o);
  ordered_json params = ordered_json::object();
  Solution solution;
  std::string guarantee = "exact";
  std::optional<double> objective_p;

  if (method == "oracle") {
    oracle::Objective objective;
    if (o.p && *o.p != 0.0) {
      objective = oracle::Objective::p_mean(*o.p);
      objective_p = o.p;
      params["p"] = p_json(*o.p);
    }
    solution.allocation = oracle::brute_force_optimum(instance, objective, o.budget.value_or(oracle::kDefaultCap))
                              .best_allocation;
    solution.zero_optimum = nash_welfare(instance, solution.allocation).is_zero;
  } else if (method == "ptas" || method == "pmean") {
    const auto pp = ptas_params(o);
    const std::size_t cap = o.budget.value_or(20000);
    if (pp.epsilon) params["epsilon"] = *pp.epsilon;
    params["lambda"] = pp.lambda;
    ptas::PtasResult r;
    if (method == "pmean") {
      const double p = o.p.value_or(0.0);
      params["p"] = p_json(p);
      objective_p = p;
      r = ptas::pmean_ptas_solve(instance, pp, p, cap);
    } else {
      r = ptas::ptas_solve(instance, pp, cap);
    }
    solution = r.solution;
    guarantee = ptas_guarantee(pp);
  } else if (method == "kary") {
    solution = kary::kary_solve(instance, o.budget.value_or(kary::kDefaultStateCap)).solution;
  } else if (method == "two-valuable") {
    solution = two_valuable::solve_two_valuable(instance);
  } else if (method == "fptas") {
    const double eps = o.epsilon.value_or(0.5);
    params["epsilon"] = eps;
    const std::size_t cap = o.budget.value_or(fptas::kDefaultVectorCap);
    if (o.method == "auto") {
      const Instance scaled = integer_scaled(instance);
      solution = fptas::fptas_solve(scaled, eps, cap).solution;
      params["prescaled"] = true;
    } else {
      solution = fptas::fptas_solve(instance, eps, cap).solution;
    }
    guarantee = "(1-eps) with eps=" + format_double(eps);
  } else {
    throw ParameterError("unknown method '" + method + "'; expected auto|ptas|pmean|kary|two-valuable|fptas|oracle");
  }

  ordered_json report;
  report["method"] = method;
  report["params"] = params;
  report["allocation"] = allocation_to_json(solution.allocation);
  report["welfare"] = welfare_json(instance, solution.allocation);
  if (objective_p) {
    ordered_json obj;
    obj["p"] = p_json(*objective_p);
    obj["welfare"] = welfare_block(p_mean_welfare(instance, solution.allocation, *objective_p));
    report["objective"] = obj;
  }
  report["wwef1"] = wwef1_violations(instance, solution.allocation).empty();
  report["guarantee"] = guarantee;
  report["zero_optimum"] = solution.zero_optimum;
  if (o.repair) {
    const auto repaired = fairness::wwef1_repair(instance, solution.allocation);
    ordered_json rep;
    rep["allocation"] = allocation_to_json(repaired.allocation);
    rep["welfare"] = welfare_json(instance, repaired.allocation);
    rep["wwef1"] = wwef1_violations(instance, repaired.allocation).empty();
    rep["transfers"] = repaired.log.size();
    ordered_json log = ordered_json::array();
    for (const auto& t : repaired.log) {
      log.push_back({{"round", t.round}, {"from", t.from}, {"to", t.to}, {"good", t.good}});
    }
    rep["log"] = log;
    report["repair"] = rep;
  }
  return report;
}

Instance generate_instance(const GenOptions& g) {
  if (g.n < 1 || g.m < 1) throw ParameterError("n and m must be at least 1");
  if (g.value_max < 1) throw ParameterError("value-max must be at least 1");
  std::mt19937_64 rng(g.seed);
  // Modulo keeps the stream identical across standard libraries.
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  const auto n = static_cast<std::size_t>(g.n), m = static_cast<std::size_t>(g.m);
  std::vector<Rational> weights(n);
  for (auto& w : weights) w = draw(1, g.n);

  if (g.kind == "identical") {
    std::vector<Rational> values(m);
    for (auto& v : values) v = draw(1, g.value_max);
    return Instance(weights, m, IdenticalAdditive{values});
  }
  if (g.kind == "kary") {
    if (g.k < 1 || g.k > g.value_max) throw ParameterError("k must lie in [1, value-max]");
    std::set<std::int64_t> distinct;
    while (static_cast<int>(distinct.size()) < g.k) distinct.insert(draw(1, g.value_max));
    const std::vector<std::int64_t> pool(distinct.begin(), distinct.end());
    std::vector<Rational> values(m);
    for (auto& v : values) v = pool[static_cast<std::size_t>(draw(0, g.k - 1))];
    return Instance(weights, m, IdenticalAdditive{values});
  }
  if (g.kind == "additive") {
    AdditiveMatrix matrix{std::vector<std::vector<Rational>>(n, std::vector<Rational>(m))};
    for (auto& row : matrix.values) {
      for (auto& v : row) v = draw(0, g.value_max);
    }
    return Instance(weights, m, matrix);
  }
  if (g.kind == "two-valuable") {
    TwoValuable tv;
    for (std::size_t i = 0; i < n; ++i) {
      TwoValuableTable t;
      const bool pair = m >= 2 && draw(0, 1) == 1;
      const auto first = static_cast<GoodId>(draw(0, g.m - 1));
      t.goods.push_back(first);
      if (pair) {
        auto second = static_cast<GoodId>(draw(0, g.m - 2));
        if (second >= first) ++second;
        t.goods.push_back(second);
        if (draw(0, 3) == 0) {
          // Complementary: worthless alone.
          t.single = {0, 0};
          t.pair = draw(1, g.value_max);
        } else {
          const std::int64_t a = draw(0, g.value_max), b = draw(0, g.value_max);
          t.single = {a, b};
          t.pair = std::max<std::int64_t>(std::max(a, b) + draw(0, a + b - std::max(a, b)), 1);
        }
      } else {
        t.single = {draw(1, g.value_max)};
      }
      tv.tables.push_back(std::move(t));
    }
    return Instance(weights, m, tv);
  }
  throw ParameterError("unknown kind '" + g.kind + "'; expected identical|kary|two-valuable|additive");
}

namespace {

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

// Accepts a bare allocation document or a solve report.
Allocation load_allocation(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("allocation")) return allocation_from_json(doc["allocation"]);
  return allocation_from_json(doc);
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + out_path + "'");
  file << text;
}

std::string check_text(const Instance& instance, const Allocation& allocation) {
  validate_allocation(instance, allocation, true);
  std::ostringstream s;
  const WelfareValue w = nash_welfare(instance, allocation);
  if (w.is_zero) {
    s << "nash_welfare: 0\nnash_welfare_log: -inf\n";
  } else {
    s << "nash_welfare: " << format_double(w.linear()) << "\nnash_welfare_log: " << format_double(w.log_value) << "\n";
  }
  const auto u = utilities(instance, allocation);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Rational ratio = u[i] / instance.weight(static_cast<AgentId>(i));
    s << "agent " << i + 1 << ": value " << to_string(u[i]) << ", weight " << to_string(instance.weight(static_cast<AgentId>(i)))
      << ", value/weight " << to_string(ratio) << " (" << format_double(to_double(ratio)) << ")\n";
  }
  s << "violations: [";
  const auto v = wwef1_violations(instance, allocation);
  for (std::size_t k = 0; k < v.size(); ++k) {
    s << (k ? ", " : "") << "(" << v[k].first + 1 << "," << v[k].second + 1 << ")";
  }
  s << "]\n";
  return s.str();
}

ordered_json check_json(const Instance& instance, const Allocation& allocation) {
  ordered_json out;
  out["welfare"] = welfare_json(instance, allocation);
  ordered_json agents = ordered_json::array();
  const auto u = utilities(instance, allocation);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Rational ratio = u[i] / instance.weight(static_cast<AgentId>(i));
    agents.push_back({{"agent", i + 1}, {"value", rational_to_json(u[i])}, {"value_per_weight", rational_to_json(ratio)}});
  }
  out["agents"] = agents;
  ordered_json violations = ordered_json::array();
  for (auto [i, h] : wwef1_violations(instance, allocation)) violations.push_back({i + 1, h + 1});
  out["violations"] = violations;
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string bench_csv(const std::string& suite_path) {
  const nlohmann::json suite = [&] {
    try {
      return nlohmann::json::parse(read_file(suite_path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("", std::string("malformed suite: ") + e.what());
    }
  }();
  if (!suite.is_object() || !suite.contains("entries") || !suite["entries"].is_array()) {
    throw ParseError("entries", "suite must be an object with an \"entries\" array");
  }
  const std::filesystem::path base = std::filesystem::path(suite_path).parent_path();
  const std::uint64_t oracle_cap = suite.value("oracle_cap", std::uint64_t{1'000'000});

  std::ostringstream csv;
  csv << "instance,method,params,welfare_log,oracle_log,ratio,ms,transfers\n";
  for (std::size_t e = 0; e < suite["entries"].size(); ++e) {
    const auto& entry = suite["entries"][e];
    const std::string name = entry.value("instance", std::string());
    std::filesystem::path path(name);
    if (path.is_relative()) path = base / path;
    std::vector<std::string> methods = entry.value("methods", std::vector<std::string>{"auto"});
    SolveOptions base_opts;
    std::string params_text;
    if (entry.contains("params")) {
      const auto& p = entry["params"];
      if (p.contains("epsilon")) base_opts.epsilon = p["epsilon"].get<double>();
      if (p.contains("lambda")) base_opts.lambda = p["lambda"].get<int>();
      if (p.contains("p")) base_opts.p = p["p"].is_string() ? parse_p(p["p"].get<std::string>()) : p["p"].get<double>();
      if (p.contains("budget")) base_opts.budget = p["budget"].get<std::uint64_t>();
      for (auto it = p.begin(); it != p.end(); ++it) {
        params_text += (params_text.empty() ? "" : ";") + it.key() + "=" +
                       (it->is_string() ? it->get<std::string>() : it->dump());
      }
    }
    base_opts.repair = entry.value("repair", false);

    for (const auto& method : methods) {
      SolveOptions opts = base_opts;
      opts.method = method;
      csv << csv_field(name) << "," << csv_field(method) << "," << csv_field(params_text) << ",";
      try {
        const Instance instance = load_instance(path.string());
        const auto start = std::chrono::steady_clock::now();
        const ordered_json report = solve_report(instance, opts);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        const Allocation alloc = allocation_from_json(report["allocation"]);
        const bool pmean = report.contains("objective");
        const double p = pmean ? (report["objective"]["p"].is_string() ? kNegativeInfinity
                                                                       : report["objective"]["p"].get<double>())
                               : 0.0;
        const WelfareValue got = pmean ? p_mean_welfare(instance, alloc, p) : nash_welfare(instance, alloc);
        std::string oracle_log, ratio;
        if (oracle::allocation_count(instance.num_agents(), instance.num_goods()) <= oracle_cap) {
          const auto best = oracle::brute_force_optimum(
              instance, pmean ? oracle::Objective::p_mean(p) : oracle::Objective::nash(), oracle_cap);
          const WelfareValue& opt = best.best_welfare;
          oracle_log = opt.is_zero ? "-inf" : format_double(opt.log_value);
          if (opt.is_zero) {
            ratio = "1";
          } else {
            ratio = got.is_zero ? "0" : format_double(std::exp(got.log_value - opt.log_value));
          }
        }
        csv << (got.is_zero ? "-inf" : format_double(got.log_value)) << "," << oracle_log << "," << ratio << ","
            << format_double(ms) << "," << (report.contains("repair") ? report["repair"]["transfers"].dump() : "")
            << "\n";
      } catch (const std::exception& ex) {
        csv << csv_field(std::string("failed: ") + ex.what()) << ",,,,\n";
      }
    }
  }
  return csv.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nash welfare solvers for indivisible goods with entitlements", "nashw"};
  app.require_subcommand(1);

  std::string instance_path, allocation_path, out_path, p_string;
  SolveOptions solve;
  double epsilon = 0.0;
  int lambda = 0;
  std::uint64_t budget = 0;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance");
  solve_cmd->add_option("instance", instance_path, "instance JSON")->required();
  solve_cmd->add_option("--method", solve.method, "auto|ptas|pmean|kary|two-valuable|fptas|oracle")
      ->check(CLI::IsMember({"auto", "ptas", "pmean", "kary", "two-valuable", "fptas", "oracle"}));
  auto* eps_opt = solve_cmd->add_option("--epsilon", epsilon, "approximation parameter in (0,1)");
  auto* lambda_opt = solve_cmd->add_option("--lambda", lambda, "PTAS rounding precision (even, >= 2)");
  auto* p_opt = solve_cmd->add_option("--p", p_string, "p-mean exponent; use --p=-inf for the minimum");
  solve_cmd->add_flag("--repair", solve.repair, "run the wwEF1 repair on the result");
  auto* budget_opt = solve_cmd->add_option("--budget", budget, "state/enumeration cap of the chosen method");
  solve_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  bool check_as_json = false;
  auto* check_cmd = app.add_subcommand("check", "evaluate an allocation");
  check_cmd->add_option("instance", instance_path, "instance JSON")->required();
  check_cmd->add_option("allocation", allocation_path, "allocation JSON or solve report")->required();
  check_cmd->add_flag("--json", check_as_json, "print JSON");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("kind", gen.kind, "identical|kary|two-valuable|additive")->required();
  gen_cmd->add_option("--n", gen.n, "agents")->required();
  gen_cmd->add_option("--m", gen.m, "goods")->required();
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--value-max", gen.value_max, "largest value");
  gen_cmd->add_option("--k", gen.k, "distinct values for kary");
  gen_cmd->add_option("--out", out_path, "write here instead of stdout");

  std::string suite_path;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and print CSV");
  bench_cmd->add_option("suite", suite_path, "suite JSON")->required();
  bench_cmd->add_option("--out", out_path, "write CSV here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve_cmd) {
      if (*eps_opt) solve.epsilon = epsilon;
      if (*lambda_opt) solve.lambda = lambda;
      if (*p_opt) solve.p = parse_p(p_string);
      if (*budget_opt) solve.budget = budget;
      const Instance instance = load_instance(instance_path);
      emit(solve_report(instance, solve).dump(2) + "\n", out_path, out);
    } else if (*check_cmd) {
      const Instance instance = load_instance(instance_path);
      const Allocation allocation = load_allocation(allocation_path);
      validate_allocation(instance, allocation, true);
      out << (check_as_json ? check_json(instance, allocation).dump(2) + "\n" : check_text(instance, allocation));
    } else if (*gen_cmd) {
      emit(serialize_instance(generate_instance(gen)) + "\n", out_path, out);
    } else if (*bench_cmd) {
      emit(bench_csv(suite_path), out_path, out);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidAllocation& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kIncompatible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace nashw::cli
