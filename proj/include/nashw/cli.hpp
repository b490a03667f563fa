#pragma once

#include "nashw/instance.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nashw::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kInvalid = 2, kBudget = 3, kIncompatible = 4 };

struct SolveOptions {
  std::string method = "auto";  // auto|ptas|pmean|kary|two-valuable|fptas|oracle
  std::optional<double> epsilon;
  std::optional<int> lambda;
  std::optional<double> p;
  bool repair = false;
  std::optional<std::uint64_t> budget;
};

// Solves and returns the report: method, params, allocation, welfare, wwef1,
// guarantee, zero_optimum and, with repair, the repaired allocation and log.
// Library exceptions propagate.
nlohmann::ordered_json solve_report(const Instance& instance, const SolveOptions& options);

// Welfare block shared by solve and check: {"zero", "log", "linear"}.
nlohmann::ordered_json welfare_json(const Instance& instance, const Allocation& allocation);

struct GenOptions {
  std::string kind = "identical";  // identical|kary|two-valuable|additive
  int n = 2;
  int m = 4;
  std::uint64_t seed = 0;
  int value_max = 10;
  int k = 2;
};

Instance generate_instance(const GenOptions& options);

// "-inf", "-infinity" and plain numbers.
double parse_p(const std::string& text);

// Runs the command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nashw::cli
