#pragma once

#include "nashw/instance.hpp"

#include <string>
#include <vector>

namespace nashw::fairness {

struct Transfer {
  int round = 0;
  AgentId from = 0;
  AgentId to = 0;
  GoodId good = 0;
  // The last move of a cascade hands the receiver an "extra good".
  bool final_in_cascade = false;
};

struct RepairResult {
  Allocation allocation;
  std::vector<Transfer> log;
  int rounds = 0;
};

// Moves goods from wwEF1-envied to wwEF1-envious agents until the allocation
// is wwEF1. Identical additive profiles only; Nash welfare never decreases.
// Throws InternalError if more than `transfer_cap` transfers are needed
// (0 picks a generous multiple of n*m).
RepairResult wwef1_repair(const Instance& instance, const Allocation& allocation, std::size_t transfer_cap = 0);

// One JSON object per line: {"round":r,"from":i,"to":h,"good":j}.
std::string transfer_log_jsonl(const std::vector<Transfer>& log);

}  // namespace nashw::fairness
