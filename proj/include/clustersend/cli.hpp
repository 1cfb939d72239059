#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "clustersend/json_io.hpp"
#include "clustersend/protocols.hpp"
#include "clustersend/sim.hpp"

namespace clustersend::cli {

// "1,3..5" -> {1,3,4,5}. Throws ConfigError on junk.
std::vector<int> parse_int_list(const std::string& text);

// "s1=-1", "threshold=-2", or both comma-separated. Empty string = no-op.
PlanMutation parse_mutation(const std::string& text);

// Resolves the scenario's protocol (selection when "auto") into a plan,
// applying the mutation.
ProtocolPlan plan_from_scenario(const ScenarioConfig& cfg, const PlanMutation& mutation);

// Exit codes: 0 = properties held (or informational command succeeded),
// 1 = a property was violated, 2 = bad config (thrown as ConfigError and
// mapped by the caller).

int cmd_bounds(const ScenarioConfig& cfg, const std::string& out_path, std::ostream& out);

struct RunArgs {
  ScenarioConfig cfg;
  PlanMutation mutation;
  std::string out_path;  // transcript JSON destination; empty = skip
};
int cmd_run(const RunArgs& args, std::ostream& out);

struct VerifyArgs {
  ScenarioConfig cfg;
  PlanMutation mutation;
  std::uint64_t budget = 512;
  int extremal_seeds = 50;
  int max_enum = 6;      // refuse clusters above this size
  std::string out_path;  // counterexample JSON destination; empty = skip
};
int cmd_verify(const VerifyArgs& args, std::ostream& out);

struct SweepArgs {
  std::vector<SweepCell> cells;
  SweepOptions options;
  std::string format = "csv";  // or "jsonl"
  std::string out_path;        // empty = write table to `out`
};
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& diag);

// Cartesian grid with lowest-index fault placement; combinations that fail
// system validation are product artifacts and are filtered here.
std::vector<SweepCell> make_grid_cells(const std::vector<int>& n1s, const std::vector<int>& f1s,
                                       const std::vector<int>& n2s, const std::vector<int>& f2s,
                                       const std::vector<FailureModel>& models,
                                       const std::vector<SigningScheme>& signings,
                                       const std::string& protocol, bool compact);

}  // namespace clustersend::cli
