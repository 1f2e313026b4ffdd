#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cemkit/sequencer.h"

namespace cemkit {

// One run directory: trajectory.csv, plan_state.csv, dispatch_summary.csv,
// costs.json, emissions.csv, manifest.json. Plan and simulation runs share
// the schema; simulation runs carry operational costs in costs.json.
struct RunManifest {
  std::string kind;  // "plan" or "simulate"
  std::string scenario_name;
  std::string config_name;
  std::string backend;
  int workers = 1;
  std::string system_hash;
  std::string scenario_hash;
  std::string config_hash;
  std::string plan_hash;  // simulate runs: hash of the source plan
  std::string tool_version;
};

struct RunResults {
  RunManifest manifest;
  std::vector<std::string> period_labels;
  std::vector<int> rep_years;
  std::vector<CostBreakdown> annual_costs;
  double npv = 0.0;
  double planning_objective = 0.0;
  // period -> id -> value
  std::vector<std::map<std::string, double>> capacity_mw;
  std::vector<std::map<std::string, double>> generation_mwh;
  std::vector<std::map<std::string, double>> emissions_by_zone_t;
  std::vector<double> emissions_t;
  std::vector<double> unserved_mwh;
  std::vector<double> transmission_total_mw;
  // id -> tech name, for by-tech aggregation in comparisons
  std::map<std::string, std::string> tech_of_id;
};

std::string sha256_file(const std::string& path);
std::string sha256_string(const std::string& text);
// Content hash of every regular file under a directory (sorted relative
// paths), so identical inputs yield identical manifests.
std::string sha256_directory(const std::string& directory);

void write_plan_results(const std::string& dir, const SystemData& system,
                        const PlanTrajectory& plan, const RunManifest& manifest);
void write_simulation_results(const std::string& dir, const SystemData& system,
                              const PlanTrajectory& plan,
                              const std::vector<OperationalResult>& results,
                              const RunManifest& manifest);

RunResults read_run_results(const std::string& dir);
// Rebuilds the trajectory's capacity state from plan_state.csv so a plan can
// be re-simulated from disk.
PlanTrajectory read_plan_state(const std::string& dir, const SystemData& system);

}  // namespace cemkit
