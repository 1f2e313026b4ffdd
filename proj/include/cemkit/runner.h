#pragma once

#include <string>
#include <vector>

#include "cemkit/results_io.h"

namespace cemkit {

std::string tool_version();

// Content hashes of the parsed canonical forms, so a scenario means the same
// thing whether it came from a file or was built in memory.
std::string scenario_content_hash(const Scenario& scenario);
std::string configuration_content_hash(const Configuration& config);

// Load system + scenario + configuration, run the configured sequencing mode,
// write a results directory. Hashes are recorded in the manifest before any
// solve starts.
void run_plan_command(const std::string& system_dir, const std::string& scenario_path,
                      const std::string& config_path, const std::string& backend,
                      int workers, const std::string& out_dir);

// Re-simulate a stored plan over all 52 weeks with UC limits.
void run_simulate_command(const std::string& system_dir,
                          const std::string& scenario_path, const std::string& plan_dir,
                          const std::string& backend, int workers,
                          const std::string& out_dir);

// Returns true when harmonization passes; throws ComparisonMismatch when the
// runs come from different scenarios.
bool run_compare_command(const std::vector<std::string>& run_dirs, double tolerance,
                         const std::string& out_dir);

// Library-level helpers for in-memory runs that still produce result dirs
// (used by the acceptance harness).
void write_plan_run(const std::string& out_dir, const SystemData& system_after_overrides,
                    const Scenario& scenario, const Configuration& config,
                    const PlanTrajectory& plan, const std::string& backend,
                    int workers, const std::string& system_hash);
void write_simulation_run(const std::string& out_dir,
                          const SystemData& system_after_overrides,
                          const Scenario& scenario, const PlanTrajectory& plan,
                          const std::vector<OperationalResult>& results,
                          const std::string& backend, int workers,
                          const std::string& system_hash);

}  // namespace cemkit
