#include "cemkit/runner.h"

#include "cemkit/common.h"
#include "cemkit/compare.h"
#include "cemkit/ingest.h"
#include "cemkit/sequencer.h"

namespace cemkit {

std::string tool_version() { return "cemkit 0.1.0"; }

std::string scenario_content_hash(const Scenario& scenario) {
  return sha256_string(scenario_to_json_text(scenario));
}

std::string configuration_content_hash(const Configuration& config) {
  return sha256_string(configuration_to_json_text(config));
}

void write_plan_run(const std::string& out_dir, const SystemData& system,
                    const Scenario& scenario, const Configuration& config,
                    const PlanTrajectory& plan, const std::string& backend,
                    int workers, const std::string& system_hash) {
  RunManifest m;
  m.kind = "plan";
  m.scenario_name = scenario.name;
  m.config_name = config.name;
  m.backend = backend.empty() ? "ipm" : backend;
  m.workers = workers;
  m.system_hash = system_hash;
  m.scenario_hash = scenario_content_hash(scenario);
  m.config_hash = configuration_content_hash(config);
  m.tool_version = tool_version();
  write_plan_results(out_dir, system, plan, m);
}

void write_simulation_run(const std::string& out_dir, const SystemData& system,
                          const Scenario& scenario, const PlanTrajectory& plan,
                          const std::vector<OperationalResult>& results,
                          const std::string& backend, int workers,
                          const std::string& system_hash) {
  RunManifest m;
  m.kind = "simulate";
  m.scenario_name = scenario.name;
  m.config_name = plan.config_name;
  m.backend = backend.empty() ? "ipm" : backend;
  m.workers = workers;
  m.system_hash = system_hash;
  m.scenario_hash = scenario_content_hash(scenario);
  m.plan_hash = sha256_string(plan.scenario_name + "/" + plan.config_name);
  m.tool_version = tool_version();
  write_simulation_results(out_dir, system, plan, results, m);
}

void run_plan_command(const std::string& system_dir, const std::string& scenario_path,
                      const std::string& config_path, const std::string& backend,
                      int workers, const std::string& out_dir) {
  const std::string system_hash = sha256_directory(system_dir);
  SystemData base = load_system(system_dir);
  Scenario scenario = load_scenario(scenario_path);
  Configuration config = load_configuration(config_path);
  SystemData system = apply_scenario_overrides(base, scenario);

  RunOptions options;
  options.solve.method = backend_by_name(backend);
  options.workers = workers;
  PlanTrajectory plan = config.sequencing == SequencingMode::kForesight
                            ? run_foresight(system, scenario, config, options)
                            : run_myopic(system, scenario, config, options);
  write_plan_run(out_dir, system, scenario, config, plan, backend, workers, system_hash);
}

void run_simulate_command(const std::string& system_dir,
                          const std::string& scenario_path, const std::string& plan_dir,
                          const std::string& backend, int workers,
                          const std::string& out_dir) {
  const std::string system_hash = sha256_directory(system_dir);
  SystemData base = load_system(system_dir);
  Scenario scenario = load_scenario(scenario_path);
  SystemData system = apply_scenario_overrides(base, scenario);
  PlanTrajectory plan = read_plan_state(plan_dir, system);

  RunOptions options;
  options.solve.method = backend_by_name(backend);
  options.workers = workers;
  std::vector<OperationalResult> results = simulate_plan(system, scenario, plan, options);

  RunManifest m;
  m.kind = "simulate";
  m.scenario_name = scenario.name;
  m.config_name = plan.config_name;
  m.backend = backend.empty() ? "ipm" : backend;
  m.workers = workers;
  m.system_hash = system_hash;
  m.scenario_hash = scenario_content_hash(scenario);
  m.plan_hash = sha256_directory(plan_dir);
  m.tool_version = tool_version();
  write_simulation_results(out_dir, system, plan, results, m);
}

bool run_compare_command(const std::vector<std::string>& run_dirs, double tolerance,
                         const std::string& out_dir) {
  ComparisonReport report = diff_runs(run_dirs);
  HarmonizationOutcome outcome = harmonization_check(report, tolerance);
  emit_report(report, outcome, out_dir);
  return outcome.pass;
}

}  // namespace cemkit
