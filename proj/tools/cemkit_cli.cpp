// Command-line front end. Links only the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cemkit.h"

namespace {

int fail(const char* what) {
  std::fprintf(stderr, "cemkit %s: %s\n", what, cemkit_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cemkit - electricity capacity-expansion modeling kit"};
  app.set_version_flag("--version", cemkit_version());
  app.require_subcommand(1);

  std::string system_dir, scenario, config, plan_dir, out_dir, backend;
  int workers = 1;
  double tolerance = 0.005;
  std::vector<std::string> run_dirs;

  auto* validate = app.add_subcommand("validate", "check a system input directory");
  validate->add_option("--system", system_dir, "system directory")->required();

  auto* plan = app.add_subcommand("plan", "run a capacity-expansion plan");
  plan->add_option("--system", system_dir, "system directory")->required();
  plan->add_option("--scenario", scenario, "scenario JSON file")->required();
  plan->add_option("--config", config, "configuration JSON file")->required();
  plan->add_option("--backend", backend, "solver backend (ipm | simplex)");
  plan->add_option("--workers", workers, "worker threads");
  plan->add_option("--out", out_dir, "output results directory")->required();

  auto* simulate = app.add_subcommand("simulate", "52-week operational simulation of a plan");
  simulate->add_option("--system", system_dir, "system directory")->required();
  simulate->add_option("--scenario", scenario, "scenario JSON file")->required();
  simulate->add_option("--plan", plan_dir, "plan results directory")->required();
  simulate->add_option("--backend", backend, "solver backend (ipm | simplex)");
  simulate->add_option("--workers", workers, "worker threads");
  simulate->add_option("--out", out_dir, "output results directory")->required();

  auto* compare = app.add_subcommand("compare", "cross-run comparison and harmonization check");
  compare->add_option("runs", run_dirs, "run directories (two or more)")->required();
  compare->add_option("--tolerance", tolerance, "harmonization tolerance (relative)");
  compare->add_option("--out", out_dir, "report output directory")->required();

  auto* demo = app.add_subcommand("demo", "write the bundled demonstration kit");
  demo->add_option("--out", out_dir, "destination directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    char report[8192];
    const cemkit_status st = cemkit_validate(system_dir.c_str(), report, sizeof(report));
    if (st == CEMKIT_OK) {
      std::printf("%s: ok\n", system_dir.c_str());
      return 0;
    }
    std::fprintf(stderr, "%s", report);
    return 1;
  }
  if (plan->parsed()) {
    if (cemkit_plan(system_dir.c_str(), scenario.c_str(), config.c_str(),
                    backend.c_str(), workers, out_dir.c_str()) != CEMKIT_OK)
      return fail("plan");
    std::printf("plan written to %s\n", out_dir.c_str());
    return 0;
  }
  if (simulate->parsed()) {
    if (cemkit_simulate(system_dir.c_str(), scenario.c_str(), plan_dir.c_str(),
                        backend.c_str(), workers, out_dir.c_str()) != CEMKIT_OK)
      return fail("simulate");
    std::printf("simulation written to %s\n", out_dir.c_str());
    return 0;
  }
  if (compare->parsed()) {
    std::vector<const char*> dirs;
    for (const auto& d : run_dirs) dirs.push_back(d.c_str());
    int pass = 0;
    const cemkit_status st =
        cemkit_compare(dirs.data(), dirs.size(), tolerance, out_dir.c_str(), &pass);
    if (st == CEMKIT_MISMATCH) {
      std::fprintf(stderr, "cemkit compare: %s\n", cemkit_last_error());
      return 2;
    }
    if (st != CEMKIT_OK) return fail("compare");
    std::printf("harmonization %s (report in %s)\n", pass ? "PASS" : "FAIL",
                out_dir.c_str());
    return pass ? 0 : 1;
  }
  if (demo->parsed()) {
    if (cemkit_write_demo_kit(out_dir.c_str()) != CEMKIT_OK) return fail("demo");
    std::printf("demo kit written to %s\n", out_dir.c_str());
    return 0;
  }
  return 1;
}
