#pragma once

#include <map>
#include <string>
#include <vector>

#include "cemkit/results_io.h"

namespace cemkit {

// Comparing runs of different scenarios is refused (CLI exit code 2).
class ComparisonMismatch : public Error {
 public:
  explicit ComparisonMismatch(const std::string& msg) : Error(msg) {}
};

struct PairDelta {
  int run_a = 0;
  int run_b = 0;
  double npv_abs = 0.0;
  double npv_rel = 0.0;  // |npv_b - npv_a| / max(1, |npv_a|)
  std::vector<double> period_cost_abs;
  // Largest absolute per-tech divergence across periods (informational; plans
  // are never asserted equal).
  std::map<std::string, double> capacity_delta_by_tech;
  std::map<std::string, double> generation_delta_by_tech;
  std::vector<double> emissions_abs;
  std::vector<double> transmission_abs;
};

struct ComparisonReport {
  std::vector<std::string> run_names;
  std::vector<RunResults> runs;
  std::vector<std::map<std::string, double>> capacity_by_tech;    // per run; final period
  std::vector<std::map<std::string, double>> generation_by_tech;  // per run; final period
  std::vector<PairDelta> pairs;
};

struct HarmonizationOutcome {
  bool pass = false;
  double max_npv_rel = 0.0;
  std::string worst_pair;
  // Diagnostic leads on failure.
  std::string largest_cost_component;
  double largest_cost_component_delta = 0.0;
  std::vector<std::string> largest_capacity_entries;
};

// Loads runs and builds the full delta tables. All runs must share the
// scenario hash; configurations may differ.
ComparisonReport diff_runs(const std::vector<std::string>& run_dirs);

// Passes when every pairwise NPV delta is within tolerance.
HarmonizationOutcome harmonization_check(const ComparisonReport& report,
                                         double tolerance);

// Writes report.md and plot-ready long-format CSVs under plots/.
// Deterministic: identical reports produce byte-identical files.
void emit_report(const ComparisonReport& report, const HarmonizationOutcome& outcome,
                 const std::string& out_dir);

}  // namespace cemkit
