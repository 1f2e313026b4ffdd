#pragma once

#include <string>
#include <vector>

#include "cemkit/system.h"

namespace cemkit {

// One pre-clustering generator record from units.csv.
struct RawUnitRecord {
  std::string id;
  std::string zone;
  TechClass tech;
  double capacity_mw = 0.0;
  double heat_rate = 0.0;        // MMBTU/MWh
  double fixed_om_per_kw_yr = 0.0;
  double variable_om_per_mwh = 0.0;
  int build_year = 0;
  int lifetime_years = 30;
  std::string profile_key;
};

struct WeekSample {
  std::vector<int> selected_week_indices;  // 1-based, distinct, sorted
  std::vector<double> weights;             // positive, sums to 52
};

// Loads the canonical input directory (zones.csv, demand.csv, fuels.csv,
// units.csv, new_build_options.csv, storage.csv, corridors.csv,
// hydro_budgets.csv, profiles/, policies.json, horizon.json). Existing units
// are clustered per tech-zone group on the way in.
SystemData load_system(const std::string& directory, int clusters_per_tech_zone = 1);

// Writes a SystemData back out in the canonical schema; load_system on the
// result reproduces the input bit-identically.
void write_system(const SystemData& system, const std::string& directory);

// K-means on (heat_rate, fixed_om), standardized per tech-zone group.
// Deterministic: initial centroids are the k capacity-largest units, ties by
// ascending unit id. Cluster capacity is the exact member sum; heat rate and
// fixed O&M are capacity-weighted means.
std::vector<ResourceCluster> cluster_units(const std::vector<RawUnitRecord>& units,
                                           int clusters_per_tech_zone);

// K-medoids over week feature vectors (mean/peak system load plus mean zonal
// wind and solar capacity factors, standardized). Medoid weight = number of
// weeks assigned to it. Deterministic: medoids start evenly spaced in
// peak-load order.
WeekSample sample_weeks(const SystemData& system, int n_weeks);

// Returns a copy with the scenario applied: fuel-price schedules replaced or
// shifted, CCS new builds cleared when disallowed, and the scenario's policy
// set installed unless the scenario inherits the system policies.
SystemData apply_scenario_overrides(const SystemData& system, const Scenario& scenario);

Scenario load_scenario(const std::string& path);
Configuration load_configuration(const std::string& path);
void write_scenario(const Scenario& scenario, const std::string& path);
void write_configuration(const Configuration& config, const std::string& path);
// Canonical JSON texts (what the writers emit).
std::string scenario_to_json_text(const Scenario& scenario);
std::string configuration_to_json_text(const Configuration& config);

// Full-validation entry used by the CLI: loads and reports every schema
// finding (one per line); empty result means the directory is clean.
std::vector<std::string> validate_system_directory(const std::string& directory);

}  // namespace cemkit
