#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cemkit/finance.h"

namespace cemkit {

// All domain objects are immutable after construction and safe to share
// across run workers.

struct Zone {
  std::string id;
  std::vector<double> demand_mw;        // hourly series, system hour count
  std::set<std::string> region_tags;
};

struct UnitCommitmentParams {
  double unit_size_mw = 0.0;
  double min_load_fraction = 0.0;       // in [0,1]
  double ramp_fraction_per_hour = 1.0;  // in (0,1]
  int min_up_hours = 1;
  int min_down_hours = 1;
  double startup_cost_per_mw = 0.0;     // $/MW started
  bool present = false;                 // cluster carries UC data at all
};

struct TechClass {
  std::string name;
  std::string fuel;                     // empty = unfueled
  double heat_rate = 0.0;               // MMBTU/MWh
  double emission_rate = 0.0;           // tCO2/MMBTU, used when fuel is empty
  bool is_ccs = false;
  double capture_rate = 0.0;            // fraction in [0,1], >0 only if is_ccs
  bool is_firm = false;
  bool is_variable = false;
  bool is_storage = false;
  UnitCommitmentParams uc;
};

// One capacity increment and the calendar year it entered service.
struct Vintage {
  int build_year = 0;
  double capacity_mw = 0.0;
};

struct ResourceCluster {
  std::string id;
  std::string zone;
  TechClass tech;
  double existing_capacity_mw = 0.0;
  std::vector<Vintage> vintages;        // sums to existing_capacity_mw
  int lifetime_years = 30;
  bool new_build_allowed = false;
  double max_new_capacity_mw = -1.0;    // <0 = unbounded, per period
  double capex_overnight_per_kw = 0.0;
  double interconnect_capex_per_kw = 0.0;
  double fixed_om_per_kw_yr = 0.0;
  double variable_om_per_mwh = 0.0;
  std::string profile_key;              // variable resources reference profiles/<key>.csv
  std::vector<double> profile;          // hourly CF in [0,1]; empty for firm
  std::optional<double> wacc_override;
  double ptc_bonus_fraction = 0.0;      // energy-community bonus, default off
  std::vector<double> hydro_monthly_budget_mwh;  // 12 entries when hydro-limited
};

struct StorageCluster {
  std::string id;
  std::string zone;
  double power_capex_per_kw = 0.0;
  double energy_capex_per_kwh = 0.0;
  std::optional<double> duration_fixed_hours;  // set => energy = power x duration
  double round_trip_efficiency = 1.0;          // in (0,1]
  double existing_power_mw = 0.0;
  double existing_energy_mwh = 0.0;
  int build_year = 0;                   // of the existing stock
  int lifetime_years = 15;
  bool new_build_allowed = true;
  double max_new_power_mw = -1.0;       // <0 = unbounded, per period
};

struct TransmissionCorridor {
  std::string id;
  std::string zone_from;
  std::string zone_to;
  double existing_capacity_mw = 0.0;
  double loss_fraction = 0.0;           // in [0,0.2]
  double reinforcement_cost_per_mw_yr = 0.0;  // annuitized $/MW-yr
  bool intra_regional_adder = false;    // doubles expansion cost and losses
};

struct FuelSpec {
  std::string id;
  double emission_factor = 0.0;               // tCO2/MMBTU
  std::map<int, double> price_by_period;      // representative year -> $/MMBTU
};

struct PlanningPeriod {
  std::string label;
  int start_year = 0;
  int end_year = 0;
  int representative_year = 0;
  double demand_scale = 1.0;            // final-year demand relative to base series
};

struct PlanningHorizon {
  std::vector<PlanningPeriod> periods;
  double discount_rate = 0.02;
  int base_year() const { return periods.empty() ? 0 : periods.front().start_year; }
};

// Default 2024-2050 horizon: 2024-27, 2028-30, then 5-year steps (6 periods).
PlanningHorizon default_horizon();

// The Appendix C net-zero CO2 target schedule, Mt by representative year:
// 2027: 847, 2030: 186, 2035: 130, 2040: 86.7, 2045: 43.3, 2050: 0.
std::map<int, double> net_zero_co2_schedule_mt();

enum class TaxCreditKind { kItc, kPtc, kSequestration };

struct TaxCredit {
  std::set<std::string> techs;
  TaxCreditKind kind = TaxCreditKind::kPtc;
  double value = 0.0;         // ITC fraction, PTC $/MWh, or sequestration $/tCO2
  int window_start_year = 0;  // eligibility by build year (ITC/PTC) or period (sequestration)
  int window_end_year = 9999;
  bool in_window(int year) const {
    return year >= window_start_year && year <= window_end_year;
  }
};

struct CarbonCap {
  std::map<int, double> schedule_t;   // representative year -> tCO2/yr
  double buyout_price = 0.0;          // $/tCO2 above the cap
  std::set<std::string> regions;      // empty = national
};

struct CleanEnergyStandard {
  std::set<std::string> regions;
  std::map<int, double> fraction_by_period;  // representative year -> clean share
};

struct MinCapacityTarget {
  std::set<std::string> regions;
  std::set<std::string> techs;
  std::map<int, double> mw_by_period;
};

struct PolicySet {
  std::optional<CarbonCap> carbon_cap;          // national
  std::vector<CarbonCap> regional_caps;
  std::vector<CleanEnergyStandard> ces_rps;
  std::vector<MinCapacityTarget> min_capacity_targets;
  std::vector<TaxCredit> tax_credits;
};

struct FuelPriceOverride {
  std::string fuel;
  std::map<int, double> prices;   // replacement schedule (rep year -> $/MMBTU)
  double add = 0.0;               // additive adjustment applied to every period
  bool replace = false;           // true = use `prices`, false = use `add`
};

struct Scenario {
  std::string name;
  PolicySet policy_set;
  bool inherit_system_policies = false;   // keep policies.json instead of policy_set
  // Transmission expansion: unlimited (default), none, or a per-period fraction
  // with the 400 MW floor.
  bool tx_expansion_none = false;
  std::optional<double> tx_expansion_limit_fraction;
  bool ccs_allowed = true;
  std::vector<FuelPriceOverride> fuel_price_overrides;
};

enum class RetirementMode { kAgeBased, kEconomic };
enum class SequencingMode { kMyopic, kForesight };

struct WeeksMode {
  bool full_52 = true;
  int sampled_n = 0;   // used when full_52 is false
};

struct Configuration {
  std::string name;
  RetirementMode retirement_mode = RetirementMode::kAgeBased;
  bool unit_commitment = false;
  WeeksMode weeks;
  SequencingMode sequencing = SequencingMode::kMyopic;
  bool operational_sim = false;
};

struct SystemData {
  std::vector<Zone> zones;
  std::vector<ResourceCluster> clusters;
  std::vector<StorageCluster> storage;
  std::vector<TransmissionCorridor> corridors;
  std::vector<FuelSpec> fuels;
  PlanningHorizon horizon;
  PolicySet policies;
  FinancialParams financial;
  int hour_count = 0;

  const Zone* find_zone(const std::string& id) const;
  const FuelSpec* find_fuel(const std::string& id) const;
  const ResourceCluster* find_cluster(const std::string& id) const;
  // Zones carrying any of the given region tags (a zone id is also accepted
  // as a tag so policies can target single zones).
  std::vector<int> zones_in_regions(const std::set<std::string>& regions) const;
  double fuel_price(const std::string& fuel_id, int representative_year) const;
  // Emissions intensity in tCO2 per MWh of generation, net of capture.
  double emission_intensity(const ResourceCluster& cluster) const;
  // Cross-reference and invariant checks; throws SchemaError on violation.
  void validate() const;
};

// 8760-hour calendar helpers (non-leap year). Weeks are 1-based; week w covers
// hours [(w-1)*168, w*168); the trailing 24 hours of the year map to no week.
inline constexpr int kHoursPerYear = 8760;
inline constexpr int kHoursPerWeek = 168;
inline constexpr int kWeeksPerYear = 52;
int month_of_week(int week_1based);     // calendar month (1..12) of the week's middle day
int hours_in_month(int month_1based);

// Expansion headroom rule for a transmission corridor-period.
double tx_expansion_bound_mw(double limit_fraction, double start_of_period_capacity_mw);

}  // namespace cemkit
