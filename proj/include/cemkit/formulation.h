#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cemkit/ingest.h"
#include "cemkit/lp.h"
#include "cemkit/system.h"

namespace cemkit {

// One dispatch time slot. Slots belong to weeks; storage/commitment chains
// wrap cyclically inside each week (weeks are operationally independent).
struct TimeSlot {
  int hour = 0;      // absolute hour into the system series
  int week_id = 0;   // 1-based calendar week, 0 for synthetic test grids
  double weight = 1.0;  // week weight (annualization multiplier)
  int prev = 0;      // cyclic predecessor slot index within the week
};

struct TimeGrid {
  std::vector<TimeSlot> slots;
  static TimeGrid from_sample(const WeekSample& sample);
  // A single synthetic cyclic week over the given absolute hours, annualized
  // by `weight`; used by desk-scale tests.
  static TimeGrid synthetic_week(const std::vector<int>& hours, double weight);
  double total_weight_hours() const;
};

// Capacity increment carried between periods. Annuity rates are fixed at
// build time (ITC included), so sunk capital recovery stays constant in every
// later objective.
struct VintageState {
  int build_year = 0;
  double capacity_mw = 0.0;
  double retained_mw = 0.0;  // economic mode; == capacity_mw otherwise
  double annuity_per_mw_yr = 0.0;
};

struct StorageVintageState {
  int build_year = 0;
  double power_mw = 0.0;
  double energy_mwh = 0.0;
  double power_annuity_per_mw_yr = 0.0;
  double energy_annuity_per_mwh_yr = 0.0;
};

struct CarriedState {
  std::vector<std::vector<VintageState>> clusters;
  std::vector<std::vector<StorageVintageState>> storage;
  std::vector<double> corridor_extra_mw;

  static CarriedState initial(const SystemData& system);
};

// Variable-id bookkeeping the sequencer uses to read a solution back.
struct ProblemIndex {
  // (cluster, period) -> new-capacity variable
  std::map<std::pair<int, int>, int> new_cap;
  // (cluster, credit class, period) -> retained-capacity variable
  std::map<std::tuple<int, int, int>, int> retained;
  // (storage, period) -> new power variable
  std::map<std::pair<int, int>, int> storage_power_new;
  // (storage, period) -> new energy variable (absent when duration is fixed)
  std::map<std::pair<int, int>, int> storage_energy_new;
  // (corridor, period) -> expansion variable
  std::map<std::pair<int, int>, int> tx_expand;
  // (cap index, period) -> excess variable; -1 = national cap
  std::map<std::pair<int, int>, int> co2_excess;
  // (cap index, period) -> cap row
  std::map<std::pair<int, int>, int> co2_row;
  // per-period objective weight used during assembly
  std::map<int, double> period_weight;
  // credit classes: (cluster, class) -> levelized $/MWh credit
  std::map<std::pair<int, int>, double> class_credit;
};

struct BuiltProblem {
  Problem problem;
  ProblemIndex index;
  TimeGrid grid;
  std::vector<int> periods;  // horizon indices included
};

// Assembles the capacity-expansion LP for one period. `carried` is the state
// at the start of the period; investment meets the period's final-year
// (scaled) demand.
BuiltProblem build_period_problem(const SystemData& system, const Scenario& scenario,
                                  const Configuration& config, int period_index,
                                  const CarriedState& carried, const TimeGrid& grid);

// Joint problem over all horizon periods with capacity carry-forward,
// permanent retirement and vintage aging; NPV objective at the system
// discount rate.
BuiltProblem build_foresight_problem(const SystemData& system, const Scenario& scenario,
                                     const Configuration& config, const TimeGrid& grid);

// Dispatch-only problem: capacities frozen at the given state (alive vintages
// for the period's representative year), unit-commitment limits on, full
// weeks, shortfalls priced at the unserved penalty. Plan annuities and fixed
// O&M enter as an objective constant.
BuiltProblem build_operational_problem(const SystemData& system, const Scenario& scenario,
                                       int period_index, const CarriedState& capacities,
                                       const TimeGrid& grid);

}  // namespace cemkit
