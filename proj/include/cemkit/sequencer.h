#pragma once

#include <map>
#include <string>
#include <vector>

#include "cemkit/formulation.h"
#include "cemkit/solver.h"
#include "cemkit/system.h"

namespace cemkit {

struct CostBreakdown {
  double capital_annuity = 0.0;
  double fixed_om = 0.0;
  double variable_om = 0.0;
  double fuel = 0.0;
  double startup = 0.0;
  double unserved = 0.0;
  double buyout = 0.0;
  double credits = 0.0;  // tax credits, entered as a negative contribution
  double total() const {
    return capital_annuity + fixed_om + variable_om + fuel + startup + unserved +
           buyout + credits;
  }
};

struct DispatchSummary {
  std::map<std::string, double> generation_mwh;   // by cluster
  std::map<std::string, double> unserved_mwh;     // by zone
  std::map<std::string, double> charge_mwh;       // by storage
  std::map<std::string, double> discharge_mwh;    // by storage
  std::map<std::string, double> flow_mwh;         // by corridor, both directions
  double total_unserved_mwh() const;
};

struct PeriodRecord {
  std::string label;
  int rep_year = 0;
  // Capacity state as dispatched: carried vintages plus this period's builds,
  // with retirements applied. Feeds the next period and the operational sim.
  CarriedState capacities;
  std::map<std::string, double> installed_mw;       // by cluster
  std::map<std::string, double> new_mw;             // by cluster
  std::map<std::string, double> retired_mw;         // by cluster
  std::map<std::string, double> storage_power_mw;   // by storage
  std::map<std::string, double> storage_energy_mwh;
  std::map<std::string, double> corridor_mw;        // by corridor
  DispatchSummary dispatch;
  std::map<std::string, double> emissions_by_zone_t;
  double emissions_t = 0.0;
  double excess_emissions_t = 0.0;
  CostBreakdown annual_cost;  // one representative year, $
  double objective_weight = 0.0;
  double solve_seconds = 0.0;
};

struct PlanTrajectory {
  std::string scenario_name;
  std::string config_name;
  std::vector<PeriodRecord> periods;
  double planning_objective = 0.0;  // sum of weighted period objectives / joint NPV
};

struct OperationalResult {
  std::string period_label;
  int rep_year = 0;
  CostBreakdown annual_cost;
  double unserved_mwh = 0.0;
  double emissions_t = 0.0;
  double excess_emissions_t = 0.0;
  std::map<std::string, double> unserved_by_zone_mwh;
  std::map<std::string, double> emissions_by_zone_t;
};

struct RunOptions {
  SolveSettings solve;
  int workers = 1;
};

// Solves each period in succession; later periods see only earlier decisions.
// Throws SolveError naming the period and implicated constraint tags when a
// period is infeasible.
PlanTrajectory run_myopic(const SystemData& system, const Scenario& scenario,
                          const Configuration& config, const RunOptions& options = {});

// One joint solve over all periods (sampled weeks required).
PlanTrajectory run_foresight(const SystemData& system, const Scenario& scenario,
                             const Configuration& config, const RunOptions& options = {});

// Capacity hand-off: new vintages appended at built levels, age-based removal
// or retained-capacity locking applied, transmission expansion accrued.
CarriedState carry_forward_state(const SystemData& system, const CarriedState& prev,
                                 const BuiltProblem& built, const Solution& solution,
                                 const Configuration& config, int period_index);

// Frozen-capacity dispatch over all 52 weeks with UC limits; shortfalls priced
// at the unserved penalty; plan annuities included as fixed charges.
OperationalResult run_operational_sim(const SystemData& system, const Scenario& scenario,
                                      const PlanTrajectory& plan, int period_index,
                                      const RunOptions& options = {});

// All periods of a plan, optionally in parallel.
std::vector<OperationalResult> simulate_plan(const SystemData& system,
                                             const Scenario& scenario,
                                             const PlanTrajectory& plan,
                                             const RunOptions& options = {});

// Discounts per-period annual costs over their calendar years at the given
// rate and sums.
double compute_npv_summary(const std::vector<double>& annual_cost_by_period,
                           const PlanningHorizon& horizon, double discount_rate);

// Annuity rates used when recording new builds into the carried state.
double new_build_annuity_per_mw_yr(const SystemData& system, int cluster_index,
                                   int build_year);

// Cost/emissions accounting recomputed from primal values and tags, never
// from the LP objective. Period selects the block in multi-period problems.
struct AccountingResult {
  DispatchSummary dispatch;
  CostBreakdown annual_cost;
  std::map<std::string, double> emissions_by_zone_t;
  double emissions_t = 0.0;
  double excess_emissions_t = 0.0;
};
AccountingResult account_period(const SystemData& system, const BuiltProblem& built,
                                const Solution& solution, int period_index,
                                const CarriedState& as_dispatched);

}  // namespace cemkit
