#include "cemkit/sequencer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "cemkit/common.h"
#include "cemkit/finance.h"

namespace cemkit {

namespace {

TimeGrid grid_for(const SystemData& system, const Configuration& config) {
  const int n = config.weeks.full_52 ? kWeeksPerYear : config.weeks.sampled_n;
  return TimeGrid::from_sample(sample_weeks(system, n));
}

double solve_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Greedy irreducible-subset search over the implicated rows: a row stays in
// the diagnosis only if deleting it makes the problem feasible.
std::vector<std::string> diagnose_infeasibility(const Problem& problem,
                                                const SolveSettings& settings,
                                                const std::vector<int>& seed_rows) {
  std::vector<int> candidates = seed_rows;
  if (candidates.empty()) {
    for (int i = 0; i < problem.num_rows(); ++i) {
      const RowKind k = problem.row_tag(i).kind;
      if (k == RowKind::kMinCapTarget || k == RowKind::kCes || k == RowKind::kCo2Cap)
        candidates.push_back(i);
    }
  }
  std::vector<std::string> tags;
  if (problem.num_nonzeros() > settings.reference_nonzero_cap ||
      candidates.size() > 40) {
    for (int r : candidates) tags.push_back(problem.row_name(r));
    return tags;
  }
  std::set<int> removed;
  for (int r : candidates) {
    // Rebuild without `r` and the already-removed rows.
    Problem sub;
    for (int j = 0; j < problem.num_vars(); ++j) {
      const auto& v = problem.var(j);
      sub.add_variable(v.lower, v.upper, v.objective, v.tag);
    }
    for (int i = 0; i < problem.num_rows(); ++i) {
      if (i == r || removed.count(i)) continue;
      sub.begin_row(problem.row_sense(i), problem.row_rhs(i), problem.row_tag(i));
      for (int k = 0; k < problem.row_nnz(i); ++k)
        sub.add_coef(problem.row_cols(i)[k], problem.row_coefs(i)[k]);
      sub.end_row();
    }
    SolveSettings s = settings;
    s.method = SolveMethod::kSimplex;
    Solution sol = solve(sub, s);
    if (sol.status == SolveStatus::kInfeasible) {
      removed.insert(r);  // not needed for the conflict
    } else {
      tags.push_back(problem.row_name(r));  // critical row
    }
  }
  if (tags.empty())
    for (int r : candidates) tags.push_back(problem.row_name(r));
  return tags;
}

[[noreturn]] void throw_infeasible(const std::string& label, const Problem& problem,
                                   const SolveSettings& settings,
                                   const std::vector<int>& seed_rows) {
  std::ostringstream os;
  os << label << ": infeasible; implicated rows:";
  for (const auto& tag : diagnose_infeasibility(problem, settings, seed_rows))
    os << " " << tag;
  throw SolveError(os.str());
}

}  // namespace

double new_build_annuity_per_mw_yr(const SystemData& system, int cluster_index,
                                   int build_year) {
  const auto& c = system.clusters[cluster_index];
  double itc = 0.0;
  for (const auto& tc : system.policies.tax_credits) {
    if (tc.kind != TaxCreditKind::kItc || tc.techs.count(c.tech.name) == 0) continue;
    if (tc.in_window(build_year)) itc = tc.value;
  }
  const double rate = c.wacc_override ? *c.wacc_override : system.financial.wacc_default;
  return 1000.0 * (annuitize_capex(c.capex_overnight_per_kw, itc, rate,
                                   c.lifetime_years) +
                   annuitize_capex(c.interconnect_capex_per_kw, 0.0, rate,
                                   c.lifetime_years));
}

namespace {

std::pair<double, double> storage_annuities_per_unit(const SystemData& system,
                                                     int storage_index, int build_year) {
  const auto& st = system.storage[storage_index];
  double itc = 0.0;
  for (const auto& tc : system.policies.tax_credits) {
    if (tc.kind != TaxCreditKind::kItc) continue;
    if (tc.techs.count("battery") == 0 && tc.techs.count(st.id) == 0) continue;
    if (tc.in_window(build_year)) itc = tc.value;
  }
  const double rate = system.financial.wacc_default;
  return {1000.0 * annuitize_capex(st.power_capex_per_kw, itc, rate, st.lifetime_years),
          1000.0 * annuitize_capex(st.energy_capex_per_kwh, itc, rate, st.lifetime_years)};
}

}  // namespace

CarriedState carry_forward_state(const SystemData& system, const CarriedState& prev,
                                 const BuiltProblem& built, const Solution& solution,
                                 const Configuration& config, int period_index) {
  CarriedState next = prev;
  const int rep = system.horizon.periods[period_index].representative_year;
  const bool econ = config.retirement_mode == RetirementMode::kEconomic;
  const bool foresight = config.sequencing == SequencingMode::kForesight;

  for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
    auto& vintages = next.clusters[ci];
    const auto& cluster = system.clusters[ci];

    auto vintage_cls = [&](int build_year) {
      double credit = 0.0;
      for (const auto& tc : system.policies.tax_credits) {
        if (tc.kind != TaxCreditKind::kPtc || tc.techs.count(cluster.tech.name) == 0)
          continue;
        if (tc.in_window(build_year)) {
          credit = levelize_ptc(tc.value * (1.0 + cluster.ptc_bonus_fraction),
                                system.financial.ptc_credit_years, cluster.lifetime_years,
                                system.financial.wacc_default,
                                system.financial.ptc_transfer_penalty);
        }
      }
      int cls = 0;
      for (const auto& [key, cr] : built.index.class_credit) {
        if (key.first == static_cast<int>(ci) && std::abs(cr - credit) < 1e-12)
          cls = key.second;
      }
      return cls;
    };

    double new_mw = 0.0;
    auto nit = built.index.new_cap.find({static_cast<int>(ci), period_index});
    if (nit != built.index.new_cap.end()) new_mw = std::max(0.0, solution.x[nit->second]);
    double new_retained = new_mw;

    if (econ) {
      // Lock retained upper bounds: split each class's optimal retention
      // proportionally across its member vintages. A vintage's class is
      // recovered through its levelized credit value.
      std::map<int, double> class_retained;
      for (const auto& [key, var] : built.index.retained) {
        const auto& [cl, cls, pi] = key;
        if (cl != static_cast<int>(ci) || pi != period_index) continue;
        class_retained[cls] = std::max(0.0, solution.x[var]);
      }
      if (foresight && new_mw > 0.0) {
        // In the joint problem the retained variable already includes this
        // period's build; peel the new vintage's share off first.
        const int cls = vintage_cls(rep);
        auto it = class_retained.find(cls);
        if (it != class_retained.end()) {
          new_retained = std::min(new_mw, it->second);
          it->second -= new_retained;
        }
      }
      std::map<int, std::vector<VintageState*>> members;
      for (auto& v : vintages) members[vintage_cls(v.build_year)].push_back(&v);
      for (auto& [cls, vs] : members) {
        auto it = class_retained.find(cls);
        if (it == class_retained.end()) continue;
        double prev_total = 0.0;
        for (auto* v : vs) prev_total += v->retained_mw;
        const double kept = std::min(it->second, prev_total);
        for (auto* v : vs)
          v->retained_mw = prev_total > 0.0 ? v->retained_mw * kept / prev_total : 0.0;
      }
    }
    if (new_mw > 1e-9) {
      vintages.push_back({rep, new_mw, new_retained,
                          new_build_annuity_per_mw_yr(system, static_cast<int>(ci), rep)});
    }
  }

  for (size_t si = 0; si < system.storage.size(); ++si) {
    auto pit = built.index.storage_power_new.find({static_cast<int>(si), period_index});
    if (pit == built.index.storage_power_new.end()) continue;
    const double pmw = solution.x[pit->second];
    double emwh = 0.0;
    auto eit = built.index.storage_energy_new.find({static_cast<int>(si), period_index});
    if (eit != built.index.storage_energy_new.end()) {
      emwh = solution.x[eit->second];
    } else if (system.storage[si].duration_fixed_hours) {
      emwh = pmw * *system.storage[si].duration_fixed_hours;
    }
    if (pmw > 1e-9 || emwh > 1e-9) {
      const auto [pann, eann] = storage_annuities_per_unit(system, static_cast<int>(si), rep);
      next.storage[si].push_back({rep, pmw, emwh, pann, eann});
    }
  }

  for (size_t li = 0; li < system.corridors.size(); ++li) {
    auto it = built.index.tx_expand.find({static_cast<int>(li), period_index});
    if (it != built.index.tx_expand.end())
      next.corridor_extra_mw[li] += std::max(0.0, solution.x[it->second]);
  }
  return next;
}

AccountingResult account_period(const SystemData& system, const BuiltProblem& built,
                                const Solution& solution, int period_index,
                                const CarriedState& as_dispatched) {
  AccountingResult out;
  const auto& period = system.horizon.periods[period_index];
  const int rep = period.representative_year;
  const Problem& p = built.problem;

  // Slot weights by hour for this grid.
  std::map<int, double> weight_of_hour;
  for (const auto& s : built.grid.slots) weight_of_hour[s.hour] = s.weight;

  // Credit and cost rates per cluster.
  std::vector<double> unit_fuel(system.clusters.size(), 0.0);
  std::vector<double> unit_vom(system.clusters.size(), 0.0);
  std::vector<double> unit_seq(system.clusters.size(), 0.0);
  std::vector<double> intensity(system.clusters.size(), 0.0);
  for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
    const auto& c = system.clusters[ci];
    unit_vom[ci] = c.variable_om_per_mwh;
    if (!c.tech.fuel.empty() && c.tech.heat_rate > 0.0)
      unit_fuel[ci] = c.tech.heat_rate * system.fuel_price(c.tech.fuel, rep);
    intensity[ci] = system.emission_intensity(c);
    for (const auto& tc : system.policies.tax_credits) {
      if (tc.kind != TaxCreditKind::kSequestration ||
          tc.techs.count(c.tech.name) == 0 || !tc.in_window(rep))
        continue;
      if (c.tech.capture_rate > 0.0 && !c.tech.fuel.empty()) {
        unit_seq[ci] = tc.value * c.tech.heat_rate *
                       system.find_fuel(c.tech.fuel)->emission_factor *
                       c.tech.capture_rate;
      }
    }
  }

  auto& cost = out.annual_cost;
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& tag = p.var(j).tag;
    if (tag.period != period_index) continue;
    const double x = solution.x[j];
    if (x <= 0.0) continue;
    switch (tag.kind) {
      case VarKind::kGen: {
        const double w = weight_of_hour.at(tag.hour);
        const double mwh = w * x;
        const auto& cluster = system.clusters[tag.entity];
        out.dispatch.generation_mwh[cluster.id] += mwh;
        cost.fuel += mwh * unit_fuel[tag.entity];
        cost.variable_om += mwh * unit_vom[tag.entity];
        cost.credits -= mwh * unit_seq[tag.entity];
        const double credit = built.index.class_credit.at({tag.entity, tag.aux});
        cost.credits -= mwh * credit;
        const double em = mwh * intensity[tag.entity];
        out.emissions_t += em;
        out.emissions_by_zone_t[cluster.zone] += em;
        break;
      }
      case VarKind::kUnserved: {
        const double w = weight_of_hour.at(tag.hour);
        out.dispatch.unserved_mwh[system.zones[tag.zone].id] += w * x;
        cost.unserved += w * x * system.financial.unserved_penalty;
        break;
      }
      case VarKind::kCharge: {
        const double w = weight_of_hour.at(tag.hour);
        out.dispatch.charge_mwh[system.storage[tag.entity].id] += w * x;
        break;
      }
      case VarKind::kDischarge: {
        const double w = weight_of_hour.at(tag.hour);
        out.dispatch.discharge_mwh[system.storage[tag.entity].id] += w * x;
        break;
      }
      case VarKind::kFlow: {
        const double w = weight_of_hour.at(tag.hour);
        out.dispatch.flow_mwh[system.corridors[tag.entity].id] += w * x;
        break;
      }
      case VarKind::kStartup: {
        const double w = weight_of_hour.at(tag.hour);
        cost.startup += w * x * system.clusters[tag.entity].tech.uc.startup_cost_per_mw;
        break;
      }
      case VarKind::kCo2Excess: {
        out.excess_emissions_t += x;
        const CarbonCap* cap = tag.entity < 0
                                   ? &*system.policies.carbon_cap
                                   : &system.policies.regional_caps[tag.entity];
        cost.buyout += x * cap->buyout_price;
        break;
      }
      default:
        break;
    }
  }

  // Capacity charges from the as-dispatched state.
  for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
    const auto& c = system.clusters[ci];
    for (const auto& v : as_dispatched.clusters[ci]) {
      if (rep >= v.build_year && rep < v.build_year + c.lifetime_years)
        cost.capital_annuity += v.annuity_per_mw_yr * v.capacity_mw;
      cost.fixed_om += c.fixed_om_per_kw_yr * 1000.0 * v.retained_mw;
    }
  }
  for (size_t si = 0; si < system.storage.size(); ++si) {
    const auto& st = system.storage[si];
    for (const auto& v : as_dispatched.storage[si]) {
      if (rep >= v.build_year && rep < v.build_year + st.lifetime_years)
        cost.capital_annuity += v.power_annuity_per_mw_yr * v.power_mw +
                                v.energy_annuity_per_mwh_yr * v.energy_mwh;
    }
  }
  for (size_t li = 0; li < system.corridors.size(); ++li) {
    const auto& cor = system.corridors[li];
    const double mult = cor.intra_regional_adder ? 2.0 : 1.0;
    cost.capital_annuity +=
        cor.reinforcement_cost_per_mw_yr * mult * as_dispatched.corridor_extra_mw[li];
  }
  return out;
}

namespace {

// Builds the as-dispatched snapshot for one period from the solved problem.
CarriedState snapshot_period(const SystemData& system, const CarriedState& start,
                             const BuiltProblem& built, const Solution& solution,
                             const Configuration& config, int period_index) {
  CarriedState snap =
      carry_forward_state(system, start, built, solution, config, period_index);
  const int rep = system.horizon.periods[period_index].representative_year;
  if (config.retirement_mode == RetirementMode::kAgeBased) {
    // Zero out dead vintages so the snapshot reports dispatchable capacity
    // (aging is monotone, so this never hides later availability).
    for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
      for (auto& v : snap.clusters[ci]) {
        if (v.build_year + system.clusters[ci].lifetime_years <= rep) v.retained_mw = 0.0;
      }
    }
    for (size_t si = 0; si < system.storage.size(); ++si) {
      for (auto& v : snap.storage[si]) {
        if (v.build_year + system.storage[si].lifetime_years <= rep) {
          v.power_mw = 0.0;
          v.energy_mwh = 0.0;
        }
      }
    }
  }
  return snap;
}

PeriodRecord make_record(const SystemData& system, const BuiltProblem& built,
                         const Solution& solution, const Configuration& config,
                         int period_index, const CarriedState& start,
                         const CarriedState& snap, double seconds) {
  const auto& period = system.horizon.periods[period_index];
  const int rep = period.representative_year;
  PeriodRecord rec;
  rec.label = period.label;
  rec.rep_year = rep;
  rec.capacities = snap;
  rec.solve_seconds = seconds;
  rec.objective_weight = built.index.period_weight.at(period_index);

  for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
    const auto& c = system.clusters[ci];
    double installed = 0.0;
    for (const auto& v : snap.clusters[ci]) {
      const bool alive = config.retirement_mode == RetirementMode::kEconomic ||
                         v.build_year + c.lifetime_years > rep;
      if (alive) installed += v.retained_mw;
    }
    rec.installed_mw[c.id] = installed;
    auto nit = built.index.new_cap.find({static_cast<int>(ci), period_index});
    rec.new_mw[c.id] = nit != built.index.new_cap.end() ? solution.x[nit->second] : 0.0;
    double start_live = 0.0;
    for (const auto& v : start.clusters[ci]) {
      const bool alive_now = config.retirement_mode == RetirementMode::kEconomic ||
                             v.build_year + c.lifetime_years > rep;
      if (alive_now) start_live += v.retained_mw;
    }
    rec.retired_mw[c.id] = std::max(0.0, start_live + rec.new_mw[c.id] - installed);
  }
  for (size_t si = 0; si < system.storage.size(); ++si) {
    const auto& st = system.storage[si];
    double pmw = 0.0, emwh = 0.0;
    for (const auto& v : snap.storage[si]) {
      const bool alive = config.retirement_mode == RetirementMode::kEconomic ||
                         v.build_year + st.lifetime_years > rep;
      if (alive) {
        pmw += v.power_mw;
        emwh += v.energy_mwh;
      }
    }
    rec.storage_power_mw[st.id] = pmw;
    rec.storage_energy_mwh[st.id] = emwh;
  }
  for (size_t li = 0; li < system.corridors.size(); ++li) {
    rec.corridor_mw[system.corridors[li].id] =
        system.corridors[li].existing_capacity_mw + snap.corridor_extra_mw[li];
  }

  AccountingResult acct = account_period(system, built, solution, period_index, snap);
  rec.dispatch = std::move(acct.dispatch);
  rec.annual_cost = acct.annual_cost;
  rec.emissions_by_zone_t = std::move(acct.emissions_by_zone_t);
  rec.emissions_t = acct.emissions_t;
  rec.excess_emissions_t = acct.excess_emissions_t;
  return rec;
}

}  // namespace

PlanTrajectory run_myopic(const SystemData& system, const Scenario& scenario,
                          const Configuration& config, const RunOptions& options) {
  if (config.sequencing != SequencingMode::kMyopic)
    throw ConfigError("run_myopic requires myopic sequencing");
  PlanTrajectory traj;
  traj.scenario_name = scenario.name;
  traj.config_name = config.name;
  const TimeGrid grid = grid_for(system, config);
  CarriedState state = CarriedState::initial(system);
  for (size_t pi = 0; pi < system.horizon.periods.size(); ++pi) {
    const auto t0 = std::chrono::steady_clock::now();
    BuiltProblem built =
        build_period_problem(system, scenario, config, static_cast<int>(pi), state, grid);
    Solution sol = solve(built.problem, options.solve);
    if (!sol.optimal())
      throw_infeasible("period " + system.horizon.periods[pi].label, built.problem,
                       options.solve, sol.infeasible_rows);
    CarriedState snap = snapshot_period(system, state, built, sol, config,
                                        static_cast<int>(pi));
    PeriodRecord rec = make_record(system, built, sol, config, static_cast<int>(pi),
                                   state, snap, solve_seconds(t0));
    traj.planning_objective += sol.objective;
    traj.periods.push_back(std::move(rec));
    state = snap;
  }
  return traj;
}

PlanTrajectory run_foresight(const SystemData& system, const Scenario& scenario,
                             const Configuration& config, const RunOptions& options) {
  if (config.sequencing != SequencingMode::kForesight)
    throw ConfigError("run_foresight requires foresight sequencing");
  if (config.weeks.full_52) throw ConfigError("foresight requires sampled weeks");
  PlanTrajectory traj;
  traj.scenario_name = scenario.name;
  traj.config_name = config.name;
  const TimeGrid grid = grid_for(system, config);
  const auto t0 = std::chrono::steady_clock::now();
  BuiltProblem built = build_foresight_problem(system, scenario, config, grid);
  Solution sol = solve(built.problem, options.solve);
  if (!sol.optimal())
    throw_infeasible("foresight", built.problem, options.solve, sol.infeasible_rows);
  const double seconds = solve_seconds(t0);
  traj.planning_objective = sol.objective;

  CarriedState state = CarriedState::initial(system);
  for (size_t pi = 0; pi < system.horizon.periods.size(); ++pi) {
    CarriedState snap = snapshot_period(system, state, built, sol, config,
                                        static_cast<int>(pi));
    traj.periods.push_back(make_record(system, built, sol, config, static_cast<int>(pi),
                                       state, snap, seconds / system.horizon.periods.size()));
    state = snap;
  }
  return traj;
}

OperationalResult run_operational_sim(const SystemData& system, const Scenario& scenario,
                                      const PlanTrajectory& plan, int period_index,
                                      const RunOptions& options) {
  if (period_index < 0 || period_index >= static_cast<int>(plan.periods.size()))
    throw InvalidParameter("plan does not cover period index " +
                           std::to_string(period_index));
  const TimeGrid grid = TimeGrid::from_sample(sample_weeks(system, kWeeksPerYear));
  BuiltProblem built = build_operational_problem(
      system, scenario, period_index, plan.periods[period_index].capacities, grid);
  Solution sol = solve(built.problem, options.solve);
  if (!sol.optimal())
    throw SolveError("operational simulation failed for period " +
                     plan.periods[period_index].label + ": " + sol.note);
  AccountingResult acct = account_period(system, built, sol, period_index,
                                         plan.periods[period_index].capacities);
  OperationalResult res;
  res.period_label = plan.periods[period_index].label;
  res.rep_year = system.horizon.periods[period_index].representative_year;
  res.annual_cost = acct.annual_cost;
  res.unserved_by_zone_mwh = acct.dispatch.unserved_mwh;
  res.unserved_mwh = acct.dispatch.total_unserved_mwh();
  res.emissions_t = acct.emissions_t;
  res.excess_emissions_t = acct.excess_emissions_t;
  res.emissions_by_zone_t = acct.emissions_by_zone_t;
  return res;
}

std::vector<OperationalResult> simulate_plan(const SystemData& system,
                                             const Scenario& scenario,
                                             const PlanTrajectory& plan,
                                             const RunOptions& options) {
  const int n = static_cast<int>(plan.periods.size());
  std::vector<OperationalResult> results(n);
  std::vector<std::string> errors(n);
  const int workers = std::max(1, std::min(options.workers, n));
  std::vector<std::thread> pool;
  std::atomic_int next{0};
  auto work = [&]() {
    while (true) {
      const int pi = next.fetch_add(1);
      if (pi >= n) return;
      try {
        results[pi] = run_operational_sim(system, scenario, plan, pi, options);
      } catch (const std::exception& e) {
        errors[pi] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw SolveError(e);
  return results;
}

double compute_npv_summary(const std::vector<double>& annual_cost_by_period,
                           const PlanningHorizon& horizon, double discount_rate) {
  if (annual_cost_by_period.size() != horizon.periods.size())
    throw InvalidParameter("cost series does not match horizon periods");
  double npv = 0.0;
  for (size_t pi = 0; pi < horizon.periods.size(); ++pi) {
    const auto& p = horizon.periods[pi];
    npv += annual_cost_by_period[pi] *
           period_discount_weight(p.start_year, p.end_year, discount_rate,
                                  horizon.base_year(), true);
  }
  return npv;
}

double DispatchSummary::total_unserved_mwh() const {
  double t = 0.0;
  for (const auto& [zone, mwh] : unserved_mwh) t += mwh;
  return t;
}

}  // namespace cemkit
