#include "cemkit/formulation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "cemkit/common.h"
#include "cemkit/finance.h"

namespace cemkit {

TimeGrid TimeGrid::from_sample(const WeekSample& sample) {
  TimeGrid grid;
  for (size_t i = 0; i < sample.selected_week_indices.size(); ++i) {
    const int week = sample.selected_week_indices[i];
    const double weight = sample.weights[i];
    const int base = static_cast<int>(grid.slots.size());
    for (int h = 0; h < kHoursPerWeek; ++h) {
      TimeSlot s;
      s.hour = (week - 1) * kHoursPerWeek + h;
      s.week_id = week;
      s.weight = weight;
      s.prev = h == 0 ? base + kHoursPerWeek - 1 : base + h - 1;
      grid.slots.push_back(s);
    }
  }
  return grid;
}

TimeGrid TimeGrid::synthetic_week(const std::vector<int>& hours, double weight) {
  TimeGrid grid;
  const int n = static_cast<int>(hours.size());
  for (int i = 0; i < n; ++i) {
    TimeSlot s;
    s.hour = hours[i];
    s.week_id = 0;
    s.weight = weight;
    s.prev = i == 0 ? n - 1 : i - 1;
    grid.slots.push_back(s);
  }
  return grid;
}

double TimeGrid::total_weight_hours() const {
  double t = 0.0;
  for (const auto& s : slots) t += s.weight;
  return t;
}

CarriedState CarriedState::initial(const SystemData& system) {
  CarriedState st;
  st.clusters.resize(system.clusters.size());
  st.storage.resize(system.storage.size());
  st.corridor_extra_mw.assign(system.corridors.size(), 0.0);
  for (size_t c = 0; c < system.clusters.size(); ++c) {
    for (const auto& v : system.clusters[c].vintages) {
      // Pre-study stock carries no capital recovery: overnight cost unknown
      // and sunk long before the horizon.
      st.clusters[c].push_back({v.build_year, v.capacity_mw, v.capacity_mw, 0.0});
    }
  }
  for (size_t s = 0; s < system.storage.size(); ++s) {
    const auto& b = system.storage[s];
    if (b.existing_power_mw > 0.0 || b.existing_energy_mwh > 0.0)
      st.storage[s].push_back(
          {b.build_year, b.existing_power_mw, b.existing_energy_mwh, 0.0, 0.0});
  }
  return st;
}

namespace {

struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;
  bool has_vars() const { return !terms.empty(); }
};

// Removal boundary is inclusive: a vintage is gone once
// build_year + lifetime <= rep_year.
bool vintage_alive(int build_year, int lifetime, int rep_year) {
  return build_year + lifetime > rep_year;
}

// Capital recovery is charged for representative years in
// [build_year, build_year + life), whether or not capacity is retained.
bool annuity_active(int build_year, int life, int rep_year) {
  return rep_year >= build_year && rep_year < build_year + life;
}

struct CreditRules {
  double ptc_value = 0.0;
  int ptc_start = 0, ptc_end = -1;
  double itc_fraction = 0.0;
  int itc_start = 0, itc_end = -1;
  double seq_value = 0.0;
  int seq_start = 0, seq_end = -1;
};

CreditRules credit_rules_for(const PolicySet& policies,
                             const std::set<std::string>& names) {
  CreditRules r;
  for (const auto& tc : policies.tax_credits) {
    bool hit = false;
    for (const auto& n : names) hit |= tc.techs.count(n) > 0;
    if (!hit) continue;
    switch (tc.kind) {
      case TaxCreditKind::kPtc:
        r.ptc_value = tc.value;
        r.ptc_start = tc.window_start_year;
        r.ptc_end = tc.window_end_year;
        break;
      case TaxCreditKind::kItc:
        r.itc_fraction = tc.value;
        r.itc_start = tc.window_start_year;
        r.itc_end = tc.window_end_year;
        break;
      case TaxCreditKind::kSequestration:
        r.seq_value = tc.value;
        r.seq_start = tc.window_start_year;
        r.seq_end = tc.window_end_year;
        break;
    }
  }
  return r;
}

class Builder {
 public:
  Builder(const SystemData& sys, const Scenario& scn, const Configuration& cfg,
          const TimeGrid& grid, bool foresight, bool operational)
      : sys_(sys), scn_(scn), cfg_(cfg), grid_(grid), foresight_(foresight),
        operational_(operational) {
    out_.grid = grid;
    for (size_t z = 0; z < sys_.zones.size(); ++z) zone_index_[sys_.zones[z].id] = static_cast<int>(z);
  }

  void add_period(int period_index, const CarriedState& carried);
  BuiltProblem finish() {
    out_.problem.label = label_;
    return std::move(out_);
  }

  std::string label_;

 private:
  struct ClassBlock {
    int class_id = 0;
    double credit_per_mwh = 0.0;
    LinExpr cap;
    std::vector<int> gen;
  };
  struct ClusterBlock {
    int cluster = -1;
    std::vector<ClassBlock> classes;
    LinExpr total_cap;
  };
  struct StorageBlock {
    int storage = -1;
    LinExpr power, energy;
    std::vector<int> charge, discharge, soc;
  };
  struct CorridorBlock {
    int corridor = -1;
    LinExpr cap;
    double loss_eff = 0.0;
    std::vector<int> flow[2];
  };

  Problem& p() { return out_.problem; }
  int zone_of(const std::string& id) const { return zone_index_.at(id); }

  double wacc(const ResourceCluster& c) const {
    return c.wacc_override ? *c.wacc_override : sys_.financial.wacc_default;
  }

  double vintage_credit(const ResourceCluster& c, const CreditRules& r,
                        int build_year) const {
    if (r.ptc_value <= 0.0 || build_year < r.ptc_start || build_year > r.ptc_end)
      return 0.0;
    return levelize_ptc(r.ptc_value * (1.0 + c.ptc_bonus_fraction),
                        sys_.financial.ptc_credit_years, c.lifetime_years,
                        sys_.financial.wacc_default,
                        sys_.financial.ptc_transfer_penalty);
  }

  double cluster_annuity_per_mw_yr(const ResourceCluster& c, const CreditRules& r,
                                   int build_year) const {
    const bool itc = r.itc_fraction > 0.0 && build_year >= r.itc_start &&
                     build_year <= r.itc_end;
    const double rate = wacc(c);
    return 1000.0 * (annuitize_capex(c.capex_overnight_per_kw,
                                     itc ? r.itc_fraction : 0.0, rate,
                                     c.lifetime_years) +
                     annuitize_capex(c.interconnect_capex_per_kw, 0.0, rate,
                                     c.lifetime_years));
  }

  double storage_itc(const StorageCluster& st, int build_year) const {
    const CreditRules r = credit_rules_for(sys_.policies, {st.id, "battery"});
    if (r.itc_fraction > 0.0 && build_year >= r.itc_start && build_year <= r.itc_end)
      return r.itc_fraction;
    return 0.0;
  }

  std::vector<ClusterBlock> build_capacity_blocks(int pi, const CarriedState& carried,
                                                  bool first_block);
  std::vector<StorageBlock> build_storage_blocks(int pi, const CarriedState& carried);
  std::vector<CorridorBlock> build_corridor_blocks(int pi, const CarriedState& carried);
  void build_dispatch(int pi, std::vector<ClusterBlock>& clusters,
                      std::vector<StorageBlock>& storage,
                      std::vector<CorridorBlock>& corridors);
  void add_storage_rows(int pi, std::vector<StorageBlock>& storage);
  void add_hydro_budget_rows(int pi, const std::vector<ClusterBlock>& clusters);
  void add_unit_commitment_rows(int pi, const std::vector<ClusterBlock>& clusters);
  void add_carbon_rows(int pi, const std::vector<ClusterBlock>& clusters);
  void add_ces_rows(int pi, const std::vector<ClusterBlock>& clusters);
  void add_min_capacity_rows(int pi, const std::vector<ClusterBlock>& clusters);

  void add_cap_terms(const LinExpr& e, double coef) {
    for (const auto& [var, c] : e.terms) p().add_coef(var, coef * c);
  }

  const SystemData& sys_;
  const Scenario& scn_;
  const Configuration& cfg_;
  const TimeGrid& grid_;
  bool foresight_;
  bool operational_;
  BuiltProblem out_;
  std::map<std::string, int> zone_index_;

  double weight_ = 1.0;
  bool first_period_in_problem_ = true;

  // Per-period dispatch bookkeeping (reset each block).
  std::vector<std::vector<int>> unserved_;  // [zone][slot]

  // Foresight vintage registries.
  struct ForeVintage {
    int period;
    int build_year;
    int var;
    double credit;
  };
  std::map<int, std::vector<ForeVintage>> fore_cluster_vintages_;
  std::map<int, std::vector<std::pair<int, int>>> fore_storage_power_;
  std::map<int, std::vector<std::pair<int, int>>> fore_storage_energy_;
  std::map<int, std::vector<int>> fore_tx_;
  std::map<std::pair<int, int>, int> prev_retained_;  // (cluster, class) -> var
};

std::vector<Builder::ClusterBlock> Builder::build_capacity_blocks(
    int pi, const CarriedState& carried, bool first_block) {
  const int rep = sys_.horizon.periods[pi].representative_year;
  const bool econ =
      cfg_.retirement_mode == RetirementMode::kEconomic && !operational_;

  std::vector<ClusterBlock> blocks;
  for (size_t cii = 0; cii < sys_.clusters.size(); ++cii) {
    const int ci = static_cast<int>(cii);
    const auto& cluster = sys_.clusters[ci];
    const CreditRules rules = credit_rules_for(sys_.policies, {cluster.tech.name});
    ClusterBlock blk;
    blk.cluster = ci;

    std::map<double, int> class_ids{{0.0, 0}};
    auto class_id_for = [&](double credit) {
      auto it = class_ids.find(credit);
      if (it != class_ids.end()) return it->second;
      const int id = static_cast<int>(class_ids.size());
      class_ids.emplace(credit, id);
      return id;
    };
    auto class_block = [&](double credit) -> ClassBlock& {
      const int id = class_id_for(credit);
      for (auto& cb : blk.classes)
        if (cb.class_id == id) return cb;
      blk.classes.push_back({});
      blk.classes.back().class_id = id;
      blk.classes.back().credit_per_mwh = credit;
      return blk.classes.back();
    };

    // Carried stock per credit class.
    std::map<int, double> carried_mw;
    for (const auto& v : carried.clusters[ci]) {
      double mw;
      if (operational_) {
        mw = v.retained_mw;  // snapshot already reflects the plan
      } else if (econ) {
        mw = v.retained_mw;  // economic mode never ages out
      } else {
        mw = vintage_alive(v.build_year, cluster.lifetime_years, rep) ? v.capacity_mw
                                                                      : 0.0;
      }
      if (mw <= 0.0) continue;
      const double credit = vintage_credit(cluster, rules, v.build_year);
      carried_mw[class_id_for(credit)] += mw;
      class_block(credit);
    }

    // Sunk capital recovery of carried vintages.
    for (const auto& v : carried.clusters[ci]) {
      if (annuity_active(v.build_year, cluster.lifetime_years, rep))
        p().add_objective_constant(weight_ * v.annuity_per_mw_yr * v.capacity_mw);
    }

    // New build this period.
    int newcap_var = -1;
    int newcap_class = -1;
    if (cluster.new_build_allowed && !operational_) {
      const double credit = vintage_credit(cluster, rules, rep);
      newcap_class = class_id_for(credit);
      class_block(credit);
      VarTag tag;
      tag.kind = VarKind::kNewCap;
      tag.entity = ci;
      tag.period = static_cast<int16_t>(pi);
      const double ub =
          cluster.max_new_capacity_mw < 0.0 ? kInf : cluster.max_new_capacity_mw;
      const double annuity = cluster_annuity_per_mw_yr(cluster, rules, rep);
      // Economic mode charges fixed O&M on retention, not on the build.
      const double obj0 =
          weight_ * (annuity + (econ ? 0.0 : cluster.fixed_om_per_kw_yr * 1000.0));
      newcap_var = p().add_variable(0.0, ub, obj0, tag);
      out_.index.new_cap[{ci, pi}] = newcap_var;
      if (foresight_)
        fore_cluster_vintages_[ci].push_back({pi, rep, newcap_var, credit});
    }

    // Foresight: earlier vintage variables accrue services and costs here.
    if (foresight_) {
      for (const auto& fv : fore_cluster_vintages_[ci]) {
        if (fv.period == pi) continue;  // this period's build handled below
        if (annuity_active(fv.build_year, cluster.lifetime_years, rep))
          p().mutable_var(fv.var).objective +=
              weight_ * cluster_annuity_per_mw_yr(cluster, rules, fv.build_year);
      }
    }

    // Assemble per-class capacity expressions.
    for (auto& cb : blk.classes) {
      const double carried_const =
          carried_mw.count(cb.class_id) ? carried_mw[cb.class_id] : 0.0;
      if (econ) {
        const bool has_new = newcap_class == cb.class_id && newcap_var >= 0;
        if (!foresight_) {
          if (carried_const > 0.0) {
            VarTag tag;
            tag.kind = VarKind::kRetained;
            tag.entity = ci;
            tag.period = static_cast<int16_t>(pi);
            tag.aux = cb.class_id;
            const int r = p().add_variable(
                0.0, carried_const, weight_ * cluster.fixed_om_per_kw_yr * 1000.0, tag);
            out_.index.retained[{ci, cb.class_id, pi}] = r;
            cb.cap.terms.emplace_back(r, 1.0);
          }
          if (has_new) {
            cb.cap.terms.emplace_back(newcap_var, 1.0);
            // Fixed O&M applies to new capacity as well.
            p().mutable_var(newcap_var).objective +=
                weight_ * cluster.fixed_om_per_kw_yr * 1000.0;
          }
        } else {
          const auto prev_it = prev_retained_.find({ci, cb.class_id});
          const bool has_prev = prev_it != prev_retained_.end();
          if (carried_const <= 0.0 && !has_new && !has_prev) continue;
          VarTag tag;
          tag.kind = VarKind::kRetained;
          tag.entity = ci;
          tag.period = static_cast<int16_t>(pi);
          tag.aux = cb.class_id;
          const int r = p().add_variable(
              0.0, kInf, weight_ * cluster.fixed_om_per_kw_yr * 1000.0, tag);
          out_.index.retained[{ci, cb.class_id, pi}] = r;
          cb.cap.terms.emplace_back(r, 1.0);
          // Permanent retirement: r_p <= r_{p-1} + this period's build, with
          // the initial stock as the first headroom.
          RowTag rt;
          rt.kind = RowKind::kRetainLink;
          rt.entity = ci;
          rt.period = static_cast<int16_t>(pi);
          rt.aux = cb.class_id;
          p().begin_row(RowSense::kLe, first_block ? carried_const : 0.0, rt);
          p().add_coef(r, 1.0);
          if (has_prev) p().add_coef(prev_it->second, -1.0);
          if (has_new) p().add_coef(newcap_var, -1.0);
          p().end_row();
          prev_retained_[{ci, cb.class_id}] = r;
        }
      } else {
        cb.cap.constant += carried_const;
        if (carried_const > 0.0) {
          p().add_objective_constant(weight_ * cluster.fixed_om_per_kw_yr * 1000.0 *
                                     carried_const);
        }
        if (newcap_class == cb.class_id && newcap_var >= 0)
          cb.cap.terms.emplace_back(newcap_var, 1.0);
        if (foresight_) {
          for (const auto& fv : fore_cluster_vintages_[ci]) {
            if (fv.period == pi) continue;
            if (!vintage_alive(fv.build_year, cluster.lifetime_years, rep)) continue;
            if (class_id_for(fv.credit) != cb.class_id) continue;
            cb.cap.terms.emplace_back(fv.var, 1.0);
            p().mutable_var(fv.var).objective +=
                weight_ * cluster.fixed_om_per_kw_yr * 1000.0;
          }
        }
      }
    }

    for (const auto& cb : blk.classes) {
      out_.index.class_credit[{ci, cb.class_id}] = cb.credit_per_mwh;
      blk.total_cap.constant += cb.cap.constant;
      for (const auto& t : cb.cap.terms) blk.total_cap.terms.push_back(t);
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

std::vector<Builder::StorageBlock> Builder::build_storage_blocks(
    int pi, const CarriedState& carried) {
  const int rep = sys_.horizon.periods[pi].representative_year;
  const bool econ_keepall =
      cfg_.retirement_mode == RetirementMode::kEconomic && !operational_;
  std::vector<StorageBlock> blocks;
  for (size_t sii = 0; sii < sys_.storage.size(); ++sii) {
    const int si = static_cast<int>(sii);
    const auto& st = sys_.storage[si];
    StorageBlock blk;
    blk.storage = si;
    for (const auto& v : carried.storage[si]) {
      const bool alive = operational_ || econ_keepall ||
                         vintage_alive(v.build_year, st.lifetime_years, rep);
      if (alive) {
        blk.power.constant += v.power_mw;
        blk.energy.constant += v.energy_mwh;
      }
      if (annuity_active(v.build_year, st.lifetime_years, rep))
        p().add_objective_constant(weight_ *
                                   (v.power_annuity_per_mw_yr * v.power_mw +
                                    v.energy_annuity_per_mwh_yr * v.energy_mwh));
    }
    if (foresight_) {
      for (const auto& [vp, var] : fore_storage_power_[si]) {
        if (vp == pi) continue;
        const int by = sys_.horizon.periods[vp].representative_year;
        if (econ_keepall || vintage_alive(by, st.lifetime_years, rep))
          blk.power.terms.emplace_back(var, 1.0);
        if (annuity_active(by, st.lifetime_years, rep))
          p().mutable_var(var).objective +=
              weight_ * 1000.0 *
              annuitize_capex(st.power_capex_per_kw, storage_itc(st, by),
                              sys_.financial.wacc_default, st.lifetime_years);
      }
      for (const auto& [vp, var] : fore_storage_energy_[si]) {
        if (vp == pi) continue;
        const int by = sys_.horizon.periods[vp].representative_year;
        if (econ_keepall || vintage_alive(by, st.lifetime_years, rep))
          blk.energy.terms.emplace_back(var, 1.0);
        if (annuity_active(by, st.lifetime_years, rep))
          p().mutable_var(var).objective +=
              weight_ * 1000.0 *
              annuitize_capex(st.energy_capex_per_kwh, storage_itc(st, by),
                              sys_.financial.wacc_default, st.lifetime_years);
      }
    }
    if (st.new_build_allowed && !operational_) {
      const double itc = storage_itc(st, rep);
      const double pow_ann = 1000.0 * annuitize_capex(st.power_capex_per_kw, itc,
                                                      sys_.financial.wacc_default,
                                                      st.lifetime_years);
      const double ene_ann = 1000.0 * annuitize_capex(st.energy_capex_per_kwh, itc,
                                                      sys_.financial.wacc_default,
                                                      st.lifetime_years);
      const double ub = st.max_new_power_mw < 0.0 ? kInf : st.max_new_power_mw;
      VarTag tag;
      tag.kind = VarKind::kStoragePowerNew;
      tag.entity = si;
      tag.period = static_cast<int16_t>(pi);
      if (st.duration_fixed_hours) {
        const double dur = *st.duration_fixed_hours;
        const int pvar =
            p().add_variable(0.0, ub, weight_ * (pow_ann + ene_ann * dur), tag);
        out_.index.storage_power_new[{si, pi}] = pvar;
        blk.power.terms.emplace_back(pvar, 1.0);
        blk.energy.terms.emplace_back(pvar, dur);
        if (foresight_) fore_storage_power_[si].push_back({pi, pvar});
      } else {
        const int pvar = p().add_variable(0.0, ub, weight_ * pow_ann, tag);
        VarTag etag = tag;
        etag.kind = VarKind::kStorageEnergyNew;
        const int evar = p().add_variable(0.0, kInf, weight_ * ene_ann, etag);
        out_.index.storage_power_new[{si, pi}] = pvar;
        out_.index.storage_energy_new[{si, pi}] = evar;
        blk.power.terms.emplace_back(pvar, 1.0);
        blk.energy.terms.emplace_back(evar, 1.0);
        if (foresight_) {
          fore_storage_power_[si].push_back({pi, pvar});
          fore_storage_energy_[si].push_back({pi, evar});
        }
      }
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

std::vector<Builder::CorridorBlock> Builder::build_corridor_blocks(
    int pi, const CarriedState& carried) {
  std::vector<CorridorBlock> blocks;
  for (size_t lii = 0; lii < sys_.corridors.size(); ++lii) {
    const int li = static_cast<int>(lii);
    const auto& cor = sys_.corridors[li];
    CorridorBlock blk;
    blk.corridor = li;
    const double adder_mult = cor.intra_regional_adder ? 2.0 : 1.0;
    blk.loss_eff = std::min(1.0, cor.loss_fraction * adder_mult);
    blk.cap.constant = cor.existing_capacity_mw + carried.corridor_extra_mw[li];

    if (carried.corridor_extra_mw[li] > 0.0)
      p().add_objective_constant(weight_ * cor.reinforcement_cost_per_mw_yr *
                                 adder_mult * carried.corridor_extra_mw[li]);

    if (foresight_) {
      for (int var : fore_tx_[li]) {
        blk.cap.terms.emplace_back(var, 1.0);
        p().mutable_var(var).objective +=
            weight_ * cor.reinforcement_cost_per_mw_yr * adder_mult;
      }
    }

    if (!operational_ && !scn_.tx_expansion_none) {
      double ub = kInf;
      if (scn_.tx_expansion_limit_fraction) {
        if (foresight_) {
          // Deterministic maximum attainable start-of-period capacity: the
          // loosest value the rule can produce, so no feasible plan is cut.
          double start = cor.existing_capacity_mw;
          for (int q = 0; q < pi; ++q)
            start += tx_expansion_bound_mw(*scn_.tx_expansion_limit_fraction, start);
          ub = tx_expansion_bound_mw(*scn_.tx_expansion_limit_fraction, start);
        } else {
          ub = tx_expansion_bound_mw(*scn_.tx_expansion_limit_fraction,
                                     blk.cap.constant);
        }
      }
      VarTag tag;
      tag.kind = VarKind::kTxExpand;
      tag.entity = li;
      tag.period = static_cast<int16_t>(pi);
      const int var = p().add_variable(
          0.0, ub, weight_ * cor.reinforcement_cost_per_mw_yr * adder_mult, tag);
      out_.index.tx_expand[{li, pi}] = var;
      blk.cap.terms.emplace_back(var, 1.0);
      if (foresight_) fore_tx_[li].push_back(var);
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

void Builder::build_dispatch(int pi, std::vector<ClusterBlock>& clusters,
                             std::vector<StorageBlock>& storage,
                             std::vector<CorridorBlock>& corridors) {
  const auto& period = sys_.horizon.periods[pi];
  const int rep = period.representative_year;
  const int nslots = static_cast<int>(grid_.slots.size());

  for (auto& blk : clusters) {
    const auto& cluster = sys_.clusters[blk.cluster];
    const CreditRules rules = credit_rules_for(sys_.policies, {cluster.tech.name});
    double unit_cost = cluster.variable_om_per_mwh;
    if (!cluster.tech.fuel.empty() && cluster.tech.heat_rate > 0.0)
      unit_cost += cluster.tech.heat_rate * sys_.fuel_price(cluster.tech.fuel, rep);
    if (rules.seq_value > 0.0 && rep >= rules.seq_start && rep <= rules.seq_end &&
        cluster.tech.capture_rate > 0.0 && !cluster.tech.fuel.empty()) {
      const FuelSpec* fuel = sys_.find_fuel(cluster.tech.fuel);
      unit_cost -= rules.seq_value * cluster.tech.heat_rate * fuel->emission_factor *
                   cluster.tech.capture_rate;
    }

    for (auto& cb : blk.classes) {
      const bool has_vars = cb.cap.has_vars();
      if (cb.cap.constant <= 0.0 && !has_vars) continue;
      cb.gen.assign(nslots, -1);
      for (int t = 0; t < nslots; ++t) {
        const auto& slot = grid_.slots[t];
        const double avail = cluster.tech.is_variable ? cluster.profile[slot.hour] : 1.0;
        if (avail <= 0.0) continue;  // structurally zero output this hour
        VarTag tag;
        tag.kind = VarKind::kGen;
        tag.entity = blk.cluster;
        tag.zone = zone_of(cluster.zone);
        tag.hour = slot.hour;
        tag.period = static_cast<int16_t>(pi);
        tag.aux = cb.class_id;
        const double obj = weight_ * slot.weight * (unit_cost - cb.credit_per_mwh);
        const double ub = has_vars ? kInf : cb.cap.constant * avail;
        const int g = p().add_variable(0.0, ub, obj, tag);
        cb.gen[t] = g;
        if (has_vars) {
          RowTag rt;
          rt.kind = RowKind::kGenCap;
          rt.entity = blk.cluster;
          rt.hour = slot.hour;
          rt.period = static_cast<int16_t>(pi);
          rt.aux = cb.class_id;
          p().begin_row(RowSense::kLe, cb.cap.constant * avail, rt);
          p().add_coef(g, 1.0);
          add_cap_terms(cb.cap, -avail);
          p().end_row();
        }
      }
    }
  }

  for (auto& blk : storage) {
    const auto& st = sys_.storage[blk.storage];
    const bool pow_vars = blk.power.has_vars();
    const bool ene_vars = blk.energy.has_vars();
    if (blk.power.constant <= 0.0 && !pow_vars) continue;
    blk.charge.assign(nslots, -1);
    blk.discharge.assign(nslots, -1);
    blk.soc.assign(nslots, -1);
    for (int t = 0; t < nslots; ++t) {
      const auto& slot = grid_.slots[t];
      VarTag tag;
      tag.entity = blk.storage;
      tag.zone = zone_of(st.zone);
      tag.hour = slot.hour;
      tag.period = static_cast<int16_t>(pi);
      tag.kind = VarKind::kCharge;
      blk.charge[t] =
          p().add_variable(0.0, pow_vars ? kInf : blk.power.constant, 0.0, tag);
      tag.kind = VarKind::kDischarge;
      blk.discharge[t] =
          p().add_variable(0.0, pow_vars ? kInf : blk.power.constant, 0.0, tag);
      tag.kind = VarKind::kSoc;
      blk.soc[t] =
          p().add_variable(0.0, ene_vars ? kInf : blk.energy.constant, 0.0, tag);
    }
  }

  for (auto& blk : corridors) {
    const bool cap_vars = blk.cap.has_vars();
    if (blk.cap.constant <= 0.0 && !cap_vars) continue;
    for (int dir = 0; dir < 2; ++dir) blk.flow[dir].assign(nslots, -1);
    for (int t = 0; t < nslots; ++t) {
      const auto& slot = grid_.slots[t];
      for (int dir = 0; dir < 2; ++dir) {
        VarTag tag;
        tag.kind = VarKind::kFlow;
        tag.entity = blk.corridor;
        tag.hour = slot.hour;
        tag.period = static_cast<int16_t>(pi);
        tag.aux = dir;
        const int f = p().add_variable(0.0, cap_vars ? kInf : blk.cap.constant, 0.0, tag);
        blk.flow[dir][t] = f;
        if (cap_vars) {
          RowTag rt;
          rt.kind = RowKind::kFlowCap;
          rt.entity = blk.corridor;
          rt.hour = slot.hour;
          rt.period = static_cast<int16_t>(pi);
          rt.aux = dir;
          p().begin_row(RowSense::kLe, blk.cap.constant, rt);
          p().add_coef(f, 1.0);
          add_cap_terms(blk.cap, -1.0);
          p().end_row();
        }
      }
    }
  }

  unserved_.assign(sys_.zones.size(), std::vector<int>(nslots, -1));
  for (size_t zi = 0; zi < sys_.zones.size(); ++zi) {
    const Zone& zone = sys_.zones[zi];
    for (int t = 0; t < nslots; ++t) {
      const auto& slot = grid_.slots[t];
      VarTag utag;
      utag.kind = VarKind::kUnserved;
      utag.entity = static_cast<int>(zi);
      utag.zone = static_cast<int>(zi);
      utag.hour = slot.hour;
      utag.period = static_cast<int16_t>(pi);
      const int unserved = p().add_variable(
          0.0, kInf, weight_ * slot.weight * sys_.financial.unserved_penalty, utag);
      unserved_[zi][t] = unserved;

      RowTag rt;
      rt.kind = RowKind::kBalance;
      rt.zone = static_cast<int>(zi);
      rt.hour = slot.hour;
      rt.period = static_cast<int16_t>(pi);
      p().begin_row(RowSense::kEq, zone.demand_mw[slot.hour] * period.demand_scale, rt);
      for (auto& blk : clusters) {
        if (sys_.clusters[blk.cluster].zone != zone.id) continue;
        for (auto& cb : blk.classes)
          if (!cb.gen.empty() && cb.gen[t] >= 0) p().add_coef(cb.gen[t], 1.0);
      }
      for (auto& blk : storage) {
        if (blk.charge.empty() || blk.charge[t] < 0) continue;
        if (sys_.storage[blk.storage].zone != zone.id) continue;
        p().add_coef(blk.discharge[t], 1.0);
        p().add_coef(blk.charge[t], -1.0);
      }
      for (auto& blk : corridors) {
        if (blk.flow[0].empty() || blk.flow[0][t] < 0) continue;
        const auto& cor = sys_.corridors[blk.corridor];
        // Losses apply on receipt.
        if (cor.zone_to == zone.id) {
          p().add_coef(blk.flow[0][t], 1.0 - blk.loss_eff);
          p().add_coef(blk.flow[1][t], -1.0);
        } else if (cor.zone_from == zone.id) {
          p().add_coef(blk.flow[1][t], 1.0 - blk.loss_eff);
          p().add_coef(blk.flow[0][t], -1.0);
        }
      }
      p().add_coef(unserved, 1.0);
      p().end_row();
    }
  }
}

void Builder::add_storage_rows(int pi, std::vector<StorageBlock>& storage) {
  const int nslots = static_cast<int>(grid_.slots.size());
  for (auto& blk : storage) {
    if (blk.charge.empty()) continue;
    const auto& st = sys_.storage[blk.storage];
    const double sqrt_eff = std::sqrt(st.round_trip_efficiency);
    for (int t = 0; t < nslots; ++t) {
      const auto& slot = grid_.slots[t];
      RowTag rt;
      rt.entity = blk.storage;
      rt.hour = slot.hour;
      rt.period = static_cast<int16_t>(pi);
      // soc_t = soc_prev + sqrt(eff) charge_t - discharge_t / sqrt(eff),
      // cyclic within each week.
      rt.kind = RowKind::kSocBalance;
      p().begin_row(RowSense::kEq, 0.0, rt);
      p().add_coef(blk.soc[t], 1.0);
      p().add_coef(blk.soc[slot.prev], -1.0);
      p().add_coef(blk.charge[t], -sqrt_eff);
      p().add_coef(blk.discharge[t], 1.0 / sqrt_eff);
      p().end_row();

      if (blk.power.has_vars()) {
        rt.kind = RowKind::kChargeCap;
        p().begin_row(RowSense::kLe, blk.power.constant, rt);
        p().add_coef(blk.charge[t], 1.0);
        add_cap_terms(blk.power, -1.0);
        p().end_row();
        rt.kind = RowKind::kDischargeCap;
        p().begin_row(RowSense::kLe, blk.power.constant, rt);
        p().add_coef(blk.discharge[t], 1.0);
        add_cap_terms(blk.power, -1.0);
        p().end_row();
      }
      if (blk.energy.has_vars()) {
        rt.kind = RowKind::kSocCap;
        p().begin_row(RowSense::kLe, blk.energy.constant, rt);
        p().add_coef(blk.soc[t], 1.0);
        add_cap_terms(blk.energy, -1.0);
        p().end_row();
      }
    }
  }
}

void Builder::add_hydro_budget_rows(int pi, const std::vector<ClusterBlock>& clusters) {
  const int nslots = static_cast<int>(grid_.slots.size());
  for (const auto& blk : clusters) {
    const auto& cluster = sys_.clusters[blk.cluster];
    if (cluster.tech.name == "hydro" && cluster.hydro_monthly_budget_mwh.empty())
      throw SchemaError("hydro cluster '" + cluster.id + "' has no monthly budgets");
    if (cluster.hydro_monthly_budget_mwh.empty()) continue;
    int t = 0;
    while (t < nslots) {
      const int week = grid_.slots[t].week_id;
      int end = t;
      while (end < nslots && grid_.slots[end].week_id == week) ++end;
      if (week > 0) {
        const int month = month_of_week(week);
        const double budget =
            cluster.hydro_monthly_budget_mwh[month - 1] *
            (static_cast<double>(kHoursPerWeek) / hours_in_month(month));
        RowTag rt;
        rt.kind = RowKind::kHydroBudget;
        rt.entity = blk.cluster;
        rt.period = static_cast<int16_t>(pi);
        rt.aux = week;
        p().begin_row(RowSense::kLe, budget, rt);
        for (const auto& cb : blk.classes)
          for (int q = t; q < end; ++q)
            if (!cb.gen.empty() && cb.gen[q] >= 0) p().add_coef(cb.gen[q], 1.0);
        p().end_row();
      }
      t = end;
    }
  }
}

void Builder::add_unit_commitment_rows(int pi,
                                       const std::vector<ClusterBlock>& clusters) {
  if (!(cfg_.unit_commitment || operational_)) return;
  const int nslots = static_cast<int>(grid_.slots.size());
  for (const auto& blk : clusters) {
    const auto& cluster = sys_.clusters[blk.cluster];
    const bool thermal =
        cluster.tech.is_firm && !cluster.tech.fuel.empty() && !cluster.tech.is_storage;
    if (!thermal) continue;
    if (blk.total_cap.constant <= 0.0 && !blk.total_cap.has_vars()) continue;
    const auto& uc = cluster.tech.uc;
    if (!uc.present)
      throw ConfigError("unit commitment requested but cluster '" + cluster.id +
                        "' has no UC parameters");
    const bool need_ramp = uc.ramp_fraction_per_hour < 1.0;
    const bool need_minload = uc.min_load_fraction > 0.0;
    const bool need_minup = uc.min_up_hours > 1;
    const bool need_mindown = uc.min_down_hours > 1;
    const bool need_start = uc.startup_cost_per_mw > 0.0 || need_minup;
    const bool need_commit = need_minload || need_start || need_mindown;
    if (!need_commit && !need_ramp) continue;

    std::vector<int> commit(nslots, -1), start(nslots, -1), shut(nslots, -1);
    if (need_commit) {
      for (int t = 0; t < nslots; ++t) {
        const auto& slot = grid_.slots[t];
        VarTag tag;
        tag.entity = blk.cluster;
        tag.hour = slot.hour;
        tag.period = static_cast<int16_t>(pi);
        tag.kind = VarKind::kCommit;
        commit[t] = p().add_variable(
            0.0, blk.total_cap.has_vars() ? kInf : blk.total_cap.constant, 0.0, tag);
        if (need_start) {
          tag.kind = VarKind::kStartup;
          start[t] = p().add_variable(0.0, kInf,
                                       weight_ * slot.weight * uc.startup_cost_per_mw,
                                       tag);
        }
        if (need_mindown) {
          tag.kind = VarKind::kShutdown;
          shut[t] = p().add_variable(0.0, kInf, 0.0, tag);
        }
      }
    }

    auto total_gen = [&](int t, double sign) {
      for (const auto& cb : blk.classes)
        if (!cb.gen.empty() && cb.gen[t] >= 0) p().add_coef(cb.gen[t], sign);
    };

    for (int t = 0; t < nslots; ++t) {
      const auto& slot = grid_.slots[t];
      RowTag rt;
      rt.entity = blk.cluster;
      rt.hour = slot.hour;
      rt.period = static_cast<int16_t>(pi);
      if (need_commit) {
        if (blk.total_cap.has_vars()) {
          rt.kind = RowKind::kCommitCap;
          p().begin_row(RowSense::kLe, blk.total_cap.constant, rt);
          p().add_coef(commit[t], 1.0);
          add_cap_terms(blk.total_cap, -1.0);
          p().end_row();
        }
        rt.kind = RowKind::kMaxGen;
        p().begin_row(RowSense::kLe, 0.0, rt);
        total_gen(t, 1.0);
        p().add_coef(commit[t], -1.0);
        p().end_row();
        if (need_minload) {
          rt.kind = RowKind::kMinGen;
          p().begin_row(RowSense::kLe, 0.0, rt);
          p().add_coef(commit[t], uc.min_load_fraction);
          total_gen(t, -1.0);
          p().end_row();
        }
        if (need_start) {
          rt.kind = RowKind::kStartupDef;
          p().begin_row(RowSense::kLe, 0.0, rt);
          p().add_coef(commit[t], 1.0);
          p().add_coef(commit[slot.prev], -1.0);
          p().add_coef(start[t], -1.0);
          p().end_row();
        }
        if (need_mindown) {
          rt.kind = RowKind::kShutdownDef;
          p().begin_row(RowSense::kLe, 0.0, rt);
          p().add_coef(commit[slot.prev], 1.0);
          p().add_coef(commit[t], -1.0);
          p().add_coef(shut[t], -1.0);
          p().end_row();
        }
      }
      if (need_ramp) {
        rt.kind = RowKind::kRampUp;
        p().begin_row(RowSense::kLe, uc.ramp_fraction_per_hour * blk.total_cap.constant,
                      rt);
        total_gen(t, 1.0);
        total_gen(slot.prev, -1.0);
        add_cap_terms(blk.total_cap, -uc.ramp_fraction_per_hour);
        p().end_row();
        rt.kind = RowKind::kRampDown;
        p().begin_row(RowSense::kLe, uc.ramp_fraction_per_hour * blk.total_cap.constant,
                      rt);
        total_gen(slot.prev, 1.0);
        total_gen(t, -1.0);
        add_cap_terms(blk.total_cap, -uc.ramp_fraction_per_hour);
        p().end_row();
      }
    }

    auto window_rows = [&](RowKind kind, int span) {
      for (int t = 0; t < nslots; ++t) {
        RowTag rt;
        rt.kind = kind;
        rt.entity = blk.cluster;
        rt.hour = grid_.slots[t].hour;
        rt.period = static_cast<int16_t>(pi);
        if (kind == RowKind::kMinUp) {
          // startups within the lookback must still be committed
          p().begin_row(RowSense::kLe, 0.0, rt);
          int q = t;
          for (int s = 0; s < span; ++s) {
            p().add_coef(start[q], 1.0);
            q = grid_.slots[q].prev;
          }
          p().add_coef(commit[t], -1.0);
          p().end_row();
        } else {
          // shutdowns within the lookback must still be offline
          p().begin_row(RowSense::kLe, blk.total_cap.constant, rt);
          int q = t;
          for (int s = 0; s < span; ++s) {
            p().add_coef(shut[q], 1.0);
            q = grid_.slots[q].prev;
          }
          p().add_coef(commit[t], 1.0);
          add_cap_terms(blk.total_cap, -1.0);
          p().end_row();
        }
      }
    };
    if (need_minup) window_rows(RowKind::kMinUp, std::min(uc.min_up_hours, nslots));
    if (need_mindown) window_rows(RowKind::kMinDown, std::min(uc.min_down_hours, nslots));
  }
}

void Builder::add_carbon_rows(int pi, const std::vector<ClusterBlock>& clusters) {
  const int rep = sys_.horizon.periods[pi].representative_year;
  const int nslots = static_cast<int>(grid_.slots.size());

  std::vector<std::pair<int, const CarbonCap*>> caps;
  if (sys_.policies.carbon_cap) caps.emplace_back(-1, &*sys_.policies.carbon_cap);
  for (size_t i = 0; i < sys_.policies.regional_caps.size(); ++i)
    caps.emplace_back(static_cast<int>(i), &sys_.policies.regional_caps[i]);

  for (const auto& [cap_index, cap] : caps) {
    auto it = cap->schedule_t.find(rep);
    if (it == cap->schedule_t.end()) continue;
    std::set<std::string> zone_ids;
    if (!cap->regions.empty())
      for (int zi : sys_.zones_in_regions(cap->regions)) zone_ids.insert(sys_.zones[zi].id);

    VarTag etag;
    etag.kind = VarKind::kCo2Excess;
    etag.entity = cap_index;
    etag.period = static_cast<int16_t>(pi);
    const int excess = p().add_variable(0.0, kInf, weight_ * cap->buyout_price, etag);
    out_.index.co2_excess[{cap_index, pi}] = excess;

    RowTag rt;
    rt.kind = RowKind::kCo2Cap;
    rt.entity = cap_index;
    rt.period = static_cast<int16_t>(pi);
    p().begin_row(RowSense::kLe, it->second, rt);
    for (const auto& blk : clusters) {
      const auto& cluster = sys_.clusters[blk.cluster];
      if (!cap->regions.empty() && zone_ids.count(cluster.zone) == 0) continue;
      const double intensity = sys_.emission_intensity(cluster);
      if (intensity <= 0.0) continue;
      for (const auto& cb : blk.classes) {
        if (cb.gen.empty()) continue;
        for (int t = 0; t < nslots; ++t)
          if (cb.gen[t] >= 0) p().add_coef(cb.gen[t], grid_.slots[t].weight * intensity);
      }
    }
    p().add_coef(excess, -1.0);
    out_.index.co2_row[{cap_index, pi}] = p().end_row();
  }
}

void Builder::add_ces_rows(int pi, const std::vector<ClusterBlock>& clusters) {
  const auto& period = sys_.horizon.periods[pi];
  const int rep = period.representative_year;
  const int nslots = static_cast<int>(grid_.slots.size());
  for (size_t si = 0; si < sys_.policies.ces_rps.size(); ++si) {
    const auto& ces = sys_.policies.ces_rps[si];
    auto it = ces.fraction_by_period.find(rep);
    if (it == ces.fraction_by_period.end() || it->second <= 0.0) continue;
    const double fraction = it->second;
    const auto zone_idx = sys_.zones_in_regions(ces.regions);
    if (zone_idx.empty())
      throw SchemaError("clean energy standard references regions with no zones");
    std::set<std::string> zone_ids;
    double demand_total = 0.0;
    for (int zi : zone_idx) {
      zone_ids.insert(sys_.zones[zi].id);
      for (int t = 0; t < nslots; ++t)
        demand_total += grid_.slots[t].weight *
                        sys_.zones[zi].demand_mw[grid_.slots[t].hour] *
                        period.demand_scale;
    }
    RowTag rt;
    rt.kind = RowKind::kCes;
    rt.entity = static_cast<int>(si);
    rt.period = static_cast<int16_t>(pi);
    // Clean generation covers the fraction of served demand:
    // sum(clean gen) + f * unserved >= f * demand.
    p().begin_row(RowSense::kGe, fraction * demand_total, rt);
    for (const auto& blk : clusters) {
      const auto& cluster = sys_.clusters[blk.cluster];
      if (zone_ids.count(cluster.zone) == 0) continue;
      if (sys_.emission_intensity(cluster) > 0.0) continue;
      for (const auto& cb : blk.classes) {
        if (cb.gen.empty()) continue;
        for (int t = 0; t < nslots; ++t)
          if (cb.gen[t] >= 0) p().add_coef(cb.gen[t], grid_.slots[t].weight);
      }
    }
    for (int zi : zone_idx)
      for (int t = 0; t < nslots; ++t)
        p().add_coef(unserved_[zi][t], fraction * grid_.slots[t].weight);
    p().end_row();
  }
}

void Builder::add_min_capacity_rows(int pi, const std::vector<ClusterBlock>& clusters) {
  const int rep = sys_.horizon.periods[pi].representative_year;
  for (size_t ti = 0; ti < sys_.policies.min_capacity_targets.size(); ++ti) {
    const auto& target = sys_.policies.min_capacity_targets[ti];
    auto it = target.mw_by_period.find(rep);
    if (it == target.mw_by_period.end() || it->second <= 0.0) continue;
    std::set<std::string> zone_ids;
    for (int zi : sys_.zones_in_regions(target.regions))
      zone_ids.insert(sys_.zones[zi].id);

    double rhs = it->second;
    std::vector<std::pair<int, double>> terms;
    for (const auto& blk : clusters) {
      const auto& cluster = sys_.clusters[blk.cluster];
      if (target.techs.count(cluster.tech.name) == 0) continue;
      if (!target.regions.empty() && zone_ids.count(cluster.zone) == 0) continue;
      for (const auto& cb : blk.classes) {
        rhs -= cb.cap.constant;
        for (const auto& t : cb.cap.terms) terms.push_back(t);
      }
    }
    RowTag rt;
    rt.kind = RowKind::kMinCapTarget;
    rt.entity = static_cast<int>(ti);
    rt.period = static_cast<int16_t>(pi);
    p().add_row(RowSense::kGe, rhs, terms, rt);
  }
}

void Builder::add_period(int period_index, const CarriedState& carried) {
  const auto& period = sys_.horizon.periods[period_index];
  if (operational_) {
    weight_ = 1.0;  // annual cost directly
  } else if (foresight_) {
    weight_ = period_discount_weight(period.start_year, period.end_year,
                                     sys_.horizon.discount_rate,
                                     sys_.horizon.base_year(), true);
  } else {
    weight_ = period_discount_weight(period.start_year, period.end_year, 0.0,
                                     sys_.horizon.base_year(), false);
  }
  out_.index.period_weight[period_index] = weight_;
  out_.periods.push_back(period_index);

  auto clusters = build_capacity_blocks(period_index, carried, first_period_in_problem_);
  auto storage = build_storage_blocks(period_index, carried);
  auto corridors = build_corridor_blocks(period_index, carried);
  build_dispatch(period_index, clusters, storage, corridors);
  add_storage_rows(period_index, storage);
  add_hydro_budget_rows(period_index, clusters);
  add_unit_commitment_rows(period_index, clusters);
  add_carbon_rows(period_index, clusters);
  add_ces_rows(period_index, clusters);
  add_min_capacity_rows(period_index, clusters);
  first_period_in_problem_ = false;
}

}  // namespace

BuiltProblem build_period_problem(const SystemData& system, const Scenario& scenario,
                                  const Configuration& config, int period_index,
                                  const CarriedState& carried, const TimeGrid& grid) {
  Builder b(system, scenario, config, grid, /*foresight=*/false, /*operational=*/false);
  b.label_ = "plan_" + system.horizon.periods[period_index].label;
  b.add_period(period_index, carried);
  return b.finish();
}

BuiltProblem build_foresight_problem(const SystemData& system, const Scenario& scenario,
                                     const Configuration& config, const TimeGrid& grid) {
  if (config.weeks.full_52)
    throw ConfigError("foresight requires sampled weeks");
  Builder b(system, scenario, config, grid, /*foresight=*/true, /*operational=*/false);
  b.label_ = "foresight";
  const CarriedState initial = CarriedState::initial(system);
  for (size_t pi = 0; pi < system.horizon.periods.size(); ++pi)
    b.add_period(static_cast<int>(pi), initial);
  return b.finish();
}

BuiltProblem build_operational_problem(const SystemData& system, const Scenario& scenario,
                                       int period_index, const CarriedState& capacities,
                                       const TimeGrid& grid) {
  Configuration cfg;
  cfg.unit_commitment = true;
  Builder b(system, scenario, cfg, grid, /*foresight=*/false, /*operational=*/true);
  b.label_ = "opsim_" + system.horizon.periods[period_index].label;
  b.add_period(period_index, capacities);
  return b.finish();
}

}  // namespace cemkit
