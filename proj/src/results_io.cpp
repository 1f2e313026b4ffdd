#include "cemkit/results_io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cemkit/common.h"
#include "csv.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cemkit {

namespace {

std::string hex_digest(const unsigned char* digest, unsigned int len) {
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hexd[digest[i] >> 4]);
    out.push_back(hexd[digest[i] & 0xf]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  void update(const void* data, size_t len) { EVP_DigestUpdate(ctx_, data, len); }
  std::string finish() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, digest, &len);
    return hex_digest(digest, len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

json breakdown_to_json(const CostBreakdown& c) {
  json j;
  j["capital_annuity"] = c.capital_annuity;
  j["fixed_om"] = c.fixed_om;
  j["variable_om"] = c.variable_om;
  j["fuel"] = c.fuel;
  j["startup"] = c.startup;
  j["unserved"] = c.unserved;
  j["buyout"] = c.buyout;
  j["credits"] = c.credits;
  j["total"] = c.total();
  return j;
}

CostBreakdown breakdown_from_json(const json& j) {
  CostBreakdown c;
  c.capital_annuity = j.at("capital_annuity").get<double>();
  c.fixed_om = j.at("fixed_om").get<double>();
  c.variable_om = j.at("variable_om").get<double>();
  c.fuel = j.at("fuel").get<double>();
  c.startup = j.at("startup").get<double>();
  c.unserved = j.at("unserved").get<double>();
  c.buyout = j.at("buyout").get<double>();
  c.credits = j.at("credits").get<double>();
  return c;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["kind"] = m.kind;
  j["scenario_name"] = m.scenario_name;
  j["config_name"] = m.config_name;
  j["backend"] = m.backend;
  j["workers"] = m.workers;
  j["system_hash"] = m.system_hash;
  j["scenario_hash"] = m.scenario_hash;
  j["config_hash"] = m.config_hash;
  j["plan_hash"] = m.plan_hash;
  j["tool_version"] = m.tool_version;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
}

void write_common(const std::string& dir, const SystemData& system,
                  const PlanTrajectory& plan, const RunManifest& manifest,
                  const std::vector<CostBreakdown>& annual,
                  const std::vector<double>& emissions,
                  const std::vector<std::map<std::string, double>>& emissions_by_zone,
                  const std::vector<double>& unserved,
                  const std::vector<DispatchSummary>& dispatch, double npv,
                  double planning_objective) {
  using csv::format_number;
  std::error_code ec;
  fs::create_directories(dir, ec);

  // trajectory.csv: one row per entity-period with capacity deltas.
  {
    std::vector<std::vector<std::string>> rows{
        {"period", "kind", "id", "zone", "tech", "installed_mw", "new_mw", "retired_mw"}};
    for (const auto& rec : plan.periods) {
      for (const auto& c : system.clusters) {
        rows.push_back({rec.label, "cluster", c.id, c.zone, c.tech.name,
                        format_number(rec.installed_mw.at(c.id)),
                        format_number(rec.new_mw.at(c.id)),
                        format_number(rec.retired_mw.at(c.id))});
      }
      for (const auto& s : system.storage) {
        rows.push_back({rec.label, "storage_power", s.id, s.zone, "battery",
                        format_number(rec.storage_power_mw.at(s.id)), "", ""});
        rows.push_back({rec.label, "storage_energy", s.id, s.zone, "battery",
                        format_number(rec.storage_energy_mwh.at(s.id)), "", ""});
      }
      for (const auto& l : system.corridors) {
        rows.push_back({rec.label, "corridor", l.id, l.zone_from + ":" + l.zone_to,
                        "transmission", format_number(rec.corridor_mw.at(l.id)), "", ""});
      }
    }
    csv::write_file(dir + "/trajectory.csv", rows);
  }

  // plan_state.csv: vintage detail to re-simulate the plan from disk.
  {
    std::vector<std::vector<std::string>> rows{
        {"period", "kind", "id", "build_year", "capacity_mw", "retained_mw",
         "energy_mwh", "annuity_per_mw_yr", "annuity_per_mwh_yr"}};
    for (size_t pi = 0; pi < plan.periods.size(); ++pi) {
      const auto& snap = plan.periods[pi].capacities;
      const std::string& label = plan.periods[pi].label;
      for (size_t ci = 0; ci < system.clusters.size(); ++ci) {
        for (const auto& v : snap.clusters[ci]) {
          rows.push_back({label, "cluster", system.clusters[ci].id,
                          std::to_string(v.build_year), format_number(v.capacity_mw),
                          format_number(v.retained_mw), "",
                          format_number(v.annuity_per_mw_yr), ""});
        }
      }
      for (size_t si = 0; si < system.storage.size(); ++si) {
        for (const auto& v : snap.storage[si]) {
          rows.push_back({label, "storage", system.storage[si].id,
                          std::to_string(v.build_year), format_number(v.power_mw),
                          format_number(v.power_mw), format_number(v.energy_mwh),
                          format_number(v.power_annuity_per_mw_yr),
                          format_number(v.energy_annuity_per_mwh_yr)});
        }
      }
      for (size_t li = 0; li < system.corridors.size(); ++li) {
        rows.push_back({label, "corridor_extra", system.corridors[li].id, "0",
                        format_number(snap.corridor_extra_mw[li]), "", "", "", ""});
      }
    }
    csv::write_file(dir + "/plan_state.csv", rows);
  }

  // dispatch_summary.csv
  {
    std::vector<std::vector<std::string>> rows{{"period", "kind", "id", "value_mwh"}};
    for (size_t pi = 0; pi < dispatch.size(); ++pi) {
      const std::string& label = plan.periods[pi].label;
      for (const auto& [id, v] : dispatch[pi].generation_mwh)
        rows.push_back({label, "generation", id, format_number(v)});
      for (const auto& [id, v] : dispatch[pi].unserved_mwh)
        rows.push_back({label, "unserved", id, format_number(v)});
      for (const auto& [id, v] : dispatch[pi].charge_mwh)
        rows.push_back({label, "charge", id, format_number(v)});
      for (const auto& [id, v] : dispatch[pi].discharge_mwh)
        rows.push_back({label, "discharge", id, format_number(v)});
      for (const auto& [id, v] : dispatch[pi].flow_mwh)
        rows.push_back({label, "flow", id, format_number(v)});
    }
    csv::write_file(dir + "/dispatch_summary.csv", rows);
  }

  // emissions.csv
  {
    std::vector<std::vector<std::string>> rows{{"period", "zone", "emissions_t"}};
    for (size_t pi = 0; pi < emissions_by_zone.size(); ++pi) {
      for (const auto& [zone, v] : emissions_by_zone[pi])
        rows.push_back({plan.periods[pi].label, zone, format_number(v)});
      rows.push_back({plan.periods[pi].label, "__total__", format_number(emissions[pi])});
    }
    csv::write_file(dir + "/emissions.csv", rows);
  }

  // costs.json
  {
    json j;
    j["planning_objective"] = planning_objective;
    j["npv"] = npv;
    json periods = json::array();
    for (size_t pi = 0; pi < annual.size(); ++pi) {
      json e;
      e["period"] = plan.periods[pi].label;
      e["rep_year"] = plan.periods[pi].rep_year;
      e["annual_cost"] = breakdown_to_json(annual[pi]);
      e["unserved_mwh"] = unserved[pi];
      periods.push_back(e);
    }
    j["periods"] = periods;
    write_text(dir + "/costs.json", j.dump(2) + "\n");
  }

  write_text(dir + "/manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace

std::string sha256_string(const std::string& text) {
  Sha256 h;
  h.update(text.data(), text.size());
  return h.finish();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read for hashing: " + path);
  Sha256 h;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    h.update(buf, static_cast<size_t>(in.gcount()));
  }
  return h.finish();
}

std::string sha256_directory(const std::string& directory) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(directory)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    const std::string rel = fs::relative(f, directory).generic_string();
    h.update(rel.data(), rel.size());
    const std::string fh = sha256_file(f);
    h.update(fh.data(), fh.size());
  }
  return h.finish();
}

void write_plan_results(const std::string& dir, const SystemData& system,
                        const PlanTrajectory& plan, const RunManifest& manifest) {
  std::vector<CostBreakdown> annual;
  std::vector<double> emissions, unserved, totals;
  std::vector<std::map<std::string, double>> by_zone;
  std::vector<DispatchSummary> dispatch;
  for (const auto& rec : plan.periods) {
    annual.push_back(rec.annual_cost);
    emissions.push_back(rec.emissions_t);
    by_zone.push_back(rec.emissions_by_zone_t);
    unserved.push_back(rec.dispatch.total_unserved_mwh());
    dispatch.push_back(rec.dispatch);
    totals.push_back(rec.annual_cost.total());
  }
  const double npv =
      compute_npv_summary(totals, system.horizon, system.horizon.discount_rate);
  write_common(dir, system, plan, manifest, annual, emissions, by_zone, unserved,
               dispatch, npv, plan.planning_objective);
}

void write_simulation_results(const std::string& dir, const SystemData& system,
                              const PlanTrajectory& plan,
                              const std::vector<OperationalResult>& results,
                              const RunManifest& manifest) {
  std::vector<CostBreakdown> annual;
  std::vector<double> emissions, unserved, totals;
  std::vector<std::map<std::string, double>> by_zone;
  std::vector<DispatchSummary> dispatch;
  for (size_t pi = 0; pi < results.size(); ++pi) {
    annual.push_back(results[pi].annual_cost);
    emissions.push_back(results[pi].emissions_t);
    by_zone.push_back(results[pi].emissions_by_zone_t);
    unserved.push_back(results[pi].unserved_mwh);
    DispatchSummary d;
    d.unserved_mwh = results[pi].unserved_by_zone_mwh;
    dispatch.push_back(std::move(d));
    totals.push_back(results[pi].annual_cost.total());
  }
  const double npv =
      compute_npv_summary(totals, system.horizon, system.horizon.discount_rate);
  write_common(dir, system, plan, manifest, annual, emissions, by_zone, unserved,
               dispatch, npv, plan.planning_objective);
}

RunResults read_run_results(const std::string& dir) {
  RunResults out;
  {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw SchemaError("missing manifest.json in " + dir);
    json j;
    in >> j;
    out.manifest.kind = j.value("kind", "");
    out.manifest.scenario_name = j.value("scenario_name", "");
    out.manifest.config_name = j.value("config_name", "");
    out.manifest.backend = j.value("backend", "");
    out.manifest.workers = j.value("workers", 1);
    out.manifest.system_hash = j.value("system_hash", "");
    out.manifest.scenario_hash = j.value("scenario_hash", "");
    out.manifest.config_hash = j.value("config_hash", "");
    out.manifest.plan_hash = j.value("plan_hash", "");
    out.manifest.tool_version = j.value("tool_version", "");
  }
  {
    std::ifstream in(dir + "/costs.json");
    if (!in) throw SchemaError("missing costs.json in " + dir);
    json j;
    in >> j;
    out.npv = j.at("npv").get<double>();
    out.planning_objective = j.value("planning_objective", 0.0);
    for (const auto& e : j.at("periods")) {
      out.period_labels.push_back(e.at("period").get<std::string>());
      out.rep_years.push_back(e.at("rep_year").get<int>());
      out.annual_costs.push_back(breakdown_from_json(e.at("annual_cost")));
      out.unserved_mwh.push_back(e.value("unserved_mwh", 0.0));
    }
  }
  const size_t nper = out.period_labels.size();
  auto period_of = [&](const std::string& label) -> int {
    for (size_t i = 0; i < nper; ++i)
      if (out.period_labels[i] == label) return static_cast<int>(i);
    throw SchemaError(dir + ": unknown period label '" + label + "'");
  };
  out.capacity_mw.resize(nper);
  out.generation_mwh.resize(nper);
  out.emissions_by_zone_t.resize(nper);
  out.emissions_t.assign(nper, 0.0);
  out.transmission_total_mw.assign(nper, 0.0);
  {
    csv::Table t = csv::Table::read_file(dir + "/trajectory.csv");
    for (int r = 0; r < t.rows(); ++r) {
      const int pi = period_of(t.cell(r, "period"));
      const std::string kind = t.cell(r, "kind");
      const std::string id = t.cell(r, "id");
      if (kind == "cluster" || kind == "storage_power") {
        out.capacity_mw[pi][id] = t.num(r, "installed_mw");
        out.tech_of_id[id] = t.cell(r, "tech");
      } else if (kind == "corridor") {
        out.transmission_total_mw[pi] += t.num(r, "installed_mw");
      }
    }
  }
  {
    csv::Table t = csv::Table::read_file(dir + "/dispatch_summary.csv");
    for (int r = 0; r < t.rows(); ++r) {
      if (t.cell(r, "kind") != "generation") continue;
      const int pi = period_of(t.cell(r, "period"));
      out.generation_mwh[pi][t.cell(r, "id")] = t.num(r, "value_mwh");
    }
  }
  {
    csv::Table t = csv::Table::read_file(dir + "/emissions.csv");
    for (int r = 0; r < t.rows(); ++r) {
      const int pi = period_of(t.cell(r, "period"));
      if (t.cell(r, "zone") == "__total__") {
        out.emissions_t[pi] = t.num(r, "emissions_t");
      } else {
        out.emissions_by_zone_t[pi][t.cell(r, "zone")] = t.num(r, "emissions_t");
      }
    }
  }
  return out;
}

PlanTrajectory read_plan_state(const std::string& dir, const SystemData& system) {
  PlanTrajectory plan;
  RunResults rr = read_run_results(dir);
  plan.scenario_name = rr.manifest.scenario_name;
  plan.config_name = rr.manifest.config_name;
  plan.planning_objective = rr.planning_objective;

  std::map<std::string, int> cluster_of, storage_of, corridor_of;
  for (size_t i = 0; i < system.clusters.size(); ++i) cluster_of[system.clusters[i].id] = static_cast<int>(i);
  for (size_t i = 0; i < system.storage.size(); ++i) storage_of[system.storage[i].id] = static_cast<int>(i);
  for (size_t i = 0; i < system.corridors.size(); ++i) corridor_of[system.corridors[i].id] = static_cast<int>(i);

  for (size_t pi = 0; pi < rr.period_labels.size(); ++pi) {
    PeriodRecord rec;
    rec.label = rr.period_labels[pi];
    rec.rep_year = rr.rep_years[pi];
    rec.annual_cost = rr.annual_costs[pi];
    rec.capacities.clusters.resize(system.clusters.size());
    rec.capacities.storage.resize(system.storage.size());
    rec.capacities.corridor_extra_mw.assign(system.corridors.size(), 0.0);
    plan.periods.push_back(std::move(rec));
  }
  if (plan.periods.size() != system.horizon.periods.size())
    throw SchemaError(dir + ": plan covers " + std::to_string(plan.periods.size()) +
                      " periods but the horizon has " +
                      std::to_string(system.horizon.periods.size()));

  csv::Table t = csv::Table::read_file(dir + "/plan_state.csv");
  for (int r = 0; r < t.rows(); ++r) {
    int pi = -1;
    for (size_t i = 0; i < plan.periods.size(); ++i)
      if (plan.periods[i].label == t.cell(r, "period")) pi = static_cast<int>(i);
    if (pi < 0) throw SchemaError("plan_state.csv row " + std::to_string(r + 1) +
                                  ": unknown period");
    auto& snap = plan.periods[pi].capacities;
    const std::string kind = t.cell(r, "kind");
    const std::string id = t.cell(r, "id");
    if (kind == "cluster") {
      auto it = cluster_of.find(id);
      if (it == cluster_of.end())
        throw SchemaError("plan_state.csv: unknown cluster '" + id + "'");
      snap.clusters[it->second].push_back(
          {t.integer(r, "build_year"), t.num(r, "capacity_mw"), t.num(r, "retained_mw"),
           t.num(r, "annuity_per_mw_yr")});
    } else if (kind == "storage") {
      auto it = storage_of.find(id);
      if (it == storage_of.end())
        throw SchemaError("plan_state.csv: unknown storage '" + id + "'");
      snap.storage[it->second].push_back(
          {t.integer(r, "build_year"), t.num(r, "capacity_mw"), t.num(r, "energy_mwh"),
           t.num(r, "annuity_per_mw_yr"), t.num(r, "annuity_per_mwh_yr")});
    } else if (kind == "corridor_extra") {
      auto it = corridor_of.find(id);
      if (it == corridor_of.end())
        throw SchemaError("plan_state.csv: unknown corridor '" + id + "'");
      snap.corridor_extra_mw[it->second] = t.num(r, "capacity_mw");
    }
  }
  return plan;
}

}  // namespace cemkit
