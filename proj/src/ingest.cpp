#include "cemkit/ingest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cemkit/common.h"
#include "csv.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cemkit {
namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("missing or unreadable file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return j;
}

void write_json(const json& j, const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

std::map<int, double> schedule_from_json(const json& j, const std::string& where) {
  std::map<int, double> out;
  if (!j.is_object()) throw SchemaError(where + ": schedule must be a year->value object");
  for (const auto& [key, value] : j.items()) {
    try {
      out[std::stoi(key)] = value.get<double>();
    } catch (const std::exception&) {
      throw SchemaError(where + ": bad schedule entry '" + key + "'");
    }
  }
  return out;
}

json schedule_to_json(const std::map<int, double>& sched) {
  json j = json::object();
  for (const auto& [year, value] : sched) j[std::to_string(year)] = value;
  return j;
}

std::set<std::string> string_set(const json& j) {
  std::set<std::string> out;
  for (const auto& s : j) out.insert(s.get<std::string>());
  return out;
}

CarbonCap cap_from_json(const json& j, const std::string& where) {
  CarbonCap cap;
  const auto& sched = j.at("schedule");
  const double scale = j.value("scale", 1.0);
  if (sched.is_string()) {
    if (sched.get<std::string>() != "net_zero_2050")
      throw SchemaError(where + ": unknown named schedule '" + sched.get<std::string>() + "'");
    for (const auto& [year, mt] : net_zero_co2_schedule_mt())
      cap.schedule_t[year] = mt * 1e6 * scale;  // Mt -> t
  } else {
    for (const auto& [year, value] : schedule_from_json(sched, where))
      cap.schedule_t[year] = value * scale;
  }
  cap.buyout_price = j.at("buyout_price").get<double>();
  if (cap.buyout_price < 0.0) throw SchemaError(where + ": buyout_price must be >= 0");
  for (const auto& [year, v] : cap.schedule_t)
    if (v < 0.0) throw SchemaError(where + ": cap value negative in " + std::to_string(year));
  if (j.contains("regions")) cap.regions = string_set(j["regions"]);
  return cap;
}

json cap_to_json(const CarbonCap& cap) {
  json j;
  j["schedule"] = schedule_to_json(cap.schedule_t);
  j["buyout_price"] = cap.buyout_price;
  if (!cap.regions.empty()) j["regions"] = cap.regions;
  return j;
}

PolicySet policies_from_json(const json& j, const std::string& where) {
  PolicySet p;
  if (j.contains("carbon_cap") && !j["carbon_cap"].is_null())
    p.carbon_cap = cap_from_json(j["carbon_cap"], where + ".carbon_cap");
  if (j.contains("regional_caps"))
    for (const auto& rc : j["regional_caps"]) {
      CarbonCap cap = cap_from_json(rc, where + ".regional_caps");
      if (cap.regions.empty())
        throw SchemaError(where + ": regional cap without regions");
      p.regional_caps.push_back(std::move(cap));
    }
  if (j.contains("ces_rps"))
    for (const auto& ces : j["ces_rps"]) {
      CleanEnergyStandard s;
      s.regions = string_set(ces.at("regions"));
      s.fraction_by_period = schedule_from_json(ces.at("fraction_by_period"),
                                                where + ".ces_rps");
      p.ces_rps.push_back(std::move(s));
    }
  if (j.contains("min_capacity_targets"))
    for (const auto& t : j["min_capacity_targets"]) {
      MinCapacityTarget m;
      m.regions = string_set(t.at("regions"));
      m.techs = string_set(t.at("techs"));
      m.mw_by_period = schedule_from_json(t.at("mw_by_period"),
                                          where + ".min_capacity_targets");
      p.min_capacity_targets.push_back(std::move(m));
    }
  if (j.contains("tax_credits"))
    for (const auto& t : j["tax_credits"]) {
      TaxCredit c;
      c.techs = string_set(t.at("techs"));
      const std::string kind = t.at("kind").get<std::string>();
      if (kind == "itc") c.kind = TaxCreditKind::kItc;
      else if (kind == "ptc") c.kind = TaxCreditKind::kPtc;
      else if (kind == "sequestration") c.kind = TaxCreditKind::kSequestration;
      else throw SchemaError(where + ": unknown tax credit kind '" + kind + "'");
      c.value = t.at("value").get<double>();
      if (c.kind == TaxCreditKind::kItc && (c.value < 0.0 || c.value >= 1.0))
        throw SchemaError(where + ": ITC fraction must be in [0,1)");
      c.window_start_year = t.at("window")[0].get<int>();
      c.window_end_year = t.at("window")[1].get<int>();
      p.tax_credits.push_back(std::move(c));
    }
  return p;
}

json policies_to_json(const PolicySet& p) {
  json j = json::object();
  if (p.carbon_cap) j["carbon_cap"] = cap_to_json(*p.carbon_cap);
  if (!p.regional_caps.empty()) {
    json arr = json::array();
    for (const auto& c : p.regional_caps) arr.push_back(cap_to_json(c));
    j["regional_caps"] = arr;
  }
  if (!p.ces_rps.empty()) {
    json arr = json::array();
    for (const auto& s : p.ces_rps) {
      json e;
      e["regions"] = s.regions;
      e["fraction_by_period"] = schedule_to_json(s.fraction_by_period);
      arr.push_back(e);
    }
    j["ces_rps"] = arr;
  }
  if (!p.min_capacity_targets.empty()) {
    json arr = json::array();
    for (const auto& t : p.min_capacity_targets) {
      json e;
      e["regions"] = t.regions;
      e["techs"] = t.techs;
      e["mw_by_period"] = schedule_to_json(t.mw_by_period);
      arr.push_back(e);
    }
    j["min_capacity_targets"] = arr;
  }
  if (!p.tax_credits.empty()) {
    json arr = json::array();
    for (const auto& c : p.tax_credits) {
      json e;
      e["techs"] = c.techs;
      e["kind"] = c.kind == TaxCreditKind::kItc ? "itc"
                  : c.kind == TaxCreditKind::kPtc ? "ptc" : "sequestration";
      e["value"] = c.value;
      e["window"] = {c.window_start_year, c.window_end_year};
      arr.push_back(e);
    }
    j["tax_credits"] = arr;
  }
  return j;
}

TechClass tech_from_row(const csv::Table& t, int row) {
  TechClass tech;
  tech.name = t.cell(row, "tech");
  tech.fuel = t.cell(row, "fuel");
  tech.heat_rate = t.num(row, "heat_rate");
  tech.is_variable = t.integer(row, "variable") != 0;
  tech.is_firm = t.integer(row, "firm") != 0;
  tech.is_ccs = t.integer(row, "ccs") != 0;
  tech.capture_rate = t.num(row, "capture_rate");
  if (t.integer(row, "uc") != 0) {
    tech.uc.present = true;
    tech.uc.unit_size_mw = t.num(row, "unit_size_mw");
    tech.uc.min_load_fraction = t.num(row, "min_load_fraction");
    tech.uc.ramp_fraction_per_hour = t.num(row, "ramp_fraction");
    tech.uc.min_up_hours = t.integer(row, "min_up_hours");
    tech.uc.min_down_hours = t.integer(row, "min_down_hours");
    tech.uc.startup_cost_per_mw = t.num(row, "startup_cost_per_mw");
  }
  return tech;
}

std::vector<std::string> tech_columns() {
  return {"tech", "fuel", "heat_rate", "variable", "firm", "ccs", "capture_rate",
          "uc", "unit_size_mw", "min_load_fraction", "ramp_fraction",
          "min_up_hours", "min_down_hours", "startup_cost_per_mw"};
}

void append_tech_cells(std::vector<std::string>& row, const TechClass& tech) {
  using csv::format_number;
  row.push_back(tech.name);
  row.push_back(tech.fuel);
  row.push_back(format_number(tech.heat_rate));
  row.push_back(tech.is_variable ? "1" : "0");
  row.push_back(tech.is_firm ? "1" : "0");
  row.push_back(tech.is_ccs ? "1" : "0");
  row.push_back(format_number(tech.capture_rate));
  row.push_back(tech.uc.present ? "1" : "0");
  row.push_back(format_number(tech.uc.unit_size_mw));
  row.push_back(format_number(tech.uc.min_load_fraction));
  row.push_back(format_number(tech.uc.ramp_fraction_per_hour));
  row.push_back(std::to_string(tech.uc.min_up_hours));
  row.push_back(std::to_string(tech.uc.min_down_hours));
  row.push_back(format_number(tech.uc.startup_cost_per_mw));
}

std::vector<double> load_profile_file(const std::string& path, const std::string& key) {
  csv::Table t = csv::Table::read_file(path);
  std::vector<double> cf(t.rows());
  for (int r = 0; r < t.rows(); ++r) {
    if (t.integer(r, "hour") != r)
      throw SchemaError("profiles/" + key + ".csv row " + std::to_string(r + 1) +
                        ": hour column must run 0..n-1");
    cf[r] = t.num(r, "cf");
  }
  return cf;
}

}  // namespace

SystemData load_system(const std::string& directory, int clusters_per_tech_zone) {
  const fs::path dir(directory);
  if (!fs::is_directory(dir))
    throw SchemaError("system directory not found: " + directory);
  SystemData sys;

  // horizon.json: periods, discount rate, financial overrides.
  {
    const json j = read_json((dir / "horizon.json").string());
    if (j.contains("periods")) {
      sys.horizon.periods.clear();
      for (const auto& p : j["periods"]) {
        PlanningPeriod pp;
        pp.label = p.at("label").get<std::string>();
        pp.start_year = p.at("start_year").get<int>();
        pp.end_year = p.at("end_year").get<int>();
        pp.representative_year = p.value("representative_year", pp.end_year);
        pp.demand_scale = p.value("demand_scale", 1.0);
        sys.horizon.periods.push_back(pp);
      }
    } else {
      sys.horizon = default_horizon();
    }
    sys.horizon.discount_rate = j.value("discount_rate", 0.02);
    if (j.contains("financial")) {
      const auto& f = j["financial"];
      sys.financial.wacc_default = f.value("wacc_default", sys.financial.wacc_default);
      sys.financial.discount_rate = f.value("discount_rate", sys.financial.discount_rate);
      sys.financial.unserved_penalty =
          f.value("unserved_penalty", sys.financial.unserved_penalty);
      sys.financial.ptc_transfer_penalty =
          f.value("ptc_transfer_penalty", sys.financial.ptc_transfer_penalty);
      sys.financial.ptc_credit_years =
          f.value("ptc_credit_years", sys.financial.ptc_credit_years);
      sys.financial.amortization_life =
          f.value("amortization_life", sys.financial.amortization_life);
    }
    sys.financial.discount_rate = sys.horizon.discount_rate;
  }

  // zones.csv
  {
    csv::Table t = csv::Table::read_file((dir / "zones.csv").string());
    for (int r = 0; r < t.rows(); ++r) {
      Zone z;
      z.id = t.cell(r, "zone");
      std::istringstream tags(t.cell(r, "region_tags"));
      std::string tag;
      while (std::getline(tags, tag, ';'))
        if (!tag.empty()) z.region_tags.insert(tag);
      sys.zones.push_back(std::move(z));
    }
  }

  // demand.csv: hour column plus one column per zone.
  {
    csv::Table t = csv::Table::read_file((dir / "demand.csv").string());
    sys.hour_count = t.rows();
    for (auto& z : sys.zones) z.demand_mw.resize(sys.hour_count);
    for (int r = 0; r < t.rows(); ++r) {
      if (t.integer(r, "hour") != r)
        throw SchemaError("demand.csv row " + std::to_string(r + 1) +
                          ": hour column must run 0..n-1");
      for (auto& z : sys.zones) z.demand_mw[r] = t.num(r, z.id);
    }
  }

  // fuels.csv: wide price columns per representative year.
  {
    csv::Table t = csv::Table::read_file((dir / "fuels.csv").string());
    std::vector<std::pair<int, std::string>> price_cols;
    for (const auto& col : t.header())
      if (col.rfind("price_", 0) == 0)
        price_cols.emplace_back(std::stoi(col.substr(6)), col);
    for (int r = 0; r < t.rows(); ++r) {
      FuelSpec f;
      f.id = t.cell(r, "fuel");
      f.emission_factor = t.num(r, "emission_factor");
      for (const auto& [year, col] : price_cols)
        f.price_by_period[year] = t.num(r, col);
      sys.fuels.push_back(std::move(f));
    }
  }

  // units.csv -> clustered existing resources.
  {
    csv::Table t = csv::Table::read_file((dir / "units.csv").string());
    std::vector<RawUnitRecord> units;
    for (int r = 0; r < t.rows(); ++r) {
      RawUnitRecord u;
      u.id = t.cell(r, "unit_id");
      u.zone = t.cell(r, "zone");
      u.tech = tech_from_row(t, r);
      u.capacity_mw = t.num(r, "capacity_mw");
      u.heat_rate = u.tech.heat_rate;
      u.fixed_om_per_kw_yr = t.num(r, "fixed_om");
      u.variable_om_per_mwh = t.num(r, "variable_om");
      u.build_year = t.integer(r, "build_year");
      u.lifetime_years = t.integer(r, "lifetime_years");
      u.profile_key = t.cell(r, "profile_key");
      if (!u.tech.fuel.empty() && u.heat_rate <= 0.0)
        throw SchemaError("units.csv row " + std::to_string(r + 1) +
                          ": fueled unit with nonpositive heat rate");
      units.push_back(std::move(u));
    }
    sys.clusters = cluster_units(units, clusters_per_tech_zone);
  }

  // new_build_options.csv -> one buildable cluster per row.
  {
    csv::Table t = csv::Table::read_file((dir / "new_build_options.csv").string());
    for (int r = 0; r < t.rows(); ++r) {
      ResourceCluster c;
      c.id = t.cell(r, "option_id");
      c.zone = t.cell(r, "zone");
      c.tech = tech_from_row(t, r);
      c.new_build_allowed = true;
      c.capex_overnight_per_kw = t.num(r, "capex_overnight");
      c.interconnect_capex_per_kw = t.num(r, "interconnect_capex");
      c.fixed_om_per_kw_yr = t.num(r, "fixed_om");
      c.variable_om_per_mwh = t.num(r, "variable_om");
      c.lifetime_years = t.integer(r, "lifetime_years");
      if (auto mx = t.opt_num(r, "max_new_capacity_mw")) c.max_new_capacity_mw = *mx;
      if (auto w = t.opt_num(r, "wacc_override")) c.wacc_override = w;
      if (auto b = t.opt_num(r, "ptc_bonus_fraction")) c.ptc_bonus_fraction = *b;
      c.profile_key = t.cell(r, "profile_key");
      sys.clusters.push_back(std::move(c));
    }
  }

  // storage.csv
  {
    csv::Table t = csv::Table::read_file((dir / "storage.csv").string());
    for (int r = 0; r < t.rows(); ++r) {
      StorageCluster s;
      s.id = t.cell(r, "storage_id");
      s.zone = t.cell(r, "zone");
      s.power_capex_per_kw = t.num(r, "power_capex");
      s.energy_capex_per_kwh = t.num(r, "energy_capex");
      if (auto d = t.opt_num(r, "duration_fixed_hours")) s.duration_fixed_hours = d;
      s.round_trip_efficiency = t.num(r, "round_trip_efficiency");
      s.existing_power_mw = t.num(r, "existing_power_mw");
      s.existing_energy_mwh = t.num(r, "existing_energy_mwh");
      s.build_year = t.integer(r, "build_year");
      s.lifetime_years = t.integer(r, "lifetime_years");
      s.new_build_allowed = t.integer(r, "new_build_allowed") != 0;
      if (auto mx = t.opt_num(r, "max_new_power_mw")) s.max_new_power_mw = *mx;
      sys.storage.push_back(std::move(s));
    }
  }

  // corridors.csv
  {
    csv::Table t = csv::Table::read_file((dir / "corridors.csv").string());
    for (int r = 0; r < t.rows(); ++r) {
      TransmissionCorridor l;
      l.id = t.cell(r, "corridor_id");
      l.zone_from = t.cell(r, "zone_from");
      l.zone_to = t.cell(r, "zone_to");
      l.existing_capacity_mw = t.num(r, "existing_capacity_mw");
      l.loss_fraction = t.num(r, "loss_fraction");
      l.reinforcement_cost_per_mw_yr = t.num(r, "reinforcement_cost_per_mw_yr");
      l.intra_regional_adder = t.integer(r, "intra_regional_adder") != 0;
      sys.corridors.push_back(std::move(l));
    }
  }

  // hydro_budgets.csv: monthly MWh per (zone, tech) group, split by capacity.
  {
    csv::Table t = csv::Table::read_file((dir / "hydro_budgets.csv").string());
    std::map<std::pair<std::string, std::string>, std::vector<double>> budgets;
    for (int r = 0; r < t.rows(); ++r) {
      const auto key = std::make_pair(t.cell(r, "zone"), t.cell(r, "tech"));
      auto& b = budgets[key];
      if (b.empty()) b.assign(12, 0.0);
      const int month = t.integer(r, "month");
      if (month < 1 || month > 12)
        throw SchemaError("hydro_budgets.csv row " + std::to_string(r + 1) +
                          ": month must be 1..12");
      b[month - 1] = t.num(r, "budget_mwh");
    }
    for (auto& [key, b] : budgets) {
      double group_capacity = 0.0;
      bool found = false;
      for (const auto& c : sys.clusters)
        if (c.zone == key.first && c.tech.name == key.second) {
          group_capacity += c.existing_capacity_mw;
          found = true;
        }
      if (!found)
        throw SchemaError("hydro_budgets.csv: no cluster matches zone '" + key.first +
                          "' tech '" + key.second + "'");
      for (auto& c : sys.clusters) {
        if (c.zone != key.first || c.tech.name != key.second) continue;
        const double share =
            group_capacity > 0.0 ? c.existing_capacity_mw / group_capacity : 1.0;
        c.hydro_monthly_budget_mwh.resize(12);
        for (int m = 0; m < 12; ++m) c.hydro_monthly_budget_mwh[m] = b[m] * share;
      }
    }
    for (const auto& c : sys.clusters)
      if (c.tech.name == "hydro" && c.hydro_monthly_budget_mwh.empty())
        throw SchemaError("hydro cluster '" + c.id + "' has no entry in hydro_budgets.csv");
  }

  // profiles/<key>.csv for variable clusters.
  {
    std::map<std::string, std::vector<double>> cache;
    for (auto& c : sys.clusters) {
      if (!c.tech.is_variable) continue;
      if (c.profile_key.empty())
        throw SchemaError("variable cluster '" + c.id + "' has no profile_key");
      auto it = cache.find(c.profile_key);
      if (it == cache.end()) {
        const std::string path = (dir / "profiles" / (c.profile_key + ".csv")).string();
        it = cache.emplace(c.profile_key, load_profile_file(path, c.profile_key)).first;
      }
      c.profile = it->second;
    }
  }

  sys.policies = policies_from_json(read_json((dir / "policies.json").string()),
                                    "policies.json");
  sys.validate();
  return sys;
}

void write_system(const SystemData& sys, const std::string& directory) {
  using csv::format_number;
  const fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);

  {
    std::vector<std::vector<std::string>> rows{{"zone", "region_tags"}};
    for (const auto& z : sys.zones) {
      std::string tags;
      for (const auto& t : z.region_tags) {
        if (!tags.empty()) tags += ';';
        tags += t;
      }
      rows.push_back({z.id, tags});
    }
    csv::write_file((dir / "zones.csv").string(), rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"hour"};
    for (const auto& z : sys.zones) header.push_back(z.id);
    rows.push_back(header);
    for (int h = 0; h < sys.hour_count; ++h) {
      std::vector<std::string> row{std::to_string(h)};
      for (const auto& z : sys.zones) row.push_back(format_number(z.demand_mw[h]));
      rows.push_back(std::move(row));
    }
    csv::write_file((dir / "demand.csv").string(), rows);
  }
  {
    std::set<int> years;
    for (const auto& f : sys.fuels)
      for (const auto& [year, _] : f.price_by_period) years.insert(year);
    std::vector<std::string> header{"fuel", "emission_factor"};
    for (int y : years) header.push_back("price_" + std::to_string(y));
    std::vector<std::vector<std::string>> rows{header};
    for (const auto& f : sys.fuels) {
      std::vector<std::string> row{f.id, format_number(f.emission_factor)};
      for (int y : years) {
        auto it = f.price_by_period.find(y);
        row.push_back(it == f.price_by_period.end() ? "" : format_number(it->second));
      }
      rows.push_back(std::move(row));
    }
    csv::write_file((dir / "fuels.csv").string(), rows);
  }
  {
    std::vector<std::string> header{"unit_id", "zone"};
    for (const auto& c : tech_columns()) header.push_back(c);
    for (const auto& c : {"capacity_mw", "fixed_om", "variable_om", "build_year",
                          "lifetime_years", "profile_key"})
      header.push_back(c);
    std::vector<std::vector<std::string>> rows{header};
    for (const auto& c : sys.clusters) {
      if (c.existing_capacity_mw <= 0.0) continue;
      // One row per vintage so build years survive the round trip.
      for (const auto& v : c.vintages) {
        std::vector<std::string> row{
            c.vintages.size() == 1 ? c.id : c.id + "__v" + std::to_string(v.build_year),
            c.zone};
        append_tech_cells(row, c.tech);
        row.push_back(format_number(v.capacity_mw));
        row.push_back(format_number(c.fixed_om_per_kw_yr));
        row.push_back(format_number(c.variable_om_per_mwh));
        row.push_back(std::to_string(v.build_year));
        row.push_back(std::to_string(c.lifetime_years));
        row.push_back(c.profile_key);
        rows.push_back(std::move(row));
      }
    }
    csv::write_file((dir / "units.csv").string(), rows);
  }
  {
    std::vector<std::string> header{"option_id", "zone"};
    for (const auto& c : tech_columns()) header.push_back(c);
    for (const auto& c :
         {"capex_overnight", "interconnect_capex", "fixed_om", "variable_om",
          "lifetime_years", "max_new_capacity_mw", "wacc_override",
          "ptc_bonus_fraction", "profile_key"})
      header.push_back(c);
    std::vector<std::vector<std::string>> rows{header};
    for (const auto& c : sys.clusters) {
      if (!c.new_build_allowed) continue;
      std::vector<std::string> row{c.id, c.zone};
      append_tech_cells(row, c.tech);
      row.push_back(format_number(c.capex_overnight_per_kw));
      row.push_back(format_number(c.interconnect_capex_per_kw));
      row.push_back(format_number(c.fixed_om_per_kw_yr));
      row.push_back(format_number(c.variable_om_per_mwh));
      row.push_back(std::to_string(c.lifetime_years));
      row.push_back(c.max_new_capacity_mw < 0.0 ? ""
                                                : format_number(c.max_new_capacity_mw));
      row.push_back(c.wacc_override ? format_number(*c.wacc_override) : "");
      row.push_back(format_number(c.ptc_bonus_fraction));
      row.push_back(c.profile_key);
      rows.push_back(std::move(row));
    }
    csv::write_file((dir / "new_build_options.csv").string(), rows);
  }
  {
    std::vector<std::vector<std::string>> rows{
        {"storage_id", "zone", "power_capex", "energy_capex", "duration_fixed_hours",
         "round_trip_efficiency", "existing_power_mw", "existing_energy_mwh",
         "build_year", "lifetime_years", "new_build_allowed", "max_new_power_mw"}};
    for (const auto& s : sys.storage) {
      rows.push_back({s.id, s.zone, format_number(s.power_capex_per_kw),
                      format_number(s.energy_capex_per_kwh),
                      s.duration_fixed_hours ? format_number(*s.duration_fixed_hours) : "",
                      format_number(s.round_trip_efficiency),
                      format_number(s.existing_power_mw),
                      format_number(s.existing_energy_mwh), std::to_string(s.build_year),
                      std::to_string(s.lifetime_years), s.new_build_allowed ? "1" : "0",
                      s.max_new_power_mw < 0.0 ? "" : format_number(s.max_new_power_mw)});
    }
    csv::write_file((dir / "storage.csv").string(), rows);
  }
  {
    std::vector<std::vector<std::string>> rows{
        {"corridor_id", "zone_from", "zone_to", "existing_capacity_mw", "loss_fraction",
         "reinforcement_cost_per_mw_yr", "intra_regional_adder"}};
    for (const auto& l : sys.corridors) {
      rows.push_back({l.id, l.zone_from, l.zone_to, format_number(l.existing_capacity_mw),
                      format_number(l.loss_fraction),
                      format_number(l.reinforcement_cost_per_mw_yr),
                      l.intra_regional_adder ? "1" : "0"});
    }
    csv::write_file((dir / "corridors.csv").string(), rows);
  }
  {
    std::vector<std::vector<std::string>> rows{{"zone", "tech", "month", "budget_mwh"}};
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& c : sys.clusters) {
      if (c.hydro_monthly_budget_mwh.empty()) continue;
      auto& b = groups[{c.zone, c.tech.name}];
      if (b.empty()) b.assign(12, 0.0);
      for (int m = 0; m < 12; ++m) b[m] += c.hydro_monthly_budget_mwh[m];
    }
    for (const auto& [key, b] : groups)
      for (int m = 0; m < 12; ++m)
        rows.push_back({key.first, key.second, std::to_string(m + 1),
                        format_number(b[m])});
    csv::write_file((dir / "hydro_budgets.csv").string(), rows);
  }
  {
    std::set<std::string> written;
    for (const auto& c : sys.clusters) {
      if (c.profile.empty() || c.profile_key.empty()) continue;
      if (!written.insert(c.profile_key).second) continue;
      std::vector<std::vector<std::string>> rows{{"hour", "cf"}};
      for (size_t h = 0; h < c.profile.size(); ++h)
        rows.push_back({std::to_string(h), format_number(c.profile[h])});
      csv::write_file((dir / "profiles" / (c.profile_key + ".csv")).string(), rows);
    }
  }
  write_json(policies_to_json(sys.policies), (dir / "policies.json").string());
  {
    json j;
    j["discount_rate"] = sys.horizon.discount_rate;
    json periods = json::array();
    for (const auto& p : sys.horizon.periods) {
      json e;
      e["label"] = p.label;
      e["start_year"] = p.start_year;
      e["end_year"] = p.end_year;
      e["representative_year"] = p.representative_year;
      e["demand_scale"] = p.demand_scale;
      periods.push_back(e);
    }
    j["periods"] = periods;
    json f;
    f["wacc_default"] = sys.financial.wacc_default;
    f["discount_rate"] = sys.financial.discount_rate;
    f["unserved_penalty"] = sys.financial.unserved_penalty;
    f["ptc_transfer_penalty"] = sys.financial.ptc_transfer_penalty;
    f["ptc_credit_years"] = sys.financial.ptc_credit_years;
    f["amortization_life"] = sys.financial.amortization_life;
    j["financial"] = f;
    write_json(j, (dir / "horizon.json").string());
  }
}

SystemData apply_scenario_overrides(const SystemData& system, const Scenario& scenario) {
  SystemData out = system;
  for (const auto& ov : scenario.fuel_price_overrides) {
    FuelSpec* fuel = nullptr;
    for (auto& f : out.fuels)
      if (f.id == ov.fuel) fuel = &f;
    if (fuel == nullptr)
      throw SchemaError("scenario '" + scenario.name + "' overrides unknown fuel '" +
                        ov.fuel + "'");
    if (ov.replace) {
      fuel->price_by_period = ov.prices;
    } else {
      for (auto& [year, price] : fuel->price_by_period) price += ov.add;
    }
  }
  if (!scenario.ccs_allowed) {
    for (auto& c : out.clusters)
      if (c.tech.is_ccs) c.new_build_allowed = false;
  }
  if (!scenario.inherit_system_policies) out.policies = scenario.policy_set;
  return out;
}

Scenario load_scenario(const std::string& path) {
  const json j = read_json(path);
  Scenario s;
  s.name = j.value("name", fs::path(path).stem().string());
  s.inherit_system_policies = j.value("inherit_policies", false);
  if (!s.inherit_system_policies)
    s.policy_set = policies_from_json(j.value("policy_set", json::object()),
                                      path + ".policy_set");
  if (j.contains("transmission_expansion_limit")) {
    const auto& t = j["transmission_expansion_limit"];
    if (t.is_string()) {
      const std::string v = t.get<std::string>();
      if (v == "unlimited") {
      } else if (v == "none") {
        s.tx_expansion_none = true;
      } else {
        throw SchemaError(path + ": transmission_expansion_limit must be 'unlimited', "
                          "'none', or a fraction");
      }
    } else {
      const double f = t.get<double>();
      if (f < 0.0 || f > 1.0)
        throw SchemaError(path + ": transmission expansion fraction outside [0,1]");
      s.tx_expansion_limit_fraction = f;
    }
  }
  s.ccs_allowed = j.value("ccs_allowed", true);
  if (j.contains("fuel_price_overrides")) {
    for (const auto& o : j["fuel_price_overrides"]) {
      FuelPriceOverride ov;
      ov.fuel = o.at("fuel").get<std::string>();
      if (o.contains("prices")) {
        ov.replace = true;
        ov.prices = schedule_from_json(o["prices"], path + ".fuel_price_overrides");
      } else {
        ov.add = o.at("add").get<double>();
      }
      s.fuel_price_overrides.push_back(std::move(ov));
    }
  }
  return s;
}

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  j["name"] = s.name;
  if (s.inherit_system_policies) {
    j["inherit_policies"] = true;
  } else {
    j["policy_set"] = policies_to_json(s.policy_set);
  }
  if (s.tx_expansion_none) j["transmission_expansion_limit"] = "none";
  else if (s.tx_expansion_limit_fraction)
    j["transmission_expansion_limit"] = *s.tx_expansion_limit_fraction;
  else j["transmission_expansion_limit"] = "unlimited";
  j["ccs_allowed"] = s.ccs_allowed;
  if (!s.fuel_price_overrides.empty()) {
    json arr = json::array();
    for (const auto& ov : s.fuel_price_overrides) {
      json e;
      e["fuel"] = ov.fuel;
      if (ov.replace) e["prices"] = schedule_to_json(ov.prices);
      else e["add"] = ov.add;
      arr.push_back(e);
    }
    j["fuel_price_overrides"] = arr;
  }
  return j.dump(2) + "\n";
}

void write_scenario(const Scenario& s, const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << scenario_to_json_text(s);
}

Configuration load_configuration(const std::string& path) {
  const json j = read_json(path);
  Configuration c;
  c.name = j.value("name", fs::path(path).stem().string());
  const std::string ret = j.value("retirement", "age_based");
  if (ret == "age_based") c.retirement_mode = RetirementMode::kAgeBased;
  else if (ret == "economic") c.retirement_mode = RetirementMode::kEconomic;
  else throw ConfigError(path + ": retirement must be 'age_based' or 'economic'");
  c.unit_commitment = j.value("unit_commitment", false);
  if (j.contains("weeks")) {
    const auto& w = j["weeks"];
    if (w.is_string() && w.get<std::string>() == "full_52") {
      c.weeks.full_52 = true;
    } else if (w.is_object() && w.contains("sampled")) {
      c.weeks.full_52 = false;
      c.weeks.sampled_n = w["sampled"].get<int>();
      if (c.weeks.sampled_n < 1 || c.weeks.sampled_n > 52)
        throw ConfigError(path + ": sampled week count outside [1,52]");
    } else {
      throw ConfigError(path + ": weeks must be \"full_52\" or {\"sampled\": n}");
    }
  }
  const std::string seq = j.value("sequencing", "myopic");
  if (seq == "myopic") c.sequencing = SequencingMode::kMyopic;
  else if (seq == "foresight") c.sequencing = SequencingMode::kForesight;
  else throw ConfigError(path + ": sequencing must be 'myopic' or 'foresight'");
  c.operational_sim = j.value("operational_sim", false);
  if (c.sequencing == SequencingMode::kForesight && c.weeks.full_52)
    throw ConfigError(path + ": foresight requires sampled weeks");
  return c;
}

std::string configuration_to_json_text(const Configuration& c) {
  json j;
  j["name"] = c.name;
  j["retirement"] = c.retirement_mode == RetirementMode::kAgeBased ? "age_based"
                                                                   : "economic";
  j["unit_commitment"] = c.unit_commitment;
  if (c.weeks.full_52) j["weeks"] = "full_52";
  else j["weeks"] = {{"sampled", c.weeks.sampled_n}};
  j["sequencing"] = c.sequencing == SequencingMode::kMyopic ? "myopic" : "foresight";
  j["operational_sim"] = c.operational_sim;
  return j.dump(2) + "\n";
}

void write_configuration(const Configuration& c, const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << configuration_to_json_text(c);
}

std::vector<std::string> validate_system_directory(const std::string& directory) {
  std::vector<std::string> findings;
  try {
    load_system(directory);
  } catch (const Error& e) {
    findings.push_back(e.what());
  }
  return findings;
}

}  // namespace cemkit
