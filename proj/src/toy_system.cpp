#include "cemkit/toy_system.h"

#include <cmath>
#include <filesystem>

#include "cemkit/ingest.h"

namespace cemkit::toy {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kDaysCum[13] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334, 365};

int day_of_year(int hour) { return hour / 24; }
int hour_of_day(int hour) { return hour % 24; }

// Evening-shouldered daily demand shape in [0,1].
double daily_shape(int hod) {
  return 0.5 * (1.0 + std::sin(2.0 * kPi * (hod - 9.0) / 24.0));
}

double north_demand(int h) {
  const int doy = day_of_year(h);
  return 330.0 + 80.0 * daily_shape(hour_of_day(h)) +
         45.0 * std::cos(2.0 * kPi * (doy - 10.0) / 365.0) + 12.0 * std::sin(h * 0.91);
}

double south_demand(int h) {
  const int doy = day_of_year(h);
  return 420.0 + 110.0 * daily_shape(hour_of_day(h)) +
         70.0 * std::cos(2.0 * kPi * (doy - 200.0) / 365.0) + 15.0 * std::sin(h * 0.53);
}

double east_demand(int h) {
  const int doy = day_of_year(h);
  return 220.0 + 50.0 * daily_shape(hour_of_day(h)) +
         25.0 * std::cos(2.0 * kPi * (doy - 30.0) / 365.0) + 8.0 * std::sin(h * 1.3);
}

double wind_cf(int h) {
  const int doy = day_of_year(h);
  const double seasonal = 0.32 + 0.14 * std::cos(2.0 * kPi * (doy - 20.0) / 365.0);
  const double gusts = 0.22 * std::sin(h * 0.37 + 0.5) + 0.10 * std::sin(h * 0.113);
  return std::clamp(seasonal + gusts, 0.01, 0.97);
}

double solar_cf(int h) {
  const int hod = hour_of_day(h);
  const int doy = day_of_year(h);
  const double daylight = std::max(0.0, std::sin(kPi * (hod - 6.0) / 12.0));
  const double seasonal = 0.72 + 0.25 * std::cos(2.0 * kPi * (doy - 172.0) / 365.0);
  return std::clamp(0.92 * daylight * seasonal, 0.0, 1.0);
}

TechClass thermal_tech(const std::string& name, const std::string& fuel,
                       double heat_rate, bool ccs, double capture) {
  TechClass t;
  t.name = name;
  t.fuel = fuel;
  t.heat_rate = heat_rate;
  t.is_firm = true;
  t.is_ccs = ccs;
  t.capture_rate = capture;
  return t;
}

TechClass variable_tech(const std::string& name) {
  TechClass t;
  t.name = name;
  t.is_variable = true;
  return t;
}

UnitCommitmentParams uc_params(double unit_mw, double mlf, double ramp, int up, int down,
                               double startup) {
  UnitCommitmentParams u;
  u.present = true;
  u.unit_size_mw = unit_mw;
  u.min_load_fraction = mlf;
  u.ramp_fraction_per_hour = ramp;
  u.min_up_hours = up;
  u.min_down_hours = down;
  u.startup_cost_per_mw = startup;
  return u;
}

}  // namespace

SystemData make_system() {
  SystemData sys;
  sys.hour_count = kHoursPerYear;
  sys.horizon = default_horizon();
  const double growth[6] = {1.0, 1.04, 1.10, 1.17, 1.25, 1.34};
  for (int p = 0; p < 6; ++p) sys.horizon.periods[p].demand_scale = growth[p];

  for (const auto& [id, tag] : std::vector<std::pair<std::string, std::string>>{
           {"north", "west"}, {"south", "west"}, {"east", "east"}}) {
    Zone z;
    z.id = id;
    z.region_tags.insert(tag);
    z.demand_mw.resize(kHoursPerYear);
    for (int h = 0; h < kHoursPerYear; ++h) {
      z.demand_mw[h] = id == "north"   ? north_demand(h)
                       : id == "south" ? south_demand(h)
                                       : east_demand(h);
    }
    sys.zones.push_back(std::move(z));
  }

  {
    FuelSpec coal{"coal", 0.09552, {}};
    FuelSpec gas{"gas", 0.05306, {}};
    FuelSpec hydrogen{"hydrogen", 0.0, {}};
    const int years[6] = {2027, 2030, 2035, 2040, 2045, 2050};
    const double coal_p[6] = {1.9, 1.95, 2.0, 2.05, 2.1, 2.15};
    const double gas_p[6] = {3.6, 3.4, 3.3, 3.3, 3.4, 3.5};
    for (int i = 0; i < 6; ++i) {
      coal.price_by_period[years[i]] = coal_p[i];
      gas.price_by_period[years[i]] = gas_p[i];
      hydrogen.price_by_period[years[i]] = 16.0;
    }
    sys.fuels = {coal, gas, hydrogen};
  }

  std::vector<double> wind_profile(kHoursPerYear), solar_profile(kHoursPerYear);
  for (int h = 0; h < kHoursPerYear; ++h) {
    wind_profile[h] = wind_cf(h);
    solar_profile[h] = solar_cf(h);
  }

  auto existing = [&](const std::string& id, const std::string& zone, TechClass tech,
                      std::vector<Vintage> vintages, int lifetime, double fom,
                      double vom, const std::string& profile_key) {
    ResourceCluster c;
    c.id = id;
    c.zone = zone;
    c.tech = std::move(tech);
    c.vintages = std::move(vintages);
    for (const auto& v : c.vintages) c.existing_capacity_mw += v.capacity_mw;
    c.lifetime_years = lifetime;
    c.fixed_om_per_kw_yr = fom;
    c.variable_om_per_mwh = vom;
    c.profile_key = profile_key;
    if (profile_key == "wind_north") c.profile = wind_profile;
    if (profile_key == "solar_south") c.profile = solar_profile;
    sys.clusters.push_back(std::move(c));
  };

  TechClass coal = thermal_tech("coal", "coal", 10.1, false, 0.0);
  coal.uc = uc_params(70.0, 0.45, 0.3, 3, 2, 110.0);
  existing("north_coal", "north", coal, {{1990, 180.0}, {2003, 140.0}}, 50, 44.0, 4.4, "");

  TechClass gas_cc = thermal_tech("gas_cc", "gas", 7.6, false, 0.0);
  gas_cc.uc = uc_params(90.0, 0.35, 0.6, 2, 1, 75.0);
  existing("south_gas_cc", "south", gas_cc, {{2001, 180.0}, {2012, 260.0}}, 40, 27.0,
           2.3, "");

  TechClass hydro;
  hydro.name = "hydro";
  hydro.is_firm = true;
  existing("east_hydro", "east", hydro, {{1975, 190.0}}, 100, 40.0, 1.0, "");
  {
    const double monthly_cf[12] = {0.35, 0.38, 0.45, 0.52, 0.55, 0.48,
                                   0.40, 0.35, 0.32, 0.33, 0.34, 0.36};
    auto& c = sys.clusters.back();
    c.hydro_monthly_budget_mwh.resize(12);
    for (int m = 0; m < 12; ++m) {
      const int hours = (kDaysCum[m + 1] - kDaysCum[m]) * 24;
      c.hydro_monthly_budget_mwh[m] = 190.0 * hours * monthly_cf[m];
    }
  }

  existing("north_wind", "north", variable_tech("wind"), {{2019, 90.0}}, 30, 33.0, 0.0,
           "wind_north");
  existing("south_solar", "south", variable_tech("solar"), {{2021, 60.0}}, 30, 18.0,
           0.0, "solar_south");

  auto option = [&](const std::string& id, const std::string& zone, TechClass tech,
                    double capex, double interconnect, double fom, double vom,
                    int lifetime, double max_new, const std::string& profile_key) {
    ResourceCluster c;
    c.id = id;
    c.zone = zone;
    c.tech = std::move(tech);
    c.new_build_allowed = true;
    c.capex_overnight_per_kw = capex;
    c.interconnect_capex_per_kw = interconnect;
    c.fixed_om_per_kw_yr = fom;
    c.variable_om_per_mwh = vom;
    c.lifetime_years = lifetime;
    c.max_new_capacity_mw = max_new;
    c.profile_key = profile_key;
    if (profile_key == "wind_north") c.profile = wind_profile;
    if (profile_key == "solar_south") c.profile = solar_profile;
    sys.clusters.push_back(std::move(c));
  };

  option("north_wind_new", "north", variable_tech("wind"), 1250.0, 140.0, 28.0, 0.0, 30,
         400.0, "wind_north");
  option("south_solar_new", "south", variable_tech("solar"), 900.0, 110.0, 17.0, 0.0,
         30, 400.0, "solar_south");

  TechClass gas_ct = thermal_tech("gas_ct", "gas", 10.2, false, 0.0);
  gas_ct.uc = uc_params(50.0, 0.0, 1.0, 1, 1, 0.0);  // fast-start peaker
  option("north_gas_ct_new", "north", gas_ct, 750.0, 40.0, 21.0, 5.0, 30, 300.0, "");

  TechClass h2_ct = thermal_tech("hydrogen_ct", "hydrogen", 9.8, false, 0.0);
  h2_ct.uc = uc_params(50.0, 0.0, 1.0, 1, 1, 0.0);
  option("south_h2_ct_new", "south", h2_ct, 825.0, 45.0, 22.0, 4.0, 30, 250.0, "");

  TechClass ccs = thermal_tech("gas_cc_ccs", "gas", 7.9, true, 0.95);
  ccs.uc = uc_params(90.0, 0.5, 0.5, 1, 1, 90.0);
  option("east_ccs_new", "east", ccs, 2450.0, 180.0, 62.0, 6.5, 30, 300.0, "");

  {
    StorageCluster b;
    b.id = "south_battery";
    b.zone = "south";
    b.power_capex_per_kw = 280.0;
    b.energy_capex_per_kwh = 190.0;
    b.round_trip_efficiency = 0.88;
    b.existing_power_mw = 0.0;
    b.existing_energy_mwh = 0.0;
    b.build_year = 2024;
    b.lifetime_years = 15;
    b.new_build_allowed = true;
    b.max_new_power_mw = 250.0;
    sys.storage.push_back(std::move(b));
  }

  sys.corridors.push_back({"ns", "north", "south", 450.0, 0.02, 28000.0, false});
  sys.corridors.push_back({"se", "south", "east", 350.0, 0.03, 30000.0, true});
  sys.corridors.push_back({"ne", "north", "east", 300.0, 0.025, 26000.0, false});

  // Current policies: IRA-style credits, a western clean-energy standard and
  // a wind build-out floor in the north.
  {
    PolicySet pol;
    TaxCredit ptc;
    ptc.techs = {"wind", "solar"};
    ptc.kind = TaxCreditKind::kPtc;
    ptc.value = 27.50;
    ptc.window_start_year = 2023;
    ptc.window_end_year = 2040;
    pol.tax_credits.push_back(ptc);
    TaxCredit itc;
    itc.techs = {"battery"};
    itc.kind = TaxCreditKind::kItc;
    itc.value = 0.30;
    itc.window_start_year = 2023;
    itc.window_end_year = 2034;
    pol.tax_credits.push_back(itc);
    TaxCredit seq;
    seq.techs = {"gas_cc_ccs"};
    seq.kind = TaxCreditKind::kSequestration;
    seq.value = 85.0;
    seq.window_start_year = 2023;
    seq.window_end_year = 2040;
    pol.tax_credits.push_back(seq);

    CleanEnergyStandard ces;
    ces.regions = {"west"};
    ces.fraction_by_period = {{2027, 0.28}, {2030, 0.32}, {2035, 0.36},
                              {2040, 0.40}, {2045, 0.44}, {2050, 0.48}};
    pol.ces_rps.push_back(ces);

    MinCapacityTarget wind_floor;
    wind_floor.regions = {"north"};
    wind_floor.techs = {"wind"};
    wind_floor.mw_by_period = {{2030, 150.0}};
    pol.min_capacity_targets.push_back(wind_floor);
    sys.policies = pol;
  }

  sys.validate();
  return sys;
}

Scenario current_policies_scenario() {
  Scenario s;
  s.name = "current_policies";
  s.inherit_system_policies = true;
  s.ccs_allowed = true;
  return s;
}

Scenario net_zero_scenario() {
  Scenario s;
  s.name = "net_zero";
  s.ccs_allowed = true;
  CarbonCap cap;
  for (const auto& [year, mt] : net_zero_co2_schedule_mt())
    cap.schedule_t[year] = mt * 1e6 * kNetZeroCapScale;
  cap.buyout_price = 200.0;
  s.policy_set.carbon_cap = cap;
  return s;
}

Configuration base_config() {
  Configuration c;
  c.name = "base";
  return c;
}

Configuration uc_config() {
  Configuration c;
  c.name = "unit_commitment";
  c.unit_commitment = true;
  return c;
}

Configuration economic_retirement_config() {
  Configuration c;
  c.name = "economic_retirement";
  c.retirement_mode = RetirementMode::kEconomic;
  return c;
}

Configuration short_sample_config(int weeks) {
  Configuration c;
  c.name = "short_sample_" + std::to_string(weeks);
  c.weeks.full_52 = false;
  c.weeks.sampled_n = weeks;
  return c;
}

Configuration foresight_config(int weeks) {
  Configuration c;
  c.name = "foresight_" + std::to_string(weeks);
  c.weeks.full_52 = false;
  c.weeks.sampled_n = weeks;
  c.sequencing = SequencingMode::kForesight;
  return c;
}

void write_kit(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  write_system(make_system(), (dir / "system").string());
  write_scenario(current_policies_scenario(),
                 (dir / "scenarios" / "current_policies.json").string());
  write_scenario(net_zero_scenario(), (dir / "scenarios" / "net_zero.json").string());
  write_configuration(base_config(), (dir / "configs" / "base.json").string());
  write_configuration(uc_config(), (dir / "configs" / "unit_commitment.json").string());
  write_configuration(economic_retirement_config(),
                      (dir / "configs" / "economic_retirement.json").string());
  write_configuration(short_sample_config(),
                      (dir / "configs" / "short_sample_20.json").string());
  write_configuration(foresight_config(),
                      (dir / "configs" / "foresight_20.json").string());
}

}  // namespace cemkit::toy
