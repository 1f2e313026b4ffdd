#include "cemkit/ingest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cemkit/common.h"
#include "cemkit/toy_system.h"
#include "doctest.h"

using namespace cemkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cemkit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RawUnitRecord unit(const std::string& id, const std::string& zone, double cap,
                   double hr, double fom, int build_year = 2000) {
  RawUnitRecord u;
  u.id = id;
  u.zone = zone;
  u.tech.name = "gas_cc";
  u.tech.fuel = "gas";
  u.tech.is_firm = true;
  u.tech.heat_rate = hr;
  u.capacity_mw = cap;
  u.heat_rate = hr;
  u.fixed_om_per_kw_yr = fom;
  u.build_year = build_year;
  u.lifetime_years = 40;
  return u;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

}  // namespace

TEST_CASE("toy system loads with expected shape and round-trips bit-identically") {
  SystemData sys = toy::make_system();
  CHECK(sys.zones.size() == 3);
  CHECK(sys.hour_count == 8760);
  CHECK(sys.horizon.periods.size() == 6);

  const fs::path dir1 = temp_dir("roundtrip1");
  write_system(sys, dir1.string());
  SystemData loaded = load_system(dir1.string());
  CHECK(loaded.zones.size() == sys.zones.size());
  CHECK(loaded.clusters.size() == sys.clusters.size());
  CHECK(loaded.hour_count == sys.hour_count);
  // Bit-identical doubles survive the round trip.
  for (size_t z = 0; z < sys.zones.size(); ++z)
    for (int h = 0; h < sys.hour_count; h += 997)
      CHECK(loaded.zones[z].demand_mw[h] == sys.zones[z].demand_mw[h]);

  // write(load(write(x))) is byte-identical to write(x).
  const fs::path dir2 = temp_dir("roundtrip2");
  write_system(loaded, dir2.string());
  for (const auto& entry : fs::recursive_directory_iterator(dir1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir1);
    CAPTURE(rel.string());
    CHECK(slurp(entry.path()) == slurp(dir2 / rel));
  }
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("missing fuels file is reported by name") {
  const fs::path dir = temp_dir("missing_fuels");
  write_system(toy::make_system(), dir.string());
  fs::remove(dir / "fuels.csv");
  CHECK_THROWS_WITH_AS(load_system(dir.string()),
                       doctest::Contains("fuels.csv"), SchemaError);
  fs::remove_all(dir);
}

TEST_CASE("profile length mismatch is a schema error") {
  const fs::path dir = temp_dir("bad_profile");
  write_system(toy::make_system(), dir.string());
  std::ofstream out(dir / "profiles" / "wind_north.csv", std::ios::app);
  out << "8760,0.5\n";
  out.close();
  CHECK_THROWS_AS(load_system(dir.string()), SchemaError);
  fs::remove_all(dir);
}

TEST_CASE("unknown cross-reference is reported with both ids") {
  const fs::path dir = temp_dir("bad_ref");
  write_system(toy::make_system(), dir.string());
  // Point a unit at a nonexistent zone.
  std::string text = slurp(dir / "units.csv");
  const auto pos = text.find("north_coal__v1990,north");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("north_coal__v1990,north").size(),
               "north_coal__v1990,nowhere");
  std::ofstream(dir / "units.csv", std::ios::trunc) << text;
  CHECK_THROWS_WITH_AS(load_system(dir.string()), doctest::Contains("nowhere"),
                       SchemaError);
  fs::remove_all(dir);
}

TEST_CASE("validate_system_directory reports findings without throwing") {
  const fs::path dir = temp_dir("validate");
  write_system(toy::make_system(), dir.string());
  CHECK(validate_system_directory(dir.string()).empty());
  fs::remove(dir / "corridors.csv");
  const auto findings = validate_system_directory(dir.string());
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].find("corridors.csv") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("two identical units merge into one cluster") {
  auto clusters = cluster_units({unit("a", "z1", 100, 7.0, 30), unit("b", "z1", 100, 7.0, 30)}, 1);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].existing_capacity_mw == doctest::Approx(200.0));
  CHECK(clusters[0].tech.heat_rate == doctest::Approx(7.0));
}

TEST_CASE("k-means splits {7,7,10,10} into the optimal 2-partition") {
  std::vector<RawUnitRecord> units = {
      unit("u1", "z1", 120, 7.0, 28.0), unit("u2", "z1", 80, 7.1, 30.0),
      unit("u3", "z1", 150, 10.0, 45.0), unit("u4", "z1", 90, 10.2, 44.0)};
  auto clusters = cluster_units(units, 2);
  REQUIRE(clusters.size() == 2);

  // Brute-force oracle: all 2-partitions, minimizing within-cluster variance
  // of standardized features.
  double mh = 0, mf = 0;
  for (const auto& u : units) { mh += u.heat_rate; mf += u.fixed_om_per_kw_yr; }
  mh /= 4; mf /= 4;
  double sh = 0, sf = 0;
  for (const auto& u : units) {
    sh += (u.heat_rate - mh) * (u.heat_rate - mh);
    sf += (u.fixed_om_per_kw_yr - mf) * (u.fixed_om_per_kw_yr - mf);
  }
  sh = std::sqrt(sh / 4); sf = std::sqrt(sf / 4);
  auto feat = [&](int i) {
    return std::pair<double, double>{(units[i].heat_rate - mh) / sh,
                                     (units[i].fixed_om_per_kw_yr - mf) / sf};
  };
  double best = 1e300;
  int best_mask = 0;
  for (int mask = 1; mask < 15; ++mask) {  // proper nonempty bipartitions
    double cost = 0.0;
    for (int side = 0; side < 2; ++side) {
      double cx = 0, cy = 0;
      int n = 0;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == side) { auto [x, y] = feat(i); cx += x; cy += y; ++n; }
      if (n == 0) { cost = 1e300; break; }
      cx /= n; cy /= n;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == side) {
          auto [x, y] = feat(i);
          cost += (x - cx) * (x - cx) + (y - cy) * (y - cy);
        }
    }
    if (cost < best) { best = cost; best_mask = mask; }
  }
  // The oracle puts {u1,u2} together and {u3,u4} together.
  CHECK((best_mask == 0b0011 || best_mask == 0b1100));
  // And so does cluster_units: the low-heat-rate pair sums to 200 MW.
  std::vector<double> caps = {clusters[0].existing_capacity_mw,
                              clusters[1].existing_capacity_mw};
  std::sort(caps.begin(), caps.end());
  CHECK(caps[0] == doctest::Approx(200.0));
  CHECK(caps[1] == doctest::Approx(240.0));
}

TEST_CASE("k at least the unit count gives one cluster per unit") {
  auto clusters = cluster_units({unit("a", "z1", 100, 7.0, 30), unit("b", "z1", 100, 7.0, 30),
                                 unit("c", "z1", 50, 9.0, 31)},
                                5);
  CHECK(clusters.size() == 3);
}

TEST_CASE("clustering conserves capacity and weighted heat rate") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> cap(10.0, 400.0), hr(6.5, 11.5), fom(15.0, 60.0);
  std::vector<RawUnitRecord> units;
  double total_cap = 0.0, total_hrcap = 0.0;
  for (int i = 0; i < 40; ++i) {
    auto u = unit("u" + std::to_string(i), i % 2 ? "z1" : "z2", cap(rng), hr(rng), fom(rng));
    total_cap += u.capacity_mw;
    total_hrcap += u.capacity_mw * u.heat_rate;
    units.push_back(std::move(u));
  }
  for (int k : {1, 2, 3, 7}) {
    auto clusters = cluster_units(units, k);
    double sum = 0.0, hrsum = 0.0;
    for (const auto& c : clusters) {
      sum += c.existing_capacity_mw;
      hrsum += c.existing_capacity_mw * c.tech.heat_rate;
    }
    CHECK(sum == doctest::Approx(total_cap).epsilon(1e-14));  // exact sum
    CHECK(std::abs(hrsum - total_hrcap) / total_hrcap <= 1e-9);
  }
}

TEST_CASE("empty unit list clusters to empty output") {
  CHECK(cluster_units({}, 3).empty());
}

TEST_CASE("sampling 52 weeks is the identity") {
  SystemData sys = toy::make_system();
  WeekSample s = sample_weeks(sys, 52);
  REQUIRE(s.selected_week_indices.size() == 52);
  for (int w = 0; w < 52; ++w) {
    CHECK(s.selected_week_indices[w] == w + 1);
    CHECK(s.weights[w] == doctest::Approx(1.0));
  }
}

TEST_CASE("week sample weights always sum to 52") {
  SystemData sys = toy::make_system();
  for (int n : {1, 2, 4, 8, 20, 37, 52}) {
    WeekSample s = sample_weeks(sys, n);
    double total = 0.0;
    for (double w : s.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(52.0).epsilon(1e-12));
    CHECK(std::is_sorted(s.selected_week_indices.begin(), s.selected_week_indices.end()));
  }
  CHECK_THROWS_AS(sample_weeks(sys, 0), InvalidParameter);
  CHECK_THROWS_AS(sample_weeks(sys, 53), InvalidParameter);
}

namespace {

// System whose weeks alternate between two archetypes.
SystemData two_archetype_system() {
  SystemData sys = toy::make_system();
  for (auto& z : sys.zones) {
    for (int h = 0; h < sys.hour_count; ++h) {
      const int week = h / (7 * 24);
      const bool high = (week % 2) == 0;
      z.demand_mw[h] = (high ? 500.0 : 250.0) + 40.0 * std::sin(2 * 3.14159265 * (h % 24) / 24.0);
    }
  }
  for (auto& c : sys.clusters) {
    if (!c.tech.is_variable) continue;
    for (int h = 0; h < sys.hour_count; ++h) {
      const int week = h / (7 * 24);
      c.profile[h] = (week % 2) == 0 ? 0.6 : 0.2;
    }
  }
  return sys;
}

}  // namespace

TEST_CASE("identical weeks collapse to a single medoid with weight 52") {
  SystemData sys = toy::make_system();
  for (auto& z : sys.zones)
    for (int h = 0; h < sys.hour_count; ++h)
      z.demand_mw[h] = 300.0 + 50.0 * std::sin(2 * 3.14159265 * (h % 168) / 168.0);
  for (auto& c : sys.clusters)
    if (c.tech.is_variable)
      for (int h = 0; h < sys.hour_count; ++h) c.profile[h] = 0.4;
  WeekSample s = sample_weeks(sys, 1);
  REQUIRE(s.selected_week_indices.size() == 1);
  CHECK(s.weights[0] == doctest::Approx(52.0));
}

TEST_CASE("two week archetypes yield one medoid each with weights 26/26") {
  SystemData sys = two_archetype_system();
  WeekSample s = sample_weeks(sys, 2);
  REQUIRE(s.selected_week_indices.size() == 2);
  CHECK(s.weights[0] == doctest::Approx(26.0));
  CHECK(s.weights[1] == doctest::Approx(26.0));
  // One medoid from each parity class.
  CHECK(s.selected_week_indices[0] % 2 != s.selected_week_indices[1] % 2);
}

TEST_CASE("scenario overrides: fuel price adders and replacement") {
  SystemData sys = toy::make_system();
  Scenario s = toy::current_policies_scenario();
  FuelPriceOverride add;
  add.fuel = "coal";
  add.add = 0.5;
  s.fuel_price_overrides.push_back(add);
  SystemData out = apply_scenario_overrides(sys, s);
  for (const auto& [year, price] : sys.find_fuel("coal")->price_by_period) {
    CHECK(out.fuel_price("coal", year) == doctest::Approx(price + 0.5).epsilon(1e-15));
  }

  Scenario bad = s;
  bad.fuel_price_overrides[0].fuel = "plutonium";
  CHECK_THROWS_AS(apply_scenario_overrides(sys, bad), SchemaError);
}

TEST_CASE("scenario overrides: no-CCS clears new builds; empty override is identity") {
  SystemData sys = toy::make_system();
  Scenario s = toy::net_zero_scenario();
  s.ccs_allowed = false;
  SystemData out = apply_scenario_overrides(sys, s);
  for (const auto& c : out.clusters)
    if (c.tech.is_ccs) CHECK(!c.new_build_allowed);

  Scenario noop = toy::current_policies_scenario();
  SystemData same = apply_scenario_overrides(sys, noop);
  for (size_t i = 0; i < sys.clusters.size(); ++i)
    CHECK(same.clusters[i].new_build_allowed == sys.clusters[i].new_build_allowed);
  for (const auto& f : sys.fuels)
    for (const auto& [year, price] : f.price_by_period)
      CHECK(same.fuel_price(f.id, year) == price);
}

TEST_CASE("scenario and configuration JSON round-trip") {
  const fs::path dir = temp_dir("scencfg");
  Scenario s = toy::net_zero_scenario();
  s.tx_expansion_limit_fraction = 0.15;
  write_scenario(s, (dir / "s.json").string());
  Scenario s2 = load_scenario((dir / "s.json").string());
  CHECK(s2.name == s.name);
  REQUIRE(s2.policy_set.carbon_cap.has_value());
  CHECK(s2.policy_set.carbon_cap->buyout_price == 200.0);
  CHECK(s2.policy_set.carbon_cap->schedule_t.at(2050) == 0.0);
  REQUIRE(s2.tx_expansion_limit_fraction.has_value());
  CHECK(*s2.tx_expansion_limit_fraction == 0.15);

  Configuration c = toy::foresight_config();
  write_configuration(c, (dir / "c.json").string());
  Configuration c2 = load_configuration((dir / "c.json").string());
  CHECK(c2.sequencing == SequencingMode::kForesight);
  CHECK(c2.weeks.sampled_n == 20);

  // Foresight with full weeks violates the configuration vocabulary.
  std::ofstream(dir / "bad.json") << R"({"name":"bad","weeks":"full_52","sequencing":"foresight"})";
  CHECK_THROWS_AS(load_configuration((dir / "bad.json").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("net-zero schedule reproduces the published targets") {
  const auto sched = net_zero_co2_schedule_mt();
  CHECK(sched.at(2027) == 847.0);
  CHECK(sched.at(2030) == 186.0);
  CHECK(sched.at(2035) == 130.0);
  CHECK(sched.at(2040) == 86.7);
  CHECK(sched.at(2045) == 43.3);
  CHECK(sched.at(2050) == 0.0);
}

TEST_CASE("hydro weekly budget scales by calendar month hours") {
  CHECK(month_of_week(1) == 1);
  CHECK(month_of_week(4) == 1);   // middle day 24 is still January
  CHECK(month_of_week(5) == 2);   // middle day 31 is February 1st
  CHECK(month_of_week(52) == 12);
  CHECK(hours_in_month(1) == 744);
  CHECK(hours_in_month(2) == 672);
}
