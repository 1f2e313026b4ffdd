#include "cemkit/system.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "cemkit/common.h"

namespace cemkit {

PlanningHorizon default_horizon() {
  PlanningHorizon h;
  h.discount_rate = 0.02;
  h.periods = {
      {"2024-27", 2024, 2027, 2027, 1.0}, {"2028-30", 2028, 2030, 2030, 1.0},
      {"2031-35", 2031, 2035, 2035, 1.0}, {"2036-40", 2036, 2040, 2040, 1.0},
      {"2041-45", 2041, 2045, 2045, 1.0}, {"2046-50", 2046, 2050, 2050, 1.0},
  };
  return h;
}

std::map<int, double> net_zero_co2_schedule_mt() {
  return {{2027, 847.0}, {2030, 186.0}, {2035, 130.0},
          {2040, 86.7},  {2045, 43.3},  {2050, 0.0}};
}

const Zone* SystemData::find_zone(const std::string& id) const {
  for (const auto& z : zones)
    if (z.id == id) return &z;
  return nullptr;
}

const FuelSpec* SystemData::find_fuel(const std::string& id) const {
  for (const auto& f : fuels)
    if (f.id == id) return &f;
  return nullptr;
}

const ResourceCluster* SystemData::find_cluster(const std::string& id) const {
  for (const auto& c : clusters)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<int> SystemData::zones_in_regions(const std::set<std::string>& regions) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(zones.size()); ++i) {
    const Zone& z = zones[i];
    bool hit = regions.count(z.id) > 0;
    for (const auto& tag : z.region_tags) {
      if (hit) break;
      hit = regions.count(tag) > 0;
    }
    if (hit) out.push_back(i);
  }
  return out;
}

double SystemData::fuel_price(const std::string& fuel_id, int representative_year) const {
  const FuelSpec* f = find_fuel(fuel_id);
  if (f == nullptr) throw SchemaError("unknown fuel id '" + fuel_id + "'");
  auto it = f->price_by_period.find(representative_year);
  if (it == f->price_by_period.end()) {
    throw SchemaError("fuel '" + fuel_id + "' has no price for period year " +
                      std::to_string(representative_year));
  }
  return it->second;
}

double SystemData::emission_intensity(const ResourceCluster& cluster) const {
  const TechClass& t = cluster.tech;
  if (t.heat_rate <= 0.0) return 0.0;
  double factor = t.emission_rate;
  if (!t.fuel.empty()) {
    const FuelSpec* f = find_fuel(t.fuel);
    if (f == nullptr) throw SchemaError("cluster '" + cluster.id + "' references unknown fuel '" + t.fuel + "'");
    factor = f->emission_factor;
  }
  return t.heat_rate * factor * (1.0 - t.capture_rate);
}

void SystemData::validate() const {
  if (hour_count <= 0) throw SchemaError("system has no hours");
  std::set<std::string> zone_ids;
  for (const auto& z : zones) {
    if (!zone_ids.insert(z.id).second)
      throw SchemaError("duplicate zone id '" + z.id + "'");
    if (static_cast<int>(z.demand_mw.size()) != hour_count) {
      throw SchemaError("zone '" + z.id + "' demand series has " +
                        std::to_string(z.demand_mw.size()) + " hours, expected " +
                        std::to_string(hour_count));
    }
  }
  std::set<std::string> cluster_ids;
  const int first_period_year = horizon.periods.empty() ? 9999 : horizon.periods.front().start_year;
  for (const auto& c : clusters) {
    if (!cluster_ids.insert(c.id).second)
      throw SchemaError("duplicate cluster id '" + c.id + "'");
    if (find_zone(c.zone) == nullptr)
      throw SchemaError("cluster '" + c.id + "' references unknown zone '" + c.zone + "'");
    if (!c.tech.fuel.empty() && find_fuel(c.tech.fuel) == nullptr)
      throw SchemaError("cluster '" + c.id + "' references unknown fuel '" + c.tech.fuel + "'");
    if (c.existing_capacity_mw < 0.0 || !std::isfinite(c.existing_capacity_mw))
      throw SchemaError("cluster '" + c.id + "' has invalid capacity");
    if (c.tech.is_variable) {
      if (c.profile.empty())
        throw SchemaError("variable cluster '" + c.id + "' has no capacity-factor profile");
      if (static_cast<int>(c.profile.size()) != hour_count) {
        throw SchemaError("profile for cluster '" + c.id + "' has " +
                          std::to_string(c.profile.size()) + " hours, expected " +
                          std::to_string(hour_count));
      }
      for (double cf : c.profile) {
        if (cf < 0.0 || cf > 1.0 || !std::isfinite(cf))
          throw SchemaError("profile for cluster '" + c.id + "' leaves [0,1]");
      }
    }
    if (c.tech.capture_rate > 0.0 && !c.tech.is_ccs)
      throw SchemaError("cluster '" + c.id + "' has capture_rate > 0 but is not CCS");
    if (c.tech.uc.present) {
      const auto& uc = c.tech.uc;
      if (uc.min_load_fraction < 0.0 || uc.min_load_fraction > 1.0)
        throw SchemaError("cluster '" + c.id + "' min_load_fraction outside [0,1]");
      if (uc.ramp_fraction_per_hour <= 0.0 || uc.ramp_fraction_per_hour > 1.0)
        throw SchemaError("cluster '" + c.id + "' ramp_fraction_per_hour outside (0,1]");
    }
    double vintage_sum = 0.0;
    for (const auto& v : c.vintages) {
      vintage_sum += v.capacity_mw;
      if (c.existing_capacity_mw > 0.0 && v.build_year > first_period_year)
        throw SchemaError("cluster '" + c.id + "' existing vintage built after horizon start");
    }
    if (std::abs(vintage_sum - c.existing_capacity_mw) > 1e-6)
      throw SchemaError("cluster '" + c.id + "' vintage ledger does not sum to capacity");
    if (!c.hydro_monthly_budget_mwh.empty() &&
        c.hydro_monthly_budget_mwh.size() != 12)
      throw SchemaError("cluster '" + c.id + "' hydro budget needs 12 monthly entries");
  }
  std::set<std::string> storage_ids;
  for (const auto& s : storage) {
    if (!storage_ids.insert(s.id).second)
      throw SchemaError("duplicate storage id '" + s.id + "'");
    if (find_zone(s.zone) == nullptr)
      throw SchemaError("storage '" + s.id + "' references unknown zone '" + s.zone + "'");
    if (s.round_trip_efficiency <= 0.0 || s.round_trip_efficiency > 1.0)
      throw SchemaError("storage '" + s.id + "' round_trip_efficiency outside (0,1]");
  }
  std::set<std::pair<std::string, std::string>> corridor_pairs;
  for (const auto& l : corridors) {
    if (l.zone_from == l.zone_to)
      throw SchemaError("corridor '" + l.id + "' connects a zone to itself");
    if (find_zone(l.zone_from) == nullptr || find_zone(l.zone_to) == nullptr)
      throw SchemaError("corridor '" + l.id + "' references an unknown zone");
    if (l.loss_fraction < 0.0 || l.loss_fraction > 0.2)
      throw SchemaError("corridor '" + l.id + "' loss_fraction outside [0,0.2]");
    auto key = std::minmax(l.zone_from, l.zone_to);
    if (!corridor_pairs.insert({key.first, key.second}).second)
      throw SchemaError("duplicate corridor between '" + l.zone_from + "' and '" + l.zone_to + "'");
  }
  for (const auto& f : fuels) {
    for (const auto& [year, price] : f.price_by_period) {
      if (price < 0.0)
        throw SchemaError("fuel '" + f.id + "' has negative price in " + std::to_string(year));
    }
  }
  bool hydrogen_tech = false;
  for (const auto& c : clusters) hydrogen_tech |= (c.tech.fuel == "hydrogen");
  if (hydrogen_tech && find_fuel("hydrogen") == nullptr)
    throw SchemaError("hydrogen technologies exist but fuels.csv has no 'hydrogen' entry");
  if (horizon.periods.empty()) throw SchemaError("horizon has no periods");
  for (size_t i = 0; i < horizon.periods.size(); ++i) {
    const auto& p = horizon.periods[i];
    if (p.end_year < p.start_year)
      throw SchemaError("period '" + p.label + "' ends before it starts");
    if (i > 0 && p.start_year != horizon.periods[i - 1].end_year + 1)
      throw SchemaError("periods '" + horizon.periods[i - 1].label + "' and '" +
                        p.label + "' are not contiguous");
  }
}

namespace {
constexpr int kDaysInMonth[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
}

int month_of_week(int week_1based) {
  // Middle day of the week (day 4 of 7), 0-based day of year.
  const int mid_day = (week_1based - 1) * 7 + 3;
  int day = mid_day;
  for (int m = 0; m < 12; ++m) {
    if (day < kDaysInMonth[m]) return m + 1;
    day -= kDaysInMonth[m];
  }
  return 12;
}

int hours_in_month(int month_1based) { return kDaysInMonth[month_1based - 1] * 24; }

double tx_expansion_bound_mw(double limit_fraction, double start_of_period_capacity_mw) {
  if (limit_fraction < 0.0 || limit_fraction > 1.0)
    throw InvalidParameter("tx expansion limit fraction outside [0,1]");
  return std::max(limit_fraction * start_of_period_capacity_mw, kTxExpansionFloorMw);
}

}  // namespace cemkit
