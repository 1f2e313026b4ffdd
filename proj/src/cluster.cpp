#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/ingest.h"

namespace cemkit {
namespace {

struct Feature {
  double heat_rate;
  double fixed_om;
};

double sq(double v) { return v * v; }

// Builds one ResourceCluster from a set of member units.
ResourceCluster make_cluster(const std::vector<const RawUnitRecord*>& members,
                             const std::string& id) {
  ResourceCluster c;
  c.id = id;
  c.zone = members.front()->zone;
  c.tech = members.front()->tech;
  c.profile_key = members.front()->profile_key;
  c.lifetime_years = members.front()->lifetime_years;
  double cap = 0.0, hr = 0.0, fom = 0.0, vom = 0.0;
  std::map<int, double> by_year;
  for (const RawUnitRecord* u : members) {
    cap += u->capacity_mw;
    hr += u->capacity_mw * u->heat_rate;
    fom += u->capacity_mw * u->fixed_om_per_kw_yr;
    vom += u->capacity_mw * u->variable_om_per_mwh;
    by_year[u->build_year] += u->capacity_mw;
  }
  c.existing_capacity_mw = cap;
  c.tech.heat_rate = cap > 0.0 ? hr / cap : members.front()->heat_rate;
  c.fixed_om_per_kw_yr = cap > 0.0 ? fom / cap : 0.0;
  c.variable_om_per_mwh = cap > 0.0 ? vom / cap : 0.0;
  for (const auto& [year, mw] : by_year) c.vintages.push_back({year, mw});
  c.new_build_allowed = false;
  return c;
}

}  // namespace

std::vector<ResourceCluster> cluster_units(const std::vector<RawUnitRecord>& units,
                                           int clusters_per_tech_zone) {
  if (clusters_per_tech_zone < 1)
    throw InvalidParameter("clusters_per_tech_zone must be >= 1");
  // Group by (zone, tech name), preserving first-appearance order of groups.
  std::vector<std::pair<std::string, std::vector<const RawUnitRecord*>>> groups;
  std::map<std::string, size_t> group_index;
  for (const auto& u : units) {
    if (u.capacity_mw <= 0.0)
      throw SchemaError("unit '" + u.id + "' has nonpositive capacity");
    const std::string key = u.zone + "\t" + u.tech.name;
    auto it = group_index.find(key);
    if (it == group_index.end()) {
      group_index[key] = groups.size();
      groups.push_back({key, {}});
      groups.back().second.push_back(&u);
    } else {
      groups[it->second].second.push_back(&u);
    }
  }

  std::vector<ResourceCluster> out;
  for (auto& [key, members] : groups) {
    const std::string base = members.front()->zone + "_" + members.front()->tech.name;
    const int n = static_cast<int>(members.size());
    const int k = std::min(clusters_per_tech_zone, n);
    if (k >= n) {  // one cluster per unit
      for (int i = 0; i < n; ++i)
        out.push_back(make_cluster({members[i]},
                                   n == 1 ? base : base + "_" + std::to_string(i + 1)));
      continue;
    }

    // Standardize features within the group.
    std::vector<Feature> f(n);
    double mh = 0.0, mf = 0.0;
    for (int i = 0; i < n; ++i) {
      f[i] = {members[i]->heat_rate, members[i]->fixed_om_per_kw_yr};
      mh += f[i].heat_rate;
      mf += f[i].fixed_om;
    }
    mh /= n;
    mf /= n;
    double sh = 0.0, sf = 0.0;
    for (const auto& x : f) {
      sh += sq(x.heat_rate - mh);
      sf += sq(x.fixed_om - mf);
    }
    sh = std::sqrt(sh / n);
    sf = std::sqrt(sf / n);
    for (auto& x : f) {
      x.heat_rate = sh > 0.0 ? (x.heat_rate - mh) / sh : 0.0;
      x.fixed_om = sf > 0.0 ? (x.fixed_om - mf) / sf : 0.0;
    }

    // Initial centroids: the k capacity-largest units, ties by ascending id.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (members[a]->capacity_mw != members[b]->capacity_mw)
        return members[a]->capacity_mw > members[b]->capacity_mw;
      return members[a]->id < members[b]->id;
    });
    std::vector<Feature> centroids;
    for (int i = 0; i < k; ++i) centroids.push_back(f[order[i]]);

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 200; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int best = 0;
        double bestd = kInf;
        for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
          const double d = sq(f[i].heat_rate - centroids[c].heat_rate) +
                           sq(f[i].fixed_om - centroids[c].fixed_om);
          if (d < bestd - 1e-15) {
            bestd = d;
            best = c;
          }
        }
        if (assign[i] != best) {
          assign[i] = best;
          changed = true;
        }
      }
      for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
        double ch = 0.0, cf = 0.0;
        int cnt = 0;
        for (int i = 0; i < n; ++i) {
          if (assign[i] != c) continue;
          ch += f[i].heat_rate;
          cf += f[i].fixed_om;
          ++cnt;
        }
        if (cnt > 0) centroids[c] = {ch / cnt, cf / cnt};
      }
      if (!changed && iter > 0) break;
    }

    int emitted = 0;
    for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
      std::vector<const RawUnitRecord*> sel;
      for (int i = 0; i < n; ++i)
        if (assign[i] == c) sel.push_back(members[i]);
      if (sel.empty()) continue;
      ++emitted;
      out.push_back(make_cluster(sel, base + "_" + std::to_string(emitted)));
    }
    if (emitted == 1) out.back().id = base;
  }
  return out;
}

}  // namespace cemkit
