#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/ingest.h"

namespace cemkit {
namespace {

bool has_tech_substr(const ResourceCluster& c, const char* name) {
  return c.tech.is_variable && c.tech.name.find(name) != std::string::npos;
}

// Feature matrix: one row per week, standardized columns.
std::vector<std::vector<double>> week_features(const SystemData& system) {
  const int weeks = kWeeksPerYear;
  std::vector<std::vector<double>> feat(weeks);

  auto week_hours = [&](int w) {
    const int begin = (w - 1) * kHoursPerWeek;
    return std::pair<int, int>(begin, begin + kHoursPerWeek);
  };

  for (int w = 1; w <= weeks; ++w) {
    auto [b, e] = week_hours(w);
    double mean_load = 0.0, peak_load = 0.0;
    for (int h = b; h < e; ++h) {
      double load = 0.0;
      for (const auto& z : system.zones) load += z.demand_mw[h];
      mean_load += load;
      peak_load = std::max(peak_load, load);
    }
    mean_load /= kHoursPerWeek;
    feat[w - 1] = {mean_load, peak_load};
    for (const auto& zone : system.zones) {
      for (const char* tech : {"wind", "solar"}) {
        double sum = 0.0;
        int count = 0;
        for (const auto& c : system.clusters) {
          if (c.zone != zone.id || !has_tech_substr(c, tech)) continue;
          for (int h = b; h < e; ++h) sum += c.profile[h];
          count += kHoursPerWeek;
        }
        if (count > 0) feat[w - 1].push_back(sum / count);
      }
    }
  }
  // Standardize columns.
  const size_t dims = feat[0].size();
  for (size_t d = 0; d < dims; ++d) {
    double mean = 0.0;
    for (const auto& row : feat) mean += row[d];
    mean /= weeks;
    double var = 0.0;
    for (const auto& row : feat) var += (row[d] - mean) * (row[d] - mean);
    const double sd = std::sqrt(var / weeks);
    for (auto& row : feat) row[d] = sd > 0.0 ? (row[d] - mean) / sd : 0.0;
  }
  return feat;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

WeekSample sample_weeks(const SystemData& system, int n_weeks) {
  if (n_weeks < 1 || n_weeks > kWeeksPerYear)
    throw InvalidParameter("n_weeks must be in [1,52], got " + std::to_string(n_weeks));
  if (system.hour_count < kWeeksPerYear * kHoursPerWeek)
    throw SchemaError("system series are shorter than 52 weeks");

  WeekSample sample;
  if (n_weeks == kWeeksPerYear) {  // identity sampling
    for (int w = 1; w <= kWeeksPerYear; ++w) {
      sample.selected_week_indices.push_back(w);
      sample.weights.push_back(1.0);
    }
    return sample;
  }

  const auto feat = week_features(system);

  // Peak-load order (feature 1 is standardized peak load), ties by index.
  std::vector<int> order(kWeeksPerYear);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return feat[a][1] < feat[b][1]; });
  std::vector<int> medoids;
  for (int i = 0; i < n_weeks; ++i) {
    const int pos = static_cast<int>((i + 0.5) * kWeeksPerYear / n_weeks);
    medoids.push_back(order[std::min(pos, kWeeksPerYear - 1)]);
  }
  std::sort(medoids.begin(), medoids.end());
  medoids.erase(std::unique(medoids.begin(), medoids.end()), medoids.end());

  std::vector<int> assign(kWeeksPerYear, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int w = 0; w < kWeeksPerYear; ++w) {
      int best = 0;
      double bestd = kInf;
      for (size_t m = 0; m < medoids.size(); ++m) {
        const double d = dist2(feat[w], feat[medoids[m]]);
        if (d < bestd - 1e-15) {
          bestd = d;
          best = static_cast<int>(m);
        }
      }
      if (assign[w] != best) {
        assign[w] = best;
        changed = true;
      }
    }
    bool moved = false;
    for (size_t m = 0; m < medoids.size(); ++m) {
      // New medoid: member minimizing total distance to its cluster.
      double best_cost = kInf;
      int best_w = medoids[m];
      for (int cand = 0; cand < kWeeksPerYear; ++cand) {
        if (assign[cand] != static_cast<int>(m)) continue;
        double cost = 0.0;
        for (int w = 0; w < kWeeksPerYear; ++w)
          if (assign[w] == static_cast<int>(m)) cost += dist2(feat[w], feat[cand]);
        if (cost < best_cost - 1e-15 ||
            (cost < best_cost + 1e-15 && cand < best_w)) {
          best_cost = cost;
          best_w = cand;
        }
      }
      if (best_w != medoids[m]) {
        medoids[m] = best_w;
        moved = true;
      }
    }
    if (!changed && !moved && iter > 0) break;
  }

  std::vector<int> counts(medoids.size(), 0);
  for (int w = 0; w < kWeeksPerYear; ++w) counts[assign[w]]++;
  std::vector<std::pair<int, double>> picked;
  for (size_t m = 0; m < medoids.size(); ++m)
    if (counts[m] > 0) picked.emplace_back(medoids[m] + 1, static_cast<double>(counts[m]));
  std::sort(picked.begin(), picked.end());
  for (const auto& [week, weight] : picked) {
    sample.selected_week_indices.push_back(week);
    sample.weights.push_back(weight);
  }
  return sample;
}

}  // namespace cemkit
