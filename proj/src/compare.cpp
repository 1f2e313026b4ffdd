#include "cemkit/compare.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv.h"

namespace fs = std::filesystem;

namespace cemkit {

namespace {

std::map<std::string, double> by_tech(const std::map<std::string, double>& by_id,
                                      const std::map<std::string, std::string>& tech_of) {
  std::map<std::string, double> out;
  for (const auto& [id, v] : by_id) {
    auto it = tech_of.find(id);
    out[it != tech_of.end() ? it->second : id] += v;
  }
  return out;
}

double rel_delta(double a, double b) {
  return std::abs(b - a) / std::max(1.0, std::abs(a));
}

}  // namespace

ComparisonReport diff_runs(const std::vector<std::string>& run_dirs) {
  if (run_dirs.size() < 2)
    throw InvalidParameter("diff_runs needs at least two run directories");
  ComparisonReport rep;
  for (const auto& dir : run_dirs) {
    rep.run_names.push_back(fs::path(dir).filename().string());
    rep.runs.push_back(read_run_results(dir));
  }
  const std::string& hash0 = rep.runs.front().manifest.scenario_hash;
  for (size_t i = 1; i < rep.runs.size(); ++i) {
    if (rep.runs[i].manifest.scenario_hash != hash0) {
      throw ComparisonMismatch("runs '" + rep.run_names[0] + "' and '" +
                               rep.run_names[i] + "' have different scenario hashes");
    }
  }
  for (const auto& run : rep.runs) {
    const size_t last = run.capacity_mw.empty() ? 0 : run.capacity_mw.size() - 1;
    rep.capacity_by_tech.push_back(
        run.capacity_mw.empty() ? std::map<std::string, double>{}
                                : by_tech(run.capacity_mw[last], run.tech_of_id));
    rep.generation_by_tech.push_back(
        run.generation_mwh.empty() ? std::map<std::string, double>{}
                                   : by_tech(run.generation_mwh[last], run.tech_of_id));
  }

  for (size_t a = 0; a < rep.runs.size(); ++a) {
    for (size_t b = a + 1; b < rep.runs.size(); ++b) {
      PairDelta d;
      d.run_a = static_cast<int>(a);
      d.run_b = static_cast<int>(b);
      d.npv_abs = rep.runs[b].npv - rep.runs[a].npv;
      d.npv_rel = rel_delta(rep.runs[a].npv, rep.runs[b].npv);
      const size_t nper =
          std::min(rep.runs[a].annual_costs.size(), rep.runs[b].annual_costs.size());
      for (size_t pi = 0; pi < nper; ++pi) {
        d.period_cost_abs.push_back(rep.runs[b].annual_costs[pi].total() -
                                    rep.runs[a].annual_costs[pi].total());
        d.emissions_abs.push_back(rep.runs[b].emissions_t[pi] -
                                  rep.runs[a].emissions_t[pi]);
        d.transmission_abs.push_back(rep.runs[b].transmission_total_mw[pi] -
                                     rep.runs[a].transmission_total_mw[pi]);
      }
      for (size_t pi = 0; pi < nper; ++pi) {
        auto ta = by_tech(rep.runs[a].capacity_mw[pi], rep.runs[a].tech_of_id);
        auto tb = by_tech(rep.runs[b].capacity_mw[pi], rep.runs[b].tech_of_id);
        for (const auto& [tech, v] : ta) {
          const double delta = (tb.count(tech) ? tb[tech] : 0.0) - v;
          auto& slot = d.capacity_delta_by_tech[tech];
          if (std::abs(delta) > std::abs(slot)) slot = delta;
        }
        for (const auto& [tech, v] : tb)
          if (!ta.count(tech)) {
            auto& slot = d.capacity_delta_by_tech[tech];
            if (std::abs(v) > std::abs(slot)) slot = v;
          }
        auto ga = by_tech(rep.runs[a].generation_mwh[pi], rep.runs[a].tech_of_id);
        auto gb = by_tech(rep.runs[b].generation_mwh[pi], rep.runs[b].tech_of_id);
        for (const auto& [tech, v] : ga) {
          const double delta = (gb.count(tech) ? gb[tech] : 0.0) - v;
          auto& slot = d.generation_delta_by_tech[tech];
          if (std::abs(delta) > std::abs(slot)) slot = delta;
        }
      }
      rep.pairs.push_back(std::move(d));
    }
  }
  return rep;
}

HarmonizationOutcome harmonization_check(const ComparisonReport& report,
                                         double tolerance) {
  if (report.runs.size() < 2)
    throw InvalidParameter("harmonization check needs at least two runs");
  HarmonizationOutcome out;
  out.pass = true;
  for (const auto& pair : report.pairs) {
    if (pair.npv_rel > out.max_npv_rel) {
      out.max_npv_rel = pair.npv_rel;
      out.worst_pair = report.run_names[pair.run_a] + " vs " +
                       report.run_names[pair.run_b];
    }
    if (pair.npv_rel > tolerance) out.pass = false;
  }
  if (!out.pass) {
    // Largest-delta cost component across the worst pair.
    double worst = 0.0;
    for (const auto& pair : report.pairs) {
      const auto& a = report.runs[pair.run_a];
      const auto& b = report.runs[pair.run_b];
      const size_t nper = std::min(a.annual_costs.size(), b.annual_costs.size());
      auto component = [&](const char* name, auto getter) {
        double delta = 0.0;
        for (size_t pi = 0; pi < nper; ++pi)
          delta += getter(b.annual_costs[pi]) - getter(a.annual_costs[pi]);
        if (std::abs(delta) > std::abs(worst)) {
          worst = delta;
          out.largest_cost_component = name;
          out.largest_cost_component_delta = delta;
        }
      };
      component("capital_annuity", [](const CostBreakdown& c) { return c.capital_annuity; });
      component("fixed_om", [](const CostBreakdown& c) { return c.fixed_om; });
      component("variable_om", [](const CostBreakdown& c) { return c.variable_om; });
      component("fuel", [](const CostBreakdown& c) { return c.fuel; });
      component("startup", [](const CostBreakdown& c) { return c.startup; });
      component("unserved", [](const CostBreakdown& c) { return c.unserved; });
      component("buyout", [](const CostBreakdown& c) { return c.buyout; });
      component("credits", [](const CostBreakdown& c) { return c.credits; });
    }
    // Largest capacity divergences as leads.
    std::vector<std::pair<double, std::string>> entries;
    for (const auto& pair : report.pairs) {
      for (const auto& [tech, delta] : pair.capacity_delta_by_tech)
        entries.emplace_back(std::abs(delta), tech);
    }
    std::sort(entries.rbegin(), entries.rend());
    for (size_t i = 0; i < std::min<size_t>(3, entries.size()); ++i)
      out.largest_capacity_entries.push_back(entries[i].second);
  }
  return out;
}

void emit_report(const ComparisonReport& report, const HarmonizationOutcome& outcome,
                 const std::string& out_dir) {
  using csv::format_number;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "plots", ec);

  std::ostringstream md;
  md << "# Run comparison\n\n";
  md << "Runs:\n\n";
  for (size_t i = 0; i < report.run_names.size(); ++i) {
    md << "- " << report.run_names[i] << " (config "
       << report.runs[i].manifest.config_name << ", backend "
       << report.runs[i].manifest.backend << "), NPV "
       << format_number(report.runs[i].npv) << "\n";
  }
  md << "\n## Harmonization\n\n";
  md << "- status: " << (outcome.pass ? "PASS" : "FAIL") << "\n";
  md << "- max pairwise NPV delta: " << format_number(outcome.max_npv_rel);
  if (!outcome.worst_pair.empty()) md << " (" << outcome.worst_pair << ")";
  md << "\n";
  if (!outcome.pass) {
    md << "- largest cost component delta: " << outcome.largest_cost_component << " "
       << format_number(outcome.largest_cost_component_delta) << "\n";
    md << "- largest capacity divergences:";
    for (const auto& e : outcome.largest_capacity_entries) md << " " << e;
    md << "\n";
  }
  md << "\n## Pairwise deltas\n\n";
  md << "| pair | NPV delta | NPV delta rel |\n|---|---|---|\n";
  for (const auto& pair : report.pairs) {
    md << "| " << report.run_names[pair.run_a] << " -> "
       << report.run_names[pair.run_b] << " | " << format_number(pair.npv_abs)
       << " | " << format_number(pair.npv_rel) << " |\n";
  }
  md << "\n## Final-period capacity by technology (MW)\n\n| run |";
  std::vector<std::string> techs;
  for (const auto& m : report.capacity_by_tech)
    for (const auto& [tech, _] : m)
      if (std::find(techs.begin(), techs.end(), tech) == techs.end())
        techs.push_back(tech);
  std::sort(techs.begin(), techs.end());
  for (const auto& t : techs) md << " " << t << " |";
  md << "\n|---|";
  for (size_t i = 0; i < techs.size(); ++i) md << "---|";
  md << "\n";
  for (size_t i = 0; i < report.run_names.size(); ++i) {
    md << "| " << report.run_names[i] << " |";
    for (const auto& t : techs) {
      auto it = report.capacity_by_tech[i].find(t);
      md << " " << format_number(it == report.capacity_by_tech[i].end() ? 0.0 : it->second)
         << " |";
    }
    md << "\n";
  }

  // Hash stamp makes distinct reports distinguishable at a glance.
  const std::string body = md.str();
  std::ofstream out(fs::path(out_dir) / "report.md", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report.md under " + out_dir);
  out << body << "\nreport-hash: " << sha256_string(body) << "\n";
  out.close();

  // Plot-ready long format: period, run, metric, value.
  auto write_metric = [&](const std::string& file, const std::string& metric,
                          auto value_of) {
    std::vector<std::vector<std::string>> rows{{"period", "run", "metric", "value"}};
    for (size_t ri = 0; ri < report.runs.size(); ++ri) {
      const auto& run = report.runs[ri];
      for (size_t pi = 0; pi < run.period_labels.size(); ++pi) {
        rows.push_back({run.period_labels[pi], report.run_names[ri], metric,
                        format_number(value_of(run, pi))});
      }
    }
    csv::write_file((fs::path(out_dir) / "plots" / file).string(), rows);
  };
  write_metric("costs.csv", "annual_cost_total",
               [](const RunResults& r, size_t pi) { return r.annual_costs[pi].total(); });
  write_metric("emissions.csv", "emissions_t",
               [](const RunResults& r, size_t pi) { return r.emissions_t[pi]; });
  write_metric("transmission.csv", "transmission_mw",
               [](const RunResults& r, size_t pi) { return r.transmission_total_mw[pi]; });
  write_metric("unserved.csv", "unserved_mwh",
               [](const RunResults& r, size_t pi) { return r.unserved_mwh[pi]; });
  {
    std::vector<std::vector<std::string>> rows{
        {"period", "run", "metric", "tech", "value"}};
    for (size_t ri = 0; ri < report.runs.size(); ++ri) {
      const auto& run = report.runs[ri];
      for (size_t pi = 0; pi < run.capacity_mw.size(); ++pi) {
        auto agg = by_tech(run.capacity_mw[pi], run.tech_of_id);
        for (const auto& [tech, v] : agg)
          rows.push_back({run.period_labels[pi], report.run_names[ri], "capacity_mw",
                          tech, format_number(v)});
      }
      for (size_t pi = 0; pi < run.generation_mwh.size(); ++pi) {
        auto agg = by_tech(run.generation_mwh[pi], run.tech_of_id);
        for (const auto& [tech, v] : agg)
          rows.push_back({run.period_labels[pi], report.run_names[ri],
                          "generation_mwh", tech, format_number(v)});
      }
    }
    csv::write_file((fs::path(out_dir) / "plots" / "mix.csv").string(), rows);
  }
}

}  // namespace cemkit
