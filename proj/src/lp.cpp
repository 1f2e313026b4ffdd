#include "cemkit/lp.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "cemkit/common.h"

namespace cemkit {

int Problem::add_variable(double lower, double upper, double objective, VarTag tag) {
  if (lower > upper) throw InvalidParameter("variable with lower > upper bound");
  vars_.push_back({lower, upper, objective, tag});
  return static_cast<int>(vars_.size()) - 1;
}

void Problem::begin_row(RowSense sense, double rhs, RowTag tag) {
  if (row_open_) throw InvalidParameter("begin_row while another row is open");
  row_open_ = true;
  row_sense_.push_back(sense);
  row_rhs_.push_back(rhs);
  row_tags_.push_back(tag);
}

void Problem::add_coef(int var, double coef) {
  if (!row_open_) throw InvalidParameter("add_coef without an open row");
  if (var < 0 || var >= num_vars())
    throw InvalidParameter("row references undeclared variable " + std::to_string(var));
  if (coef == 0.0) return;
  cols_.push_back(var);
  coef_.push_back(coef);
}

int Problem::end_row() {
  if (!row_open_) throw InvalidParameter("end_row without an open row");
  row_open_ = false;
  const int64_t begin = row_start_.back();
  int64_t end = static_cast<int64_t>(cols_.size());
  // Merge duplicate columns within the row.
  if (end - begin > 1) {
    std::vector<std::pair<int32_t, double>> entries;
    entries.reserve(end - begin);
    for (int64_t k = begin; k < end; ++k) entries.emplace_back(cols_[k], coef_[k]);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    int64_t w = begin;
    for (size_t k = 0; k < entries.size(); ++k) {
      if (w > begin && cols_[w - 1] == entries[k].first) {
        coef_[w - 1] += entries[k].second;
      } else {
        cols_[w] = entries[k].first;
        coef_[w] = entries[k].second;
        ++w;
      }
    }
    cols_.resize(w);
    coef_.resize(w);
    end = w;
  }
  row_start_.push_back(end);
  return num_rows() - 1;
}

int Problem::add_row(RowSense sense, double rhs,
                     const std::vector<std::pair<int, double>>& terms, RowTag tag) {
  begin_row(sense, rhs, tag);
  for (const auto& [var, coef] : terms) add_coef(var, coef);
  return end_row();
}

double Problem::row_activity(int i, const std::vector<double>& x) const {
  double a = 0.0;
  const int n = row_nnz(i);
  const int* cols = row_cols(i);
  const double* coefs = row_coefs(i);
  for (int k = 0; k < n; ++k) a += coefs[k] * x[cols[k]];
  return a;
}

double Problem::objective_value(const std::vector<double>& x) const {
  double v = objective_constant_;
  for (int j = 0; j < num_vars(); ++j) v += vars_[j].objective * x[j];
  return v;
}

const char* var_kind_name(VarKind k) {
  switch (k) {
    case VarKind::kGeneric: return "x";
    case VarKind::kGen: return "gen";
    case VarKind::kCharge: return "charge";
    case VarKind::kDischarge: return "discharge";
    case VarKind::kSoc: return "soc";
    case VarKind::kFlow: return "flow";
    case VarKind::kUnserved: return "unserved";
    case VarKind::kNewCap: return "new_cap";
    case VarKind::kRetained: return "retained";
    case VarKind::kStoragePowerNew: return "stor_pow_new";
    case VarKind::kStorageEnergyNew: return "stor_ene_new";
    case VarKind::kStorageRetained: return "stor_retained";
    case VarKind::kTxExpand: return "tx_expand";
    case VarKind::kCommit: return "commit";
    case VarKind::kStartup: return "startup";
    case VarKind::kShutdown: return "shutdown";
    case VarKind::kCo2Excess: return "co2_excess";
  }
  return "x";
}

const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::kGeneric: return "r";
    case RowKind::kBalance: return "balance";
    case RowKind::kGenCap: return "gen_cap";
    case RowKind::kSocBalance: return "soc_bal";
    case RowKind::kSocCap: return "soc_cap";
    case RowKind::kChargeCap: return "charge_cap";
    case RowKind::kDischargeCap: return "discharge_cap";
    case RowKind::kEnergySlave: return "energy_slave";
    case RowKind::kFlowCap: return "flow_cap";
    case RowKind::kHydroBudget: return "hydro_budget";
    case RowKind::kCommitCap: return "commit_cap";
    case RowKind::kMinGen: return "min_gen";
    case RowKind::kMaxGen: return "max_gen";
    case RowKind::kRampUp: return "ramp_up";
    case RowKind::kRampDown: return "ramp_dn";
    case RowKind::kStartupDef: return "startup_def";
    case RowKind::kShutdownDef: return "shutdown_def";
    case RowKind::kMinUp: return "min_up";
    case RowKind::kMinDown: return "min_down";
    case RowKind::kCo2Cap: return "co2_cap";
    case RowKind::kCes: return "ces";
    case RowKind::kMinCapTarget: return "min_cap_target";
    case RowKind::kRetainLink: return "retain_link";
    case RowKind::kTxExpandLimit: return "tx_expand_limit";
  }
  return "r";
}

namespace {
template <typename Tag>
std::string tag_name(const char* base, const Tag& t, int index) {
  std::ostringstream os;
  os << base;
  if (t.entity >= 0) os << "_e" << t.entity;
  if (t.zone >= 0) os << "_z" << t.zone;
  if (t.period >= 0) os << "_p" << t.period;
  if (t.hour >= 0) os << "_h" << t.hour;
  if (t.aux >= 0) os << "_a" << t.aux;
  os << "_i" << index;
  return os.str();
}
}  // namespace

std::string Problem::var_name(int j) const {
  return tag_name(var_kind_name(vars_[j].tag.kind), vars_[j].tag, j);
}

std::string Problem::row_name(int i) const {
  return tag_name(row_kind_name(row_tags_[i].kind), row_tags_[i], i);
}

void Problem::write_lp_format(std::ostream& out) const {
  out << "\\ " << (label.empty() ? "cemkit problem" : label) << "\n";
  out << "Minimize\n obj:";
  int written = 0;
  for (int j = 0; j < num_vars(); ++j) {
    const double c = vars_[j].objective;
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : " + ") << std::abs(c) << " " << var_name(j);
    if (++written % 8 == 0) out << "\n ";
  }
  if (written == 0) out << " 0 " << var_name(0);
  out << "\nSubject To\n";
  for (int i = 0; i < num_rows(); ++i) {
    out << " " << row_name(i) << ":";
    const int n = row_nnz(i);
    const int* cols = row_cols(i);
    const double* coefs = row_coefs(i);
    for (int k = 0; k < n; ++k) {
      out << (coefs[k] < 0 ? " - " : " + ") << std::abs(coefs[k]) << " "
          << var_name(cols[k]);
      if ((k + 1) % 8 == 0) out << "\n ";
    }
    switch (row_sense_[i]) {
      case RowSense::kLe: out << " <= "; break;
      case RowSense::kEq: out << " = "; break;
      case RowSense::kGe: out << " >= "; break;
    }
    out << row_rhs_[i] << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < num_vars(); ++j) {
    const auto& v = vars_[j];
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.upper == kInf) {
      out << " " << v.lower << " <= " << var_name(j) << "\n";
    } else {
      out << " " << v.lower << " <= " << var_name(j) << " <= " << v.upper << "\n";
    }
  }
  out << "End\n";
}

}  // namespace cemkit
