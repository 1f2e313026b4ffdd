#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace cemkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : uint8_t { kLe, kEq, kGe };

// Semantic labels carried by every variable and constraint so that a solution
// (or an infeasibility) can be traced back to the system entity, hour and
// period that produced it, and so rows can be re-derived for auditing.
enum class VarKind : uint8_t {
  kGeneric,
  kGen,             // entity = cluster, aux = credit class (vintage bucket)
  kCharge,
  kDischarge,
  kSoc,
  kFlow,            // entity = corridor, aux = 0 forward / 1 reverse
  kUnserved,        // entity = zone
  kNewCap,          // entity = cluster, aux = build period index
  kRetained,        // entity = cluster, aux = vintage bucket or period index
  kStoragePowerNew, // entity = storage, aux = build period index
  kStorageEnergyNew,
  kStorageRetained,
  kTxExpand,        // entity = corridor, aux = period index
  kCommit,
  kStartup,
  kShutdown,
  kCo2Excess,       // entity = cap index (-1 national)
};

enum class RowKind : uint8_t {
  kGeneric,
  kBalance,       // entity = zone
  kGenCap,        // entity = cluster, aux = credit class
  kSocBalance,
  kSocCap,
  kChargeCap,
  kDischargeCap,
  kEnergySlave,   // energy = duration x power
  kFlowCap,       // entity = corridor, aux = direction
  kHydroBudget,   // entity = cluster, aux = week index
  kCommitCap,
  kMinGen,
  kMaxGen,        // gen <= commit
  kRampUp,
  kRampDown,
  kStartupDef,
  kShutdownDef,
  kMinUp,
  kMinDown,
  kCo2Cap,        // entity = cap index (-1 national)
  kCes,           // entity = standard index
  kMinCapTarget,  // entity = target index
  kRetainLink,    // retirement is permanent across periods
  kTxExpandLimit,
};

struct VarTag {
  VarKind kind = VarKind::kGeneric;
  int32_t entity = -1;
  int32_t zone = -1;
  int32_t hour = -1;    // absolute hour of year [0,8760)
  int16_t period = -1;  // horizon period index
  int32_t aux = -1;
};

struct RowTag {
  RowKind kind = RowKind::kGeneric;
  int32_t entity = -1;
  int32_t zone = -1;
  int32_t hour = -1;
  int16_t period = -1;
  int32_t aux = -1;
};

struct Variable {
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
  VarTag tag;
};

// One assembled LP: variables with bounds and objective coefficients, sparse
// constraint rows with sense and right-hand side, and semantic tags. Row
// coefficients are stored row-major in insertion order.
class Problem {
 public:
  int add_variable(double lower, double upper, double objective, VarTag tag = {});
  void begin_row(RowSense sense, double rhs, RowTag tag = {});
  void add_coef(int var, double coef);  // duplicate entries are summed on end_row
  int end_row();
  // Convenience for small/test rows.
  int add_row(RowSense sense, double rhs, const std::vector<std::pair<int, double>>& terms,
              RowTag tag = {});

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(row_rhs_.size()); }
  int64_t num_nonzeros() const { return static_cast<int64_t>(coef_.size()); }

  const Variable& var(int j) const { return vars_[j]; }
  Variable& mutable_var(int j) { return vars_[j]; }
  RowSense row_sense(int i) const { return row_sense_[i]; }
  double row_rhs(int i) const { return row_rhs_[i]; }
  const RowTag& row_tag(int i) const { return row_tags_[i]; }
  // Entries of row i as (column, coefficient) pairs.
  int row_nnz(int i) const { return static_cast<int>(row_start_[i + 1] - row_start_[i]); }
  const int* row_cols(int i) const { return cols_.data() + row_start_[i]; }
  const double* row_coefs(int i) const { return coef_.data() + row_start_[i]; }

  double objective_constant() const { return objective_constant_; }
  void add_objective_constant(double c) { objective_constant_ += c; }

  double row_activity(int i, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;

  std::string var_name(int j) const;
  std::string row_name(int i) const;

  // CPLEX LP text format, variable names taken from tags.
  void write_lp_format(std::ostream& out) const;

  std::string label;

 private:
  std::vector<Variable> vars_;
  std::vector<RowSense> row_sense_;
  std::vector<double> row_rhs_;
  std::vector<RowTag> row_tags_;
  std::vector<int64_t> row_start_{0};
  std::vector<int32_t> cols_;
  std::vector<double> coef_;
  double objective_constant_ = 0.0;
  bool row_open_ = false;
};

const char* var_kind_name(VarKind k);
const char* row_kind_name(RowKind k);

}  // namespace cemkit
