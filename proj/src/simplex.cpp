// Bounded-variable revised simplex with a sparse LU basis (Eigen SparseLU),
// product-form eta updates between refactorizations, partial pricing with
// static column-norm scaling, a two-pass ratio test, and a Bland's-rule
// fallback when degenerate pivots pile up. Phase 1 minimizes artificial
// variables; rows whose artificials stay positive form the infeasibility
// certificate.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/solver.h"
#include "solver_internal.h"

namespace cemkit {
namespace {

constexpr double kPivotTol = 1e-8;
constexpr double kFeasTol = 1e-9;
constexpr double kDegenerateStep = 1e-10;
constexpr int kRefactorInterval = 120;
constexpr int kBlandTrigger = 600;
constexpr int kBlandSpan = 3000;

enum class VarStatus : uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

struct Columns {
  // Structural columns in CSC order, then one logical per row, then
  // artificials appended as needed.
  int n_struct = 0;
  int m = 0;
  std::vector<int64_t> start;
  std::vector<int32_t> rows;
  std::vector<double> vals;
  std::vector<int32_t> art_row;   // artificial k -> row
  std::vector<double> art_sign;

  int n_logical_end() const { return n_struct + m; }
  int total() const { return n_struct + m + static_cast<int>(art_row.size()); }
  bool is_logical(int j) const { return j >= n_struct && j < n_struct + m; }
  bool is_artificial(int j) const { return j >= n_struct + m; }

  template <typename Fn>
  void for_each_entry(int j, Fn&& fn) const {
    if (j < n_struct) {
      for (int64_t k = start[j]; k < start[j + 1]; ++k) fn(rows[k], vals[k]);
    } else if (j < n_struct + m) {
      fn(j - n_struct, 1.0);
    } else {
      const int a = j - n_struct - m;
      fn(art_row[a], art_sign[a]);
    }
  }
};

struct Eta {
  int pivot_row;
  std::vector<std::pair<int, double>> entries;  // includes the pivot row entry
};

class SimplexSolver {
 public:
  SimplexSolver(const Problem& p, const SolveSettings& s) : problem_(p), settings_(s) {}

  Solution run();

 private:
  void build_columns();
  void initial_basis();
  void refactorize();
  void compute_basic_values();
  void ftran(std::vector<double>& v);
  void btran(std::vector<double>& v);
  bool price(bool phase1, int& entering, double& direction);
  double reduced_cost(int j, const std::vector<double>& y) const;
  int iterate(bool phase1);  // 0 continue, 1 optimal, 2 unbounded, 3 iter limit
  void set_phase1_costs();
  void set_phase2_costs();
  Solution extract(SolveStatus status);

  const Problem& problem_;
  const SolveSettings& settings_;
  Columns cols_;
  std::vector<double> lb_, ub_, cost_, colscore_;
  std::vector<VarStatus> status_;
  std::vector<int> basis_;        // row -> column
  std::vector<int> basic_pos_;    // column -> row position or -1
  std::vector<double> beta_;      // basic values
  std::vector<double> rhs_;
  std::vector<double> value_;     // nonbasic values (bound they sit at)

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  int scan_offset_ = 0;
  int degenerate_streak_ = 0;
  int bland_left_ = 0;
  int iterations_ = 0;
  int iteration_cap_ = 0;
  std::ostringstream trace_;
};

void SimplexSolver::build_columns() {
  const int n = problem_.num_vars();
  const int m = problem_.num_rows();
  cols_.n_struct = n;
  cols_.m = m;
  // Transpose the row-major problem storage into CSC.
  std::vector<int64_t> count(n + 1, 0);
  for (int i = 0; i < m; ++i) {
    const int nnz = problem_.row_nnz(i);
    const int* c = problem_.row_cols(i);
    for (int k = 0; k < nnz; ++k) count[c[k] + 1]++;
  }
  cols_.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) cols_.start[j + 1] = cols_.start[j] + count[j + 1];
  cols_.rows.resize(cols_.start[n]);
  cols_.vals.resize(cols_.start[n]);
  std::vector<int64_t> fill(cols_.start.begin(), cols_.start.end() - 1);
  for (int i = 0; i < m; ++i) {
    const int nnz = problem_.row_nnz(i);
    const int* c = problem_.row_cols(i);
    const double* v = problem_.row_coefs(i);
    for (int k = 0; k < nnz; ++k) {
      const int64_t pos = fill[c[k]]++;
      cols_.rows[pos] = i;
      cols_.vals[pos] = v[k];
    }
  }

  lb_.assign(n + m, 0.0);
  ub_.assign(n + m, 0.0);
  cost_.assign(n + m, 0.0);
  rhs_.assign(m, 0.0);
  for (int j = 0; j < n; ++j) {
    lb_[j] = problem_.var(j).lower;
    ub_[j] = problem_.var(j).upper;
    cost_[j] = problem_.var(j).objective;
  }
  for (int i = 0; i < m; ++i) {
    rhs_[i] = problem_.row_rhs(i);
    const int J = n + i;
    switch (problem_.row_sense(i)) {
      case RowSense::kLe: lb_[J] = 0.0; ub_[J] = kInf; break;
      case RowSense::kGe: lb_[J] = -kInf; ub_[J] = 0.0; break;
      case RowSense::kEq: lb_[J] = 0.0; ub_[J] = 0.0; break;
    }
  }
  colscore_.assign(n + m, 1.0);
  for (int j = 0; j < n; ++j) {
    double s = 1.0;
    for (int64_t k = cols_.start[j]; k < cols_.start[j + 1]; ++k)
      s += cols_.vals[k] * cols_.vals[k];
    colscore_[j] = s;
  }
  for (int j = n; j < n + m; ++j) colscore_[j] = 2.0;
}

void SimplexSolver::initial_basis() {
  const int n = cols_.n_struct;
  const int m = cols_.m;
  status_.assign(n + m, VarStatus::kAtLower);
  value_.assign(n + m, 0.0);
  for (int j = 0; j < n + m; ++j) {
    if (lb_[j] == -kInf && ub_[j] == kInf) {
      status_[j] = VarStatus::kFreeZero;
      value_[j] = 0.0;
    } else if (lb_[j] == -kInf) {
      status_[j] = VarStatus::kAtUpper;
      value_[j] = ub_[j];
    } else if (std::abs(lb_[j]) <= std::abs(ub_[j]) || ub_[j] == kInf) {
      status_[j] = VarStatus::kAtLower;
      value_[j] = lb_[j];
    } else {
      status_[j] = VarStatus::kAtUpper;
      value_[j] = ub_[j];
    }
  }
  // Residual of each row with all variables at their starting values.
  std::vector<double> residual(rhs_);
  for (int j = 0; j < n; ++j) {
    if (value_[j] == 0.0) continue;
    for (int64_t k = cols_.start[j]; k < cols_.start[j + 1]; ++k)
      residual[cols_.rows[k]] -= cols_.vals[k] * value_[j];
  }
  basis_.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    const int logical = n + i;
    const double r = residual[i];
    const bool fits = (r >= lb_[logical] - kFeasTol) && (r <= ub_[logical] + kFeasTol);
    if (fits) {
      basis_[i] = logical;
    } else {
      cols_.art_row.push_back(i);
      cols_.art_sign.push_back(r >= 0.0 ? 1.0 : -1.0);
      const int art = n + m + static_cast<int>(cols_.art_row.size()) - 1;
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      colscore_.push_back(2.0);
      status_.push_back(VarStatus::kAtLower);
      value_.push_back(0.0);
      basis_[i] = art;
    }
  }
  basic_pos_.assign(cols_.total(), -1);
  for (int i = 0; i < m; ++i) {
    basic_pos_[basis_[i]] = i;
    status_[basis_[i]] = VarStatus::kBasic;
  }
}

void SimplexSolver::refactorize() {
  const int m = cols_.m;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m * 4);
  for (int i = 0; i < m; ++i) {
    cols_.for_each_entry(basis_[i], [&](int row, double v) {
      trips.emplace_back(row, i, v);
    });
  }
  Eigen::SparseMatrix<double> B(m, m);
  B.setFromTriplets(trips.begin(), trips.end());
  lu_.compute(B);
  if (lu_.info() != Eigen::Success) {
    throw SolveError("simplex basis factorization failed at iteration " +
                     std::to_string(iterations_));
  }
  etas_.clear();
  pivots_since_refactor_ = 0;
}

void SimplexSolver::compute_basic_values() {
  const int m = cols_.m;
  std::vector<double> residual(rhs_);
  for (int j = 0; j < cols_.total(); ++j) {
    if (status_[j] == VarStatus::kBasic || value_[j] == 0.0) continue;
    cols_.for_each_entry(j, [&](int row, double v) { residual[row] -= v * value_[j]; });
  }
  ftran(residual);
  beta_.assign(residual.begin(), residual.end());
  // Basic positions map row position -> value; beta_[i] is the value of
  // basis_[i].
  (void)m;
}

void SimplexSolver::ftran(std::vector<double>& v) {
  Eigen::Map<Eigen::VectorXd> mv(v.data(), v.size());
  Eigen::VectorXd out = lu_.solve(mv);
  std::copy(out.data(), out.data() + out.size(), v.begin());
  for (const Eta& e : etas_) {
    double& vr = v[e.pivot_row];
    double wr = 0.0;
    for (const auto& [i, w] : e.entries)
      if (i == e.pivot_row) { wr = w; break; }
    vr /= wr;
    for (const auto& [i, w] : e.entries)
      if (i != e.pivot_row) v[i] -= w * vr;
  }
}

void SimplexSolver::btran(std::vector<double>& v) {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const Eta& e = *it;
    double dot = 0.0;
    double wr = 0.0;
    for (const auto& [i, w] : e.entries) {
      if (i == e.pivot_row) wr = w;
      else dot += w * v[i];
    }
    v[e.pivot_row] = (v[e.pivot_row] - dot) / wr;
  }
  Eigen::Map<Eigen::VectorXd> mv(v.data(), v.size());
  Eigen::VectorXd out = lu_.adjoint().solve(mv);
  std::copy(out.data(), out.data() + out.size(), v.begin());
}

double SimplexSolver::reduced_cost(int j, const std::vector<double>& y) const {
  double z = cost_[j];
  cols_.for_each_entry(j, [&](int row, double v) { z -= y[row] * v; });
  return z;
}

bool SimplexSolver::price(bool phase1, int& entering, double& direction) {
  // y = B^-T c_B, then scan a rotating window for the best scaled candidate.
  const int m = cols_.m;
  std::vector<double> y(m, 0.0);
  for (int i = 0; i < m; ++i) y[i] = cost_[basis_[i]];
  btran(y);

  const int total = cols_.total();
  const double tol = std::max(settings_.optimality_tol * 0.1, 1e-9);
  const bool bland = bland_left_ > 0;
  const int window = bland ? total : std::max(1024, total / 16);

  entering = -1;
  direction = 0.0;
  double best_score = 0.0;
  int scanned = 0;
  int found = 0;
  for (int step = 0; step < total; ++step) {
    const int j = (scan_offset_ + step) % total;
    if (status_[j] == VarStatus::kBasic) continue;
    if (lb_[j] == ub_[j]) continue;  // fixed, never enters
    ++scanned;
    const double z = reduced_cost(j, y);
    double dir = 0.0;
    if (status_[j] == VarStatus::kAtLower && z < -tol) dir = 1.0;
    else if (status_[j] == VarStatus::kAtUpper && z > tol) dir = -1.0;
    else if (status_[j] == VarStatus::kFreeZero && std::abs(z) > tol) dir = z < 0 ? 1.0 : -1.0;
    if (dir == 0.0) continue;
    ++found;
    if (bland) {  // lowest index rule: first eligible in natural order
      if (entering < 0 || j < entering) { entering = j; direction = dir; }
      continue;
    }
    const double score = z * z / colscore_[j];
    if (score > best_score) {
      best_score = score;
      entering = j;
      direction = dir;
    }
    if (found >= 1 && scanned >= window) break;
  }
  if (!bland) scan_offset_ = (scan_offset_ + std::max(1, scanned)) % total;
  (void)phase1;
  return entering >= 0;
}

int SimplexSolver::iterate(bool phase1) {
  int entering;
  double dir;
  if (!price(phase1, entering, dir)) return 1;  // optimal for this phase

  // FTRAN the entering column.
  const int m = cols_.m;
  std::vector<double> w(m, 0.0);
  cols_.for_each_entry(entering, [&](int row, double v) { w[row] += v; });
  ftran(w);

  // Ratio test along x_entering moving by dir.
  const double range = (ub_[entering] == kInf || lb_[entering] == -kInf)
                           ? kInf
                           : ub_[entering] - lb_[entering];
  double theta_max = range;  // bound flip distance
  int leaving_pos = -1;
  bool leaving_to_upper = false;

  // Pass 1: minimum ratio with a feasibility cushion.
  double theta1 = theta_max;
  for (int i = 0; i < m; ++i) {
    const double wi = dir * w[i];
    if (std::abs(wi) < kPivotTol) continue;
    const int bj = basis_[i];
    if (wi > 0) {
      if (lb_[bj] == -kInf) continue;
      const double t = (beta_[i] - lb_[bj] + kFeasTol) / wi;
      theta1 = std::min(theta1, t);
    } else {
      if (ub_[bj] == kInf) continue;
      const double t = (beta_[i] - ub_[bj] - kFeasTol) / wi;
      theta1 = std::min(theta1, t);
    }
  }
  if (theta1 == kInf) return 2;  // unbounded direction

  // Pass 2: the true minimum ratio among breakpoints within the pass-1
  // cushion, then take the largest pivot among near-ties (Bland mode: the
  // lowest basic column index).
  const bool bland = bland_left_ > 0;
  double theta = kInf;
  for (int i = 0; i < m; ++i) {
    const double wi = dir * w[i];
    if (std::abs(wi) < kPivotTol) continue;
    const int bj = basis_[i];
    double t;
    if (wi > 0) {
      if (lb_[bj] == -kInf) continue;
      t = (beta_[i] - lb_[bj]) / wi;
    } else {
      if (ub_[bj] == kInf) continue;
      t = (beta_[i] - ub_[bj]) / wi;
    }
    if (t > theta1) continue;
    theta = std::min(theta, std::max(t, 0.0));
  }
  if (theta <= theta_max) {
    double best_pivot = 0.0;
    for (int i = 0; i < m; ++i) {
      const double wi = dir * w[i];
      if (std::abs(wi) < kPivotTol) continue;
      const int bj = basis_[i];
      double t;
      bool to_upper;
      if (wi > 0) {
        if (lb_[bj] == -kInf) continue;
        t = (beta_[i] - lb_[bj]) / wi;
        to_upper = false;
      } else {
        if (ub_[bj] == kInf) continue;
        t = (beta_[i] - ub_[bj]) / wi;
        to_upper = true;
      }
      if (std::max(t, 0.0) > theta + 1e-12) continue;
      if (bland) {
        if (leaving_pos < 0 || basis_[i] < basis_[leaving_pos]) {
          leaving_pos = i;
          leaving_to_upper = to_upper;
        }
      } else if (std::abs(wi) > best_pivot) {
        best_pivot = std::abs(wi);
        leaving_pos = i;
        leaving_to_upper = to_upper;
      }
    }
  }

  if (leaving_pos < 0) {
    // Bound flip: entering variable crosses to its other bound.
    if (range == kInf) return 2;
    for (int i = 0; i < m; ++i) beta_[i] -= range * dir * w[i];
    if (status_[entering] == VarStatus::kAtLower) {
      status_[entering] = VarStatus::kAtUpper;
      value_[entering] = ub_[entering];
    } else {
      status_[entering] = VarStatus::kAtLower;
      value_[entering] = lb_[entering];
    }
    ++iterations_;
    return 0;
  }

  theta = std::max(theta, 0.0);
  if (theta < kDegenerateStep) {
    if (++degenerate_streak_ > kBlandTrigger && bland_left_ == 0) {
      bland_left_ = kBlandSpan;
      trace_ << "bland fallback at iteration " << iterations_ << "\n";
    }
  } else {
    degenerate_streak_ = 0;
  }
  if (bland_left_ > 0) --bland_left_;

  // Apply the pivot.
  const int leaving = basis_[leaving_pos];
  for (int i = 0; i < m; ++i) beta_[i] -= theta * dir * w[i];
  const double enter_from =
      status_[entering] == VarStatus::kAtUpper ? ub_[entering]
      : status_[entering] == VarStatus::kFreeZero ? 0.0 : lb_[entering];
  const double enter_value = enter_from + dir * theta;

  status_[leaving] = leaving_to_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
  value_[leaving] = leaving_to_upper ? ub_[leaving] : lb_[leaving];
  basic_pos_[leaving] = -1;
  basis_[leaving_pos] = entering;
  basic_pos_[entering] = leaving_pos;
  status_[entering] = VarStatus::kBasic;
  beta_[leaving_pos] = enter_value;

  Eta eta;
  eta.pivot_row = leaving_pos;
  for (int i = 0; i < m; ++i)
    if (w[i] != 0.0) eta.entries.emplace_back(i, w[i]);
  etas_.push_back(std::move(eta));

  ++iterations_;
  if (++pivots_since_refactor_ >= kRefactorInterval) {
    refactorize();
    compute_basic_values();
  }
  return 0;
}

void SimplexSolver::set_phase1_costs() {
  std::fill(cost_.begin(), cost_.end(), 0.0);
  for (size_t a = 0; a < cols_.art_row.size(); ++a)
    cost_[cols_.n_struct + cols_.m + a] = 1.0;
}

void SimplexSolver::set_phase2_costs() {
  for (int j = 0; j < cols_.n_struct; ++j) cost_[j] = problem_.var(j).objective;
  for (int j = cols_.n_struct; j < cols_.total(); ++j) cost_[j] = 0.0;
  // Fix artificials at zero so they can never re-enter.
  for (size_t a = 0; a < cols_.art_row.size(); ++a) {
    const int j = cols_.n_struct + cols_.m + static_cast<int>(a);
    ub_[j] = 0.0;
  }
}

Solution SimplexSolver::extract(SolveStatus status) {
  Solution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.note = trace_.str();
  const int n = cols_.n_struct;
  const int m = cols_.m;
  sol.x.assign(n, 0.0);
  if (status == SolveStatus::kInfeasible) {
    for (size_t a = 0; a < cols_.art_row.size(); ++a) {
      const int j = n + m + static_cast<int>(a);
      const int pos = basic_pos_[j];
      const double v = pos >= 0 ? beta_[pos] : value_[j];
      if (v > 1e-7) sol.infeasible_rows.push_back(cols_.art_row[a]);
    }
    return sol;
  }
  std::vector<double> full(cols_.total(), 0.0);
  for (int j = 0; j < cols_.total(); ++j)
    if (status_[j] != VarStatus::kBasic) full[j] = value_[j];
  for (int i = 0; i < m; ++i) full[basis_[i]] = beta_[i];
  for (int j = 0; j < n; ++j) sol.x[j] = full[j];

  if (status == SolveStatus::kOptimal) {
    std::vector<double> y(m, 0.0);
    for (int i = 0; i < m; ++i) y[i] = cost_[basis_[i]];
    btran(y);
    sol.y.assign(m, 0.0);
    for (int i = 0; i < m; ++i) sol.y[i] = -y[i];  // kit dual convention
    sol.reduced_costs.assign(n, 0.0);
    for (int j = 0; j < n; ++j) sol.reduced_costs[j] = reduced_cost(j, y);
    sol.objective = problem_.objective_value(sol.x);
  }
  return sol;
}

Solution SimplexSolver::run() {
  if (problem_.num_vars() == 0) {
    Solution sol;
    sol.status = SolveStatus::kOptimal;
    sol.objective = problem_.objective_constant();
    return sol;
  }
  build_columns();
  initial_basis();
  iteration_cap_ = settings_.max_iterations > 0
                       ? settings_.max_iterations
                       : 50000 + 60 * cols_.m;
  refactorize();
  compute_basic_values();

  // Phase 1: drive artificials to zero.
  if (!cols_.art_row.empty()) {
    set_phase1_costs();
    while (true) {
      if (iterations_ >= iteration_cap_) return extract(SolveStatus::kIterationLimit);
      const int rc = iterate(true);
      if (rc == 1) break;
      if (rc == 2) break;  // phase-1 objective is bounded below; treat as done
    }
    double infeas = 0.0;
    for (size_t a = 0; a < cols_.art_row.size(); ++a) {
      const int j = cols_.n_struct + cols_.m + static_cast<int>(a);
      const int pos = basic_pos_[j];
      infeas += pos >= 0 ? std::max(0.0, beta_[pos]) : value_[j];
    }
    if (infeas > 1e-6) return extract(SolveStatus::kInfeasible);
  }

  set_phase2_costs();
  refactorize();
  compute_basic_values();
  while (true) {
    if (iterations_ >= iteration_cap_) return extract(SolveStatus::kIterationLimit);
    const int rc = iterate(false);
    if (rc == 1) break;
    if (rc == 2) return extract(SolveStatus::kUnbounded);
  }
  // Fresh factorization for clean final values and duals.
  refactorize();
  compute_basic_values();
  return extract(SolveStatus::kOptimal);
}

}  // namespace

Solution solve_simplex(const Problem& problem, const SolveSettings& settings) {
  SimplexSolver solver(problem, settings);
  return solver.run();
}

Solution reference_solve(const Problem& problem, const SolveSettings& settings) {
  if (problem.num_nonzeros() > settings.reference_nonzero_cap) {
    throw SolveError(
        "reference solver refuses " + std::to_string(problem.num_nonzeros()) +
        " nonzeros (cap " + std::to_string(settings.reference_nonzero_cap) +
        "); use the interior-point backend");
  }
  return solve_simplex(problem, settings);
}

}  // namespace cemkit
