// Primal-dual interior-point LP solver (Mehrotra predictor-corrector, no
// crossover). The problem is brought to the form
//   min c'x  s.t.  A x = b,  0 <= x,  x_i <= r_i for ranged columns,
// and each Newton step solves the normal equations A D A' dy = rhs with a
// sparse LDLT whose pattern is analyzed once. Columns touching many rows
// (investment variables spanning thousands of dispatch hours) are split into
// equality-chained copies first so the normal-equations fill stays local.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/solver.h"
#include "solver_internal.h"

namespace cemkit {
namespace {

constexpr int kSplitChunk = 64;       // rows per copy after splitting
constexpr int kSplitThreshold = 192;  // columns denser than this get split

struct InternalModel {
  int m = 0;  // rows of the original problem (chain rows appended after)
  int n = 0;
  // CSC of the internal matrix.
  std::vector<int64_t> col_start;
  std::vector<int32_t> row_idx;
  std::vector<double> val;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> range;  // upper range, kInf when none
  double c0 = 0.0;

  int total_rows = 0;  // m + chain rows

  // Recovery of original variables: x_orig[j] = shift + sign * mean(copies).
  struct VarMap {
    double shift = 0.0;
    double sign = 1.0;
    int first_col = -1;
    int num_copies = 0;   // 0 = fixed variable (value == shift)
    int neg_col = -1;     // second column of a free split
  };
  std::vector<VarMap> vmap;
};

void append_column(InternalModel& mdl, const std::vector<std::pair<int, double>>& entries,
                   double cost, double range) {
  for (const auto& [r, v] : entries) {
    mdl.row_idx.push_back(r);
    mdl.val.push_back(v);
  }
  mdl.col_start.push_back(static_cast<int64_t>(mdl.row_idx.size()));
  mdl.c.push_back(cost);
  mdl.range.push_back(range);
  ++mdl.n;
}

InternalModel build_model(const Problem& p) {
  InternalModel mdl;
  const int m = p.num_rows();
  const int n = p.num_vars();
  mdl.m = m;
  mdl.b.assign(m, 0.0);
  for (int i = 0; i < m; ++i) mdl.b[i] = p.row_rhs(i);
  mdl.c0 = p.objective_constant();
  mdl.col_start.push_back(0);
  mdl.vmap.resize(n);

  // Original columns in CSC order.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (int i = 0; i < m; ++i) {
    const int nnz = p.row_nnz(i);
    const int* cc = p.row_cols(i);
    const double* vv = p.row_coefs(i);
    for (int k = 0; k < nnz; ++k) cols[cc[k]].emplace_back(i, vv[k]);
  }

  std::vector<std::pair<int, double>> buf;
  for (int j = 0; j < n; ++j) {
    const double lb = p.var(j).lower;
    const double ub = p.var(j).upper;
    const double cj = p.var(j).objective;
    auto& vm = mdl.vmap[j];
    if (lb == ub) {  // fixed: fold into rhs and constant
      vm.shift = lb;
      vm.num_copies = 0;
      if (lb != 0.0) {
        for (const auto& [r, v] : cols[j]) mdl.b[r] -= v * lb;
        mdl.c0 += cj * lb;
      }
      continue;
    }
    if (lb != -kInf) {  // x = lb + xhat
      vm.shift = lb;
      vm.sign = 1.0;
      if (lb != 0.0) {
        for (const auto& [r, v] : cols[j]) mdl.b[r] -= v * lb;
        mdl.c0 += cj * lb;
      }
      vm.first_col = mdl.n;
      vm.num_copies = 1;
      append_column(mdl, cols[j], cj, ub == kInf ? kInf : ub - lb);
    } else if (ub != kInf) {  // x = ub - xhat
      vm.shift = ub;
      vm.sign = -1.0;
      if (ub != 0.0) {
        for (const auto& [r, v] : cols[j]) mdl.b[r] -= v * ub;
        mdl.c0 += cj * ub;
      }
      buf = cols[j];
      for (auto& e : buf) e.second = -e.second;
      vm.first_col = mdl.n;
      vm.num_copies = 1;
      append_column(mdl, buf, -cj, kInf);
    } else {  // free: x = xplus - xminus
      vm.shift = 0.0;
      vm.sign = 1.0;
      vm.first_col = mdl.n;
      vm.num_copies = 1;
      append_column(mdl, cols[j], cj, kInf);
      buf = cols[j];
      for (auto& e : buf) e.second = -e.second;
      vm.neg_col = mdl.n;
      append_column(mdl, buf, -cj, kInf);
    }
  }

  // Slack columns for inequality rows.
  for (int i = 0; i < m; ++i) {
    const RowSense s = p.row_sense(i);
    if (s == RowSense::kEq) continue;
    std::vector<std::pair<int, double>> e{{i, s == RowSense::kLe ? 1.0 : -1.0}};
    append_column(mdl, e, 0.0, kInf);
  }
  mdl.total_rows = m;
  return mdl;
}

// Splits dense columns into chained copies. Chain rows x_k - x_{k+1} = 0 are
// appended after the original rows; copies inherit the range bound.
void split_dense_columns(InternalModel& mdl) {
  InternalModel out;
  out.m = mdl.m;
  out.b = mdl.b;
  out.c0 = mdl.c0;
  out.vmap = mdl.vmap;
  out.col_start.push_back(0);
  int next_chain_row = mdl.m;

  std::vector<int> new_first(mdl.n, -1);
  std::vector<int> new_count(mdl.n, 1);
  std::vector<std::pair<int, double>> buf;
  for (int j = 0; j < mdl.n; ++j) {
    const int64_t begin = mdl.col_start[j];
    const int64_t end = mdl.col_start[j + 1];
    const int nnz = static_cast<int>(end - begin);
    new_first[j] = out.n;
    if (nnz <= kSplitThreshold) {
      buf.clear();
      for (int64_t k = begin; k < end; ++k) buf.emplace_back(mdl.row_idx[k], mdl.val[k]);
      append_column(out, buf, mdl.c[j], mdl.range[j]);
      continue;
    }
    const int copies = (nnz + kSplitChunk - 1) / kSplitChunk;
    new_count[j] = copies;
    for (int k = 0; k < copies; ++k) {
      buf.clear();
      const int64_t lo = begin + static_cast<int64_t>(k) * kSplitChunk;
      const int64_t hi = std::min(end, lo + kSplitChunk);
      for (int64_t q = lo; q < hi; ++q) buf.emplace_back(mdl.row_idx[q], mdl.val[q]);
      if (k > 0) buf.emplace_back(next_chain_row + k - 1, -1.0);
      if (k + 1 < copies) buf.emplace_back(next_chain_row + k, 1.0);
      append_column(out, buf, k == 0 ? mdl.c[j] : 0.0, mdl.range[j]);
    }
    next_chain_row += copies - 1;
  }
  out.total_rows = next_chain_row;
  out.b.resize(next_chain_row, 0.0);

  // Remap the variable recovery table through the split.
  for (auto& vm : out.vmap) {
    if (vm.num_copies == 0) continue;
    const int old_col = vm.first_col;
    vm.first_col = new_first[old_col];
    vm.num_copies = new_count[old_col];
    if (vm.neg_col >= 0) vm.neg_col = new_first[vm.neg_col];
  }
  mdl = std::move(out);
}

class IpmSolver {
 public:
  IpmSolver(const Problem& p, const SolveSettings& s) : problem_(p), settings_(s) {}
  Solution run();

 private:
  void prepare();
  void assemble_normal_matrix(const std::vector<double>& d);
  // Solves M q = rhs through the analyzed LDLT.
  Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const;
  Solution extract(SolveStatus status);

  const Problem& problem_;
  const SolveSettings& settings_;
  InternalModel mdl_;

  // Normal-equations storage: pattern fixed, values refilled per iteration.
  Eigen::SparseMatrix<double> M_;
  struct Contribution { int64_t pos; int32_t col; double prod; };
  std::vector<Contribution> contrib_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>> ldlt_;
  bool pattern_ready_ = false;

  std::vector<double> x_, z_, w_, v_, y_;
  double delta_ = 0.0;
  int iterations_ = 0;
  std::ostringstream trace_;
};

void IpmSolver::prepare() {
  mdl_ = build_model(problem_);
  split_dense_columns(mdl_);
  const int mr = mdl_.total_rows;

  // Pattern of M = A D A' (lower triangle) from per-column row cliques.
  std::vector<Eigen::Triplet<double>> trips;
  int64_t pairs = 0;
  for (int j = 0; j < mdl_.n; ++j)
    {
      const int64_t b = mdl_.col_start[j], e = mdl_.col_start[j + 1];
      const int64_t k = e - b;
      pairs += k * (k + 1) / 2;
    }
  trips.reserve(pairs + mr);
  for (int j = 0; j < mdl_.n; ++j) {
    const int64_t b = mdl_.col_start[j], e = mdl_.col_start[j + 1];
    for (int64_t p = b; p < e; ++p) {
      for (int64_t q = b; q <= p; ++q) {
        const int r1 = mdl_.row_idx[p], r2 = mdl_.row_idx[q];
        trips.emplace_back(std::max(r1, r2), std::min(r1, r2), 0.0);
      }
    }
  }
  for (int i = 0; i < mr; ++i) trips.emplace_back(i, i, 0.0);  // regularization slot
  M_.resize(mr, mr);
  M_.setFromTriplets(trips.begin(), trips.end());
  M_.makeCompressed();

  // Locate each contribution inside M's storage once.
  contrib_.clear();
  contrib_.reserve(pairs);
  const auto* outer = M_.outerIndexPtr();
  const auto* inner = M_.innerIndexPtr();
  auto locate = [&](int row, int col) -> int64_t {
    // column-major lower triangle: col <= row
    for (int64_t k = outer[col]; k < outer[col + 1]; ++k)
      if (inner[k] == row) return k;
    throw SolveError("normal matrix pattern lookup failed");
  };
  for (int j = 0; j < mdl_.n; ++j) {
    const int64_t b = mdl_.col_start[j], e = mdl_.col_start[j + 1];
    for (int64_t p = b; p < e; ++p) {
      for (int64_t q = b; q <= p; ++q) {
        const int r1 = mdl_.row_idx[p], r2 = mdl_.row_idx[q];
        contrib_.push_back({locate(std::max(r1, r2), std::min(r1, r2)), j,
                            mdl_.val[p] * mdl_.val[q]});
      }
    }
  }
  std::sort(contrib_.begin(), contrib_.end(),
            [](const Contribution& a, const Contribution& b) { return a.pos < b.pos; });
  ldlt_.analyzePattern(M_);
  pattern_ready_ = true;
}

void IpmSolver::assemble_normal_matrix(const std::vector<double>& d) {
  double* vals = M_.valuePtr();
  std::fill(vals, vals + M_.nonZeros(), 0.0);
  for (const auto& c : contrib_) vals[c.pos] += d[c.col] * c.prod;
  // Diagonal regularization keeps the factorization positive definite under
  // extreme barrier weights.
  double dmax = 0.0;
  const auto* outer = M_.outerIndexPtr();
  const auto* inner = M_.innerIndexPtr();
  for (int c = 0; c < M_.outerSize(); ++c)
    for (int64_t k = outer[c]; k < outer[c + 1]; ++k)
      if (inner[k] == c) dmax = std::max(dmax, vals[k]);
  const double reg = std::max(delta_, 1e-12 * std::max(1.0, dmax));
  for (int c = 0; c < M_.outerSize(); ++c)
    for (int64_t k = outer[c]; k < outer[c + 1]; ++k)
      if (inner[k] == c) vals[k] += reg;
}

Eigen::VectorXd IpmSolver::solve_normal(const Eigen::VectorXd& rhs) const {
  return ldlt_.solve(rhs);
}

Solution IpmSolver::extract(SolveStatus status) {
  Solution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.note = trace_.str();
  const int n = problem_.num_vars();
  const int m = problem_.num_rows();
  sol.x.assign(n, 0.0);
  sol.y.assign(m, 0.0);
  for (int j = 0; j < n; ++j) {
    const auto& vm = mdl_.vmap[j];
    if (vm.num_copies == 0) {
      sol.x[j] = vm.shift;
      continue;
    }
    double mean = 0.0;
    for (int k = 0; k < vm.num_copies; ++k) mean += x_[vm.first_col + k];
    mean /= vm.num_copies;
    double value = vm.shift + vm.sign * mean;
    if (vm.neg_col >= 0) value -= x_[vm.neg_col];
    sol.x[j] = value;
  }
  for (int i = 0; i < m; ++i) sol.y[i] = -y_[i];
  sol.reduced_costs.assign(n, 0.0);
  for (int j = 0; j < n; ++j) sol.reduced_costs[j] = problem_.var(j).objective;
  for (int i = 0; i < m; ++i) {
    const int nnz = problem_.row_nnz(i);
    const int* cc = problem_.row_cols(i);
    const double* vv = problem_.row_coefs(i);
    for (int k = 0; k < nnz; ++k) sol.reduced_costs[cc[k]] += vv[k] * sol.y[i];
  }
  if (status == SolveStatus::kOptimal) {
    // Clip marginal negatives introduced by the interior iterate.
    for (int j = 0; j < n; ++j) {
      sol.x[j] = std::min(std::max(sol.x[j], problem_.var(j).lower), problem_.var(j).upper);
    }
    sol.objective = problem_.objective_value(sol.x);
  }
  return sol;
}

Solution IpmSolver::run() {
  prepare();
  const int n = mdl_.n;
  const int mr = mdl_.total_rows;

  const double feas_tol = std::min(settings_.feasibility_tol, 1e-7) * 0.1;
  const double gap_tol = std::min(settings_.optimality_tol, 1e-7) * 0.01;
  const int max_iter = settings_.max_iterations > 0 ? settings_.max_iterations : 200;

  std::vector<char> ranged(n, 0);
  for (int j = 0; j < n; ++j) ranged[j] = mdl_.range[j] != kInf;

  double bnorm = 1.0, cnorm = 1.0;
  for (double t : mdl_.b) bnorm = std::max(bnorm, std::abs(t));
  for (double t : mdl_.c) cnorm = std::max(cnorm, std::abs(t));

  // Starting point: least-squares heuristic shifted into the interior.
  x_.assign(n, 0.0);
  z_.assign(n, 0.0);
  w_.assign(n, 0.0);
  v_.assign(n, 0.0);
  y_.assign(mr, 0.0);
  {
    std::vector<double> ones(n, 1.0);
    assemble_normal_matrix(ones);
    ldlt_.factorize(M_);
    if (ldlt_.info() != Eigen::Success)
      throw SolveError("interior point: initial factorization failed");
    Eigen::VectorXd bb = Eigen::Map<const Eigen::VectorXd>(mdl_.b.data(), mr);
    Eigen::VectorXd q = solve_normal(bb);
    // x0 = A' q
    for (int j = 0; j < n; ++j) {
      double t = 0.0;
      for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
        t += mdl_.val[k] * q[mdl_.row_idx[k]];
      x_[j] = t;
    }
    // y0 from least squares on c, z0 = c - A'y0.
    Eigen::VectorXd ac = Eigen::VectorXd::Zero(mr);
    for (int j = 0; j < n; ++j)
      for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
        ac[mdl_.row_idx[k]] += mdl_.val[k] * mdl_.c[j];
    Eigen::VectorXd y0 = solve_normal(ac);
    for (int i = 0; i < mr; ++i) y_[i] = y0[i];
    for (int j = 0; j < n; ++j) {
      double t = mdl_.c[j];
      for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
        t -= mdl_.val[k] * y_[mdl_.row_idx[k]];
      z_[j] = t;
    }
    double dx = 0.0, dz = 0.0;
    for (int j = 0; j < n; ++j) dx = std::max(dx, -1.5 * x_[j]);
    for (int j = 0; j < n; ++j) dz = std::max(dz, -1.5 * z_[j]);
    dx = std::max(dx, 1e-2);
    dz = std::max(dz, 1e-2);
    double xz = 0.0, sx = 0.0, sz = 0.0;
    for (int j = 0; j < n; ++j) {
      xz += (x_[j] + dx) * (z_[j] + dz);
      sx += x_[j] + dx;
      sz += z_[j] + dz;
    }
    const double dxh = dx + 0.5 * xz / sz;
    const double dzh = dz + 0.5 * xz / sx;
    for (int j = 0; j < n; ++j) {
      x_[j] += dxh;
      z_[j] += dzh;
      if (ranged[j]) {
        const double r = mdl_.range[j];
        x_[j] = std::min(std::max(x_[j], 0.01 * std::min(1.0, r)), 0.99 * r);
        w_[j] = r - x_[j];
        v_[j] = dzh;
      }
    }
  }

  std::vector<double> d(n), rp(mr), rd(n), ru(n);
  Eigen::VectorXd dy_aff(mr), dy(mr);
  std::vector<double> dx_aff(n), dz_aff(n), dw_aff(n), dv_aff(n);
  std::vector<double> dx(n), dz(n), dw(n), dv(n), rhs_d(n);
  double prev_mu = kInf;
  int stall = 0;

  for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
    // Residuals.
    std::fill(rp.begin(), rp.end(), 0.0);
    for (int i = 0; i < mr; ++i) rp[i] = mdl_.b[i];
    for (int j = 0; j < n; ++j) {
      if (x_[j] == 0.0) continue;
      for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
        rp[mdl_.row_idx[k]] -= mdl_.val[k] * x_[j];
    }
    int ranged_count = 0;
    double gap = 0.0;
    for (int j = 0; j < n; ++j) {
      double t = mdl_.c[j] - z_[j];
      for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
        t -= mdl_.val[k] * y_[mdl_.row_idx[k]];
      if (ranged[j]) {
        t += v_[j];
        ru[j] = mdl_.range[j] - x_[j] - w_[j];
        gap += w_[j] * v_[j];
        ++ranged_count;
      } else {
        ru[j] = 0.0;
      }
      rd[j] = t;
      gap += x_[j] * z_[j];
    }
    const double mu = gap / std::max(1, n + ranged_count);

    double rp_norm = 0.0, rd_norm = 0.0, ru_norm = 0.0;
    for (double t : rp) rp_norm = std::max(rp_norm, std::abs(t));
    for (double t : rd) rd_norm = std::max(rd_norm, std::abs(t));
    for (double t : ru) ru_norm = std::max(ru_norm, std::abs(t));

    double pobj = mdl_.c0, dobj = mdl_.c0;
    for (int j = 0; j < n; ++j) pobj += mdl_.c[j] * x_[j];
    for (int i = 0; i < mr; ++i) dobj += mdl_.b[i] * y_[i];
    for (int j = 0; j < n; ++j)
      if (ranged[j]) dobj -= mdl_.range[j] * v_[j];
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    if (rp_norm / (1.0 + bnorm) <= feas_tol && ru_norm / (1.0 + bnorm) <= feas_tol &&
        rd_norm / (1.0 + cnorm) <= feas_tol && rel_gap <= gap_tol) {
      return extract(SolveStatus::kOptimal);
    }
    // Divergence heuristics (confirmed by the caller via the reference path
    // on small instances).
    double ynorm = 0.0;
    for (double t : y_) ynorm = std::max(ynorm, std::abs(t));
    if (iterations_ > 20 && ynorm > 1e13 * (1.0 + cnorm) &&
        rp_norm / (1.0 + bnorm) > 1e-6) {
      trace_ << "dual divergence: |y|=" << ynorm << " rp=" << rp_norm << "\n";
      return extract(SolveStatus::kInfeasible);
    }
    if (iterations_ > 20 && pobj < -1e13 * (1.0 + cnorm) &&
        rd_norm / (1.0 + cnorm) > 1e-6) {
      trace_ << "primal divergence: obj=" << pobj << "\n";
      return extract(SolveStatus::kUnbounded);
    }
    if (mu < prev_mu * 0.9999) stall = 0; else ++stall;
    if (stall > 8) {
      // No centering progress: accept if residuals are loose-tolerance clean.
      if (rp_norm / (1.0 + bnorm) <= 1e-6 && rd_norm / (1.0 + cnorm) <= 1e-6 &&
          rel_gap <= 1e-7) {
        trace_ << "accepting at stall, rel_gap=" << rel_gap << "\n";
        return extract(SolveStatus::kOptimal);
      }
      trace_ << "stalled at mu=" << mu << " rp=" << rp_norm << " rd=" << rd_norm
             << " gap=" << rel_gap << "\n";
      return extract(SolveStatus::kIterationLimit);
    }
    prev_mu = std::min(prev_mu, mu);

    // Scaling matrix and factorization.
    for (int j = 0; j < n; ++j) {
      double t = z_[j] / std::max(x_[j], 1e-300);
      if (ranged[j]) t += v_[j] / std::max(w_[j], 1e-300);
      d[j] = 1.0 / std::max(t, 1e-300);
      d[j] = std::min(d[j], 1e14);
    }
    assemble_normal_matrix(d);
    ldlt_.factorize(M_);
    int bumps = 0;
    while (ldlt_.info() != Eigen::Success && bumps < 6) {
      delta_ = std::max(delta_ * 100.0, 1e-8);
      assemble_normal_matrix(d);
      ldlt_.factorize(M_);
      ++bumps;
    }
    if (ldlt_.info() != Eigen::Success)
      throw SolveError("interior point: factorization failed at iteration " +
                       std::to_string(iterations_));

    auto newton = [&](const std::vector<double>& rxz, const std::vector<double>& rwv,
                      Eigen::VectorXd& dy_out, std::vector<double>& dx_out,
                      std::vector<double>& dz_out, std::vector<double>& dw_out,
                      std::vector<double>& dv_out) {
      // rhs_d = rd - rxz/x + (rwv - v*ru)/w  (ranged terms where applicable)
      for (int j = 0; j < n; ++j) {
        double t = rd[j] - rxz[j] / std::max(x_[j], 1e-300);
        if (ranged[j]) t += (rwv[j] - v_[j] * ru[j]) / std::max(w_[j], 1e-300);
        rhs_d[j] = t;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mr);
      for (int i = 0; i < mr; ++i) rhs[i] = rp[i];
      for (int j = 0; j < n; ++j) {
        const double t = d[j] * rhs_d[j];
        if (t == 0.0) continue;
        for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
          rhs[mdl_.row_idx[k]] += mdl_.val[k] * t;
      }
      dy_out = solve_normal(rhs);
      for (int j = 0; j < n; ++j) {
        double aty = 0.0;
        for (int64_t k = mdl_.col_start[j]; k < mdl_.col_start[j + 1]; ++k)
          aty += mdl_.val[k] * dy_out[mdl_.row_idx[k]];
        dx_out[j] = d[j] * (aty - rhs_d[j]);
        dz_out[j] = (rxz[j] - z_[j] * dx_out[j]) / std::max(x_[j], 1e-300);
        if (ranged[j]) {
          dw_out[j] = ru[j] - dx_out[j];
          dv_out[j] = (rwv[j] - v_[j] * dw_out[j]) / std::max(w_[j], 1e-300);
        } else {
          dw_out[j] = 0.0;
          dv_out[j] = 0.0;
        }
      }
    };

    auto max_step = [&](const std::vector<double>& xx, const std::vector<double>& dxx,
                        const std::vector<double>& ww, const std::vector<double>& dww,
                        bool use_w) {
      double a = 1.0;
      for (int j = 0; j < n; ++j) {
        if (dxx[j] < 0.0) a = std::min(a, -xx[j] / dxx[j]);
        if (use_w && ranged[j] && dww[j] < 0.0) a = std::min(a, -ww[j] / dww[j]);
      }
      return a;
    };

    // Predictor (affine scaling).
    std::vector<double> rxz(n), rwv(n);
    for (int j = 0; j < n; ++j) {
      rxz[j] = -x_[j] * z_[j];
      rwv[j] = ranged[j] ? -w_[j] * v_[j] : 0.0;
    }
    newton(rxz, rwv, dy_aff, dx_aff, dz_aff, dw_aff, dv_aff);
    const double ap_aff = max_step(x_, dx_aff, w_, dw_aff, true);
    const double ad_aff = max_step(z_, dz_aff, v_, dv_aff, true);
    double mu_aff = 0.0;
    for (int j = 0; j < n; ++j) {
      mu_aff += (x_[j] + ap_aff * dx_aff[j]) * (z_[j] + ad_aff * dz_aff[j]);
      if (ranged[j])
        mu_aff += (w_[j] + ap_aff * dw_aff[j]) * (v_[j] + ad_aff * dv_aff[j]);
    }
    mu_aff /= std::max(1, n + ranged_count);
    const double sigma = std::pow(std::min(1.0, std::max(0.0, mu_aff / mu)), 3);

    // Corrector.
    for (int j = 0; j < n; ++j) {
      rxz[j] = sigma * mu - x_[j] * z_[j] - dx_aff[j] * dz_aff[j];
      rwv[j] = ranged[j] ? sigma * mu - w_[j] * v_[j] - dw_aff[j] * dv_aff[j] : 0.0;
    }
    newton(rxz, rwv, dy, dx, dz, dw, dv);

    const double ap = std::min(1.0, 0.9995 * max_step(x_, dx, w_, dw, true));
    const double ad = std::min(1.0, 0.9995 * max_step(z_, dz, v_, dv, true));
    for (int j = 0; j < n; ++j) {
      x_[j] += ap * dx[j];
      z_[j] += ad * dz[j];
      if (ranged[j]) {
        w_[j] += ap * dw[j];
        v_[j] += ad * dv[j];
      }
    }
    for (int i = 0; i < mr; ++i) y_[i] += ad * dy[i];
  }
  trace_ << "iteration limit " << max_iter << " reached\n";
  return extract(SolveStatus::kIterationLimit);
}

}  // namespace

Solution solve_interior_point(const Problem& problem, const SolveSettings& settings) {
  IpmSolver solver(problem, settings);
  return solver.run();
}

}  // namespace cemkit
