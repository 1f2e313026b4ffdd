#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cemkit/lp.h"

namespace cemkit {

enum class SolveMethod { kInteriorPointNoCrossover, kSimplex };

struct SolveSettings {
  SolveMethod method = SolveMethod::kInteriorPointNoCrossover;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  int max_iterations = 0;  // 0 = method default
  // reference_solve refuses problems above this many nonzeros.
  int64_t reference_nonzero_cap = 500000;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

// Row duals follow the Lagrangian L = c'x + sum_i y_i (a_i'x - b_i):
// y >= 0 for <= rows, y <= 0 for >= rows, free for equalities, and the
// reduced cost of column j is z_j = c_j + (A'y)_j (>= 0 at lower bound,
// <= 0 at upper bound). Under this convention the dual of a binding
// emissions cap with interior priced excess equals the buyout price.
struct Solution {
  SolveStatus status = SolveStatus::kIterationLimit;
  std::vector<double> x;              // primal values
  std::vector<double> y;              // row duals
  std::vector<double> reduced_costs;  // z = c + A'y
  double objective = 0.0;             // includes the problem's constant term
  int iterations = 0;
  std::string note;                   // iteration trace on numerical failure
  // Rows implicated in an infeasibility (phase-1 certificate), if any.
  std::vector<int> infeasible_rows;
  bool optimal() const { return status == SolveStatus::kOptimal; }
};

// Solve through the selected backend. Interior-point solutions are not vertex
// solutions (no crossover); callers must not assume a basic solution.
Solution solve(const Problem& problem, const SolveSettings& settings = {});

// Built-in revised simplex (Bland's-rule fallback against cycling). Produces
// an exact-feasible basic solution. Refuses problems above the nonzero cap.
Solution reference_solve(const Problem& problem, const SolveSettings& settings = {});

// Backend registry: "ipm" / "barrier" selects the interior-point method,
// "simplex" / "reference" the revised simplex. Throws InvalidParameter on
// unknown names. Empty string = environment default (CEMKIT_BACKEND or ipm).
SolveMethod backend_by_name(const std::string& name);

struct KktReport {
  double primal_residual = 0.0;     // max row/bound violation
  double dual_residual = 0.0;       // max stationarity violation
  double complementarity = 0.0;     // max |slack x dual| mismatch
  double duality_gap_rel = 0.0;     // |primal - dual objective| / (1 + |primal|)
  double max_residual() const;
  bool pass(double tol) const { return max_residual() <= tol; }
};

// Independent optimality check: primal feasibility, dual feasibility,
// complementary slackness and the duality gap, reported as max residuals.
KktReport verify_kkt(const Problem& problem, const Solution& solution);

}  // namespace cemkit
