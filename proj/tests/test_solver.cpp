#include "cemkit/solver.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cemkit/common.h"
#include "cemkit/lp.h"
#include "doctest.h"

using namespace cemkit;

namespace {

SolveSettings simplex_settings() {
  SolveSettings s;
  s.method = SolveMethod::kSimplex;
  return s;
}

SolveSettings ipm_settings() {
  SolveSettings s;
  s.method = SolveMethod::kInteriorPointNoCrossover;
  return s;
}

}  // namespace

TEST_CASE("min x subject to x >= 3") {
  Problem p;
  const int x = p.add_variable(0.0, kInf, 1.0);
  p.add_row(RowSense::kGe, 3.0, {{x, 1.0}});
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(p, settings);
    REQUIRE(sol.optimal());
    CHECK(sol.x[x] == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(verify_kkt(p, sol).pass(1e-6));
  }
}

TEST_CASE("infeasible pair x <= 0, x >= 1") {
  Problem p;
  const int x = p.add_variable(-kInf, kInf, 1.0);
  p.add_row(RowSense::kLe, 0.0, {{x, 1.0}});
  p.add_row(RowSense::kGe, 1.0, {{x, 1.0}});
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(p, settings);
    CHECK(sol.status == SolveStatus::kInfeasible);
  }
  Solution ref = reference_solve(p);
  CHECK(ref.status == SolveStatus::kInfeasible);
  CHECK(!ref.infeasible_rows.empty());
}

TEST_CASE("unbounded direction detected") {
  Problem p;
  const int x = p.add_variable(0.0, kInf, -1.0);
  p.add_row(RowSense::kGe, 1.0, {{x, 1.0}});
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(p, settings);
    CHECK(sol.status == SolveStatus::kUnbounded);
  }
}

TEST_CASE("toy dispatch LP matches a brute-force grid oracle") {
  // Two generators serving 12 MW: g1 up to 8 at $10, g2 up to 10 at $25.
  Problem p;
  const int g1 = p.add_variable(0.0, 8.0, 10.0);
  const int g2 = p.add_variable(0.0, 10.0, 25.0);
  p.add_row(RowSense::kEq, 12.0, {{g1, 1.0}, {g2, 1.0}});

  double oracle = kInf;
  for (int i = 0; i <= 8000; ++i) {
    const double a = i * 0.001;
    const double b = 12.0 - a;
    if (b < 0.0 || b > 10.0) continue;
    oracle = std::min(oracle, 10.0 * a + 25.0 * b);
  }
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(p, settings);
    REQUIRE(sol.optimal());
    CHECK(std::abs(sol.objective - oracle) / oracle < 1e-3);
    CHECK(verify_kkt(p, sol).pass(1e-6));
  }
}

TEST_CASE("degenerate LP with tied vertices terminates") {
  Problem p;
  const int x = p.add_variable(0.0, 1.0, 1.0);
  const int y = p.add_variable(0.0, 1.0, 1.0);
  const int z = p.add_variable(0.0, 1.0, 0.0);
  // Many redundant rows intersecting at the same vertex.
  p.add_row(RowSense::kGe, 1.0, {{x, 1.0}, {y, 1.0}});
  p.add_row(RowSense::kGe, 1.0, {{x, 1.0}, {y, 1.0}, {z, 0.0 + 1e-12}});
  p.add_row(RowSense::kGe, 0.5, {{x, 0.5}, {y, 0.5}});
  p.add_row(RowSense::kLe, 1.0, {{x, 1.0}, {y, 1.0}});
  p.add_row(RowSense::kLe, 2.0, {{x, 1.0}, {y, 1.0}, {z, 1.0}});
  Solution sol = reference_solve(p);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("buyout-style cap row exposes the excess price as its dual") {
  // Balance gen + unserved = 10, emissions gen - excess <= 4, excess at $200.
  Problem p;
  const int gen = p.add_variable(0.0, 20.0, 10.0);
  const int unserved = p.add_variable(0.0, kInf, 5000.0);
  const int excess = p.add_variable(0.0, kInf, 200.0);
  p.add_row(RowSense::kEq, 10.0, {{gen, 1.0}, {unserved, 1.0}});
  const int cap_row = p.add_row(RowSense::kLe, 4.0, {{gen, 1.0}, {excess, -1.0}});
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(p, settings);
    REQUIRE(sol.optimal());
    CHECK(sol.x[excess] == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(std::abs(sol.y[cap_row] - 200.0) < 1e-4 * 200.0);
    CHECK(verify_kkt(p, sol).pass(1e-6));
  }
}

TEST_CASE("perturbed solutions are flagged by the KKT check") {
  Problem p;
  const int x = p.add_variable(0.0, kInf, 1.0);
  p.add_row(RowSense::kGe, 3.0, {{x, 1.0}});
  Solution sol = solve(p, simplex_settings());
  REQUIRE(sol.optimal());
  Solution bad = sol;
  bad.x[0] += 1.0;  // now interior: complementary slackness broken
  KktReport rep = verify_kkt(p, bad);
  CHECK(!rep.pass(1e-6));
  Solution worse = sol;
  worse.x[0] -= 1.0;  // primal infeasible
  CHECK(!verify_kkt(p, worse).pass(1e-6));
}

TEST_CASE("verify_kkt rejects non-optimal input") {
  Problem p;
  p.add_variable(0.0, 1.0, 1.0);
  Solution sol;
  sol.status = SolveStatus::kInfeasible;
  CHECK_THROWS_AS(verify_kkt(p, sol), InvalidParameter);
}

TEST_CASE("reference solver refuses problems above the nonzero cap") {
  Problem p;
  std::vector<std::pair<int, double>> terms;
  for (int j = 0; j < 20; ++j) terms.emplace_back(p.add_variable(0.0, 1.0, 1.0), 1.0);
  p.add_row(RowSense::kGe, 5.0, terms);
  SolveSettings s;
  s.reference_nonzero_cap = 10;
  CHECK_THROWS_AS(reference_solve(p, s), SolveError);
}

namespace {

Problem random_bounded_lp(std::mt19937& rng) {
  std::uniform_int_distribution<int> mdist(3, 18), ndist(5, 30);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), xval(0.0, 4.0),
      cost(-2.0, 5.0), slackd(0.0, 2.0);
  const int m = mdist(rng), n = ndist(rng);
  Problem p;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    x0[j] = xval(rng);
    p.add_variable(0.0, 10.0, cost(rng));
  }
  std::uniform_int_distribution<int> sense(0, 2);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    double act = 0.0;
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int k = 0; k < 4; ++k) {
      const int j = pick(rng);
      const double v = coef(rng);
      terms.emplace_back(j, v);
      act += v * x0[j];
    }
    // Feasible by construction around x0.
    switch (sense(rng)) {
      case 0: p.add_row(RowSense::kLe, act + slackd(rng), terms); break;
      case 1: p.add_row(RowSense::kGe, act - slackd(rng), terms); break;
      default: p.add_row(RowSense::kEq, act, terms); break;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("reference and backend objectives agree on random bounded LPs") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    Problem p = random_bounded_lp(rng);
    Solution ref = solve(p, simplex_settings());
    Solution ipm = solve(p, ipm_settings());
    REQUIRE(ref.optimal());
    REQUIRE(ipm.optimal());
    const double denom = std::max(1.0, std::abs(ref.objective));
    CHECK(std::abs(ref.objective - ipm.objective) / denom <= 1e-6);
    CHECK(verify_kkt(p, ref).pass(1e-6));
    CHECK(verify_kkt(p, ipm).pass(1e-6));
    // Nonbinding rows carry zero duals.
    for (int i = 0; i < p.num_rows(); ++i) {
      const double act = p.row_activity(i, ref.x);
      const double slack = p.row_sense(i) == RowSense::kLe ? p.row_rhs(i) - act
                           : p.row_sense(i) == RowSense::kGe ? act - p.row_rhs(i)
                                                             : 0.0;
      if (slack > 1e-6) CHECK(std::abs(ref.y[i]) < 1e-6 * (1.0 + std::abs(ref.y[i])));
    }
  }
}

TEST_CASE("objective is invariant under row and column permutation") {
  std::mt19937 rng(11);
  Problem p = random_bounded_lp(rng);
  Solution base = solve(p, simplex_settings());
  REQUIRE(base.optimal());

  std::vector<int> vperm(p.num_vars()), rperm(p.num_rows());
  for (size_t i = 0; i < vperm.size(); ++i) vperm[i] = static_cast<int>(i);
  for (size_t i = 0; i < rperm.size(); ++i) rperm[i] = static_cast<int>(i);
  std::shuffle(vperm.begin(), vperm.end(), rng);
  std::shuffle(rperm.begin(), rperm.end(), rng);

  Problem q;
  std::vector<int> newpos(p.num_vars());
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.var(vperm[j]);
    newpos[vperm[j]] = q.add_variable(v.lower, v.upper, v.objective);
  }
  for (int i = 0; i < p.num_rows(); ++i) {
    const int r = rperm[i];
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < p.row_nnz(r); ++k)
      terms.emplace_back(newpos[p.row_cols(r)[k]], p.row_coefs(r)[k]);
    q.add_row(p.row_sense(r), p.row_rhs(r), terms);
  }
  for (const auto& settings : {simplex_settings(), ipm_settings()}) {
    Solution sol = solve(q, settings);
    REQUIRE(sol.optimal());
    CHECK(std::abs(sol.objective - base.objective) /
              std::max(1.0, std::abs(base.objective)) <=
          1e-6);
  }
}

TEST_CASE("backend registry resolves names") {
  CHECK(backend_by_name("ipm") == SolveMethod::kInteriorPointNoCrossover);
  CHECK(backend_by_name("barrier") == SolveMethod::kInteriorPointNoCrossover);
  CHECK(backend_by_name("simplex") == SolveMethod::kSimplex);
  CHECK(backend_by_name("reference-simplex") == SolveMethod::kSimplex);
  CHECK_THROWS_AS(backend_by_name("gurobi"), InvalidParameter);
}
