#include "cemkit/lp.h"

#include <sstream>

#include "cemkit/common.h"
#include "doctest.h"

using namespace cemkit;

TEST_CASE("problem container stores rows and merges duplicates") {
  Problem p;
  const int x = p.add_variable(0.0, 10.0, 1.0);
  const int y = p.add_variable(0.0, kInf, 2.0);
  p.begin_row(RowSense::kLe, 5.0);
  p.add_coef(x, 1.0);
  p.add_coef(y, 2.0);
  p.add_coef(x, 0.5);  // merged into x
  const int r = p.end_row();
  CHECK(p.num_rows() == 1);
  CHECK(p.row_nnz(r) == 2);
  const int* cols = p.row_cols(r);
  const double* coefs = p.row_coefs(r);
  CHECK(cols[0] == x);
  CHECK(coefs[0] == doctest::Approx(1.5));
  CHECK(cols[1] == y);
  CHECK(coefs[1] == doctest::Approx(2.0));

  std::vector<double> xx = {2.0, 1.0};
  CHECK(p.row_activity(r, xx) == doctest::Approx(5.0));
  CHECK(p.objective_value(xx) == doctest::Approx(4.0));
  p.add_objective_constant(3.0);
  CHECK(p.objective_value(xx) == doctest::Approx(7.0));
}

TEST_CASE("rows referencing undeclared variables are rejected") {
  Problem p;
  p.add_variable(0.0, 1.0, 0.0);
  p.begin_row(RowSense::kEq, 0.0);
  CHECK_THROWS_AS(p.add_coef(5, 1.0), InvalidParameter);
  p.end_row();
}

TEST_CASE("lp format export carries tag-derived names") {
  Problem p;
  VarTag t;
  t.kind = VarKind::kGen;
  t.entity = 3;
  t.hour = 17;
  const int g = p.add_variable(0.0, 20.0, 2.5, t);
  RowTag rt;
  rt.kind = RowKind::kBalance;
  rt.zone = 1;
  p.add_row(RowSense::kEq, 10.0, {{g, 1.0}}, rt);
  std::ostringstream os;
  p.write_lp_format(os);
  const std::string text = os.str();
  CHECK(text.find("gen_e3_h17") != std::string::npos);
  CHECK(text.find("balance_z1") != std::string::npos);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
}
