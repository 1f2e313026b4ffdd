#include "cemkit/finance.h"

#include <cmath>

#include "cemkit/common.h"
#include "doctest.h"

using namespace cemkit;

namespace {

// Independent oracle: present value of an n-year annuity of `payment` at
// `rate`, summed year by year.
double annuity_present_value(double payment, double rate, int years) {
  double pv = 0.0;
  for (int k = 1; k <= years; ++k) pv += payment / std::pow(1.0 + rate, k);
  return pv;
}

}  // namespace

TEST_CASE("capital recovery factor basics") {
  CHECK(capital_recovery_factor(0.0, 30) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK(capital_recovery_factor(0.05, 1) == doctest::Approx(1.05).epsilon(1e-12));
  // Year-by-year oracle: the CRF annuity repays exactly one unit of
  // overnight cost in present value.
  const double crf = capital_recovery_factor(0.05, 30);
  CHECK(annuity_present_value(crf, 0.05, 30) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(crf == doctest::Approx(0.06505).epsilon(1e-4));
  CHECK_THROWS_AS(capital_recovery_factor(0.05, 0), InvalidParameter);
  CHECK_THROWS_AS(capital_recovery_factor(-0.01, 10), InvalidParameter);
}

TEST_CASE("CRF annuity-sum identity across rates and lives") {
  for (double r : {0.0, 0.02, 0.05, 0.1}) {
    for (int n : {1, 10, 30}) {
      const double crf = capital_recovery_factor(r, n);
      CHECK(std::abs(annuity_present_value(crf, r, n) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("annuitize_capex") {
  const double crf30 = capital_recovery_factor(0.05, 30);
  CHECK(annuitize_capex(1000.0, 0.0, 0.05, 30) ==
        doctest::Approx(1000.0 * crf30).epsilon(1e-12));
  CHECK(annuitize_capex(1000.0, 0.0, 0.05, 30) == doctest::Approx(65.05).epsilon(1e-4));
  CHECK(annuitize_capex(1000.0, 0.3, 0.05, 30) ==
        doctest::Approx(0.7 * annuitize_capex(1000.0, 0.0, 0.05, 30)).epsilon(1e-12));
  CHECK(annuitize_capex(1000.0, 0.3, 0.05, 30) == doctest::Approx(45.54).epsilon(2e-4));
  CHECK(annuitize_capex(0.0, 0.3, 0.05, 30) == 0.0);
  CHECK_THROWS_AS(annuitize_capex(-1.0, 0.0, 0.05, 30), InvalidParameter);
  CHECK_THROWS_AS(annuitize_capex(10.0, 1.0, 0.05, 30), InvalidParameter);
}

TEST_CASE("levelize_ptc against the explicit discounted-sum oracle") {
  // Oracle: PV of the net credit over the credit window, re-amortized.
  const double net = 27.50 * (1.0 - 0.075);
  const double pv = annuity_present_value(net, 0.05, 10);
  const double expect = pv * capital_recovery_factor(0.05, 30);
  const double got = levelize_ptc(27.50, 10, 30, 0.05, 0.075);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got == doctest::Approx(12.78).epsilon(1e-3));
  CHECK(std::abs(got - 12.78) < 0.01);

  CHECK(levelize_ptc(0.0, 10, 30, 0.05, 0.075) == 0.0);
  // Full-life credit at zero rate passes straight through.
  CHECK(levelize_ptc(27.50, 30, 30, 0.0, 0.0) == doctest::Approx(27.50).epsilon(1e-12));
  CHECK_THROWS_AS(levelize_ptc(27.50, 31, 30, 0.05, 0.075), InvalidParameter);
}

TEST_CASE("levelize_ptc linearity and penalty monotonicity") {
  const double base = levelize_ptc(10.0, 10, 30, 0.05, 0.075);
  for (double scale : {0.5, 2.0, 7.25}) {
    CHECK(levelize_ptc(10.0 * scale, 10, 30, 0.05, 0.075) ==
          doctest::Approx(base * scale).epsilon(1e-12));
  }
  double prev = levelize_ptc(27.50, 10, 30, 0.05, 0.0);
  for (double pen : {0.05, 0.075, 0.2, 0.9}) {
    const double cur = levelize_ptc(27.50, 10, 30, 0.05, pen);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("period discount weights") {
  // Undiscounted 5-year period counts its years, in both modes.
  CHECK(period_discount_weight(2031, 2035, 0.0, 2024, true) == doctest::Approx(5.0));
  CHECK(period_discount_weight(2031, 2035, 0.02, 2024, false) == doctest::Approx(5.0));
  // 2024-27 at 2%: sum_{k=0..3} 1.02^-k.
  double oracle = 0.0;
  for (int k = 0; k <= 3; ++k) oracle += std::pow(1.02, -k);
  const double w = period_discount_weight(2024, 2027, 0.02, 2024, true);
  CHECK(w == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(w == doctest::Approx(3.884).epsilon(1e-4));
}
