#include "cemkit/finance.h"

#include <cmath>
#include <string>

#include "cemkit/common.h"

namespace cemkit {

double capital_recovery_factor(double rate, int life_years) {
  if (life_years < 1) {
    throw InvalidParameter("capital_recovery_factor: life_years must be >= 1, got " +
                           std::to_string(life_years));
  }
  if (rate < 0.0) {
    throw InvalidParameter("capital_recovery_factor: rate must be >= 0, got " +
                           std::to_string(rate));
  }
  if (rate == 0.0) return 1.0 / static_cast<double>(life_years);
  const double growth = std::pow(1.0 + rate, life_years);
  return rate * growth / (growth - 1.0);
}

double annuitize_capex(double overnight_per_kw, double itc_fraction, double rate,
                       int life_years) {
  if (overnight_per_kw < 0.0) {
    throw InvalidParameter("annuitize_capex: overnight cost must be >= 0, got " +
                           std::to_string(overnight_per_kw));
  }
  if (itc_fraction < 0.0 || itc_fraction >= 1.0) {
    throw InvalidParameter("annuitize_capex: itc_fraction must be in [0,1), got " +
                           std::to_string(itc_fraction));
  }
  return (1.0 - itc_fraction) * overnight_per_kw *
         capital_recovery_factor(rate, life_years);
}

double levelize_ptc(double ptc_per_mwh, int credit_years, int life_years,
                    double rate, double transfer_penalty) {
  if (credit_years > life_years) {
    throw InvalidParameter("levelize_ptc: credit_years (" +
                           std::to_string(credit_years) + ") exceeds life_years (" +
                           std::to_string(life_years) + ")");
  }
  if (credit_years < 0) {
    throw InvalidParameter("levelize_ptc: credit_years must be >= 0");
  }
  const double net = ptc_per_mwh * (1.0 - transfer_penalty);
  double present_value = 0.0;
  for (int year = 1; year <= credit_years; ++year) {
    present_value += net / std::pow(1.0 + rate, year);
  }
  return present_value * capital_recovery_factor(rate, life_years);
}

double period_discount_weight(int start_year, int end_year, double discount_rate,
                              int base_year, bool foresight) {
  if (end_year < start_year) {
    throw InvalidParameter("period_discount_weight: end_year before start_year");
  }
  const int years = end_year - start_year + 1;
  if (!foresight) return static_cast<double>(years);
  double weight = 0.0;
  for (int y = start_year; y <= end_year; ++y) {
    weight += std::pow(1.0 + discount_rate, -(y - base_year));
  }
  return weight;
}

}  // namespace cemkit
