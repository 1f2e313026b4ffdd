#pragma once

#include <cstdint>

namespace cemkit {

// Harmonized financial assumptions shared by all runs.
struct FinancialParams {
  double wacc_default = 0.05;          // cost of capital for all assets
  double discount_rate = 0.02;         // social discount rate (foresight/NPV)
  double unserved_penalty = 5000.0;    // $/MWh
  double ptc_transfer_penalty = 0.075; // fraction lost when monetizing PTC
  int ptc_credit_years = 10;           // years a new facility earns the PTC
  int amortization_life = 30;          // default asset life, years
};

// Annuity rate converting overnight capital cost into equal annual payments.
// Returns 1/n in the zero-rate limit.
double capital_recovery_factor(double rate, int life_years);

// Annualized capital cost in $/kW-yr after the investment tax credit.
double annuitize_capex(double overnight_per_kw, double itc_fraction, double rate,
                       int life_years);

// Present value of a time-limited production credit re-amortized over the
// asset life; returned as a nonnegative $/MWh magnitude to be applied as a
// negative variable cost.
double levelize_ptc(double ptc_per_mwh, int credit_years, int life_years,
                    double rate, double transfer_penalty);

// Objective weight of one planning period. Foresight discounts each calendar
// year back to the horizon base year; myopic counts years undiscounted.
double period_discount_weight(int start_year, int end_year, double discount_rate,
                              int base_year, bool foresight);

}  // namespace cemkit
