// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace nbrig {

struct CountCell {
  std::int64_t x;  // observed count value
  std::int64_t n;  // frequency of that value
};

// Observed count/frequency pairs with strictly increasing counts.
struct CountData {
  std::vector<CountCell> cells;
  std::int64_t total;
};

// Sorts cells, merges duplicate counts by summing frequencies, validates.
CountData make_count_data(std::vector<CountCell> cells);

// One merged cell of a grouped chi-square table, covering counts
// x_lo..x_hi of the observed data.
struct GofGroup {
  std::int64_t x_lo;
  std::int64_t x_hi;
  double observed;
  double expected;
};

struct GofResult {
  double chi2;             // statistic over grouped cells
  int df;                  // grouped cells - n_params - 1, floored at 1
  double p_value;          // upper-tail chi-square probability; NaN if omitted
  bool p_valid;            // false when too few grouped cells remained
  bool df_floored;         // true when the df floor was applied
  double chi2_ungrouped;   // same statistic over the raw (ungrouped) cells
  std::vector<GofGroup> grouping;
};

struct FitReport {
  std::string model;  // "poisson" | "nb" | "nbrig"
  std::vector<std::string> param_names;
  std::vector<double> params;
  double log_l = 0.0;
  double chi2 = 0.0;
  double chi2_ungrouped = 0.0;
  int df = 0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool p_valid = false;
  double aic = 0.0;
  std::vector<double> expected;  // fitted expected frequency per observed cell
  std::vector<GofGroup> grouping;
  bool converged = false;
  long n_evals = 0;
  bool df_floored = false;
  std::vector<std::string> warnings;
};

}  // namespace nbrig
