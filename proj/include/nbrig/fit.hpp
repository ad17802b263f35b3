// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "nbrig/distribution.hpp"
#include "nbrig/report.hpp"

namespace nbrig {

double log_likelihood(const NbrigParams& p, const CountData& data);

struct FitOptions {
  // Starting points (r, alpha, m); empty selects the built-in grid.
  std::vector<std::array<double, 3>> inits;
  double tol = 1e-8;
  long max_evals = 200000;
};

FitReport fit_nbrig_mle(const CountData& data, const FitOptions& opts = {});

// Groups trailing cells (largest count downward) until every grouped
// expected frequency is >= 5, then computes the chi-square statistic,
// degrees of freedom and upper-tail p-value. The ungrouped statistic over
// the raw cells is reported alongside as a diagnostic.
GofResult chi_square_gof(const CountData& observed, const std::vector<double>& expected,
                         int n_params);

// Fits Poisson, negative binomial and the mixed model; ascending by AIC.
std::vector<FitReport> compare_models(const CountData& data);

}  // namespace nbrig
