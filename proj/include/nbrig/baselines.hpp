// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "nbrig/report.hpp"

namespace nbrig {

struct PoissonParams {
  double lambda;
  explicit PoissonParams(double lambda_);
};

struct NbParams {
  double r;
  double p;
  NbParams(double r_, double p_);
};

double poisson_pmf(std::int64_t x, const PoissonParams& p);
double poisson_log_pmf(std::int64_t x, const PoissonParams& p);

double nb_pmf(std::int64_t x, const NbParams& p);
double nb_log_pmf(std::int64_t x, const NbParams& p);
double nb_mean(const NbParams& p);
double nb_variance(const NbParams& p);

// Closed-form Poisson MLE (weighted sample mean) with goodness-of-fit report.
FitReport fit_poisson(const CountData& data);

// Negative binomial MLE over (log r, logit p) with the shared optimizer.
FitReport fit_nb(const CountData& data);

}  // namespace nbrig
