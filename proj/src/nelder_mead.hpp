// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace nbrig::detail {

struct NmOptions {
  double diam_tol = 1e-8;   // max vertex distance from the best point
  double f_tol = 1e-9;      // spread of objective values across the simplex
  long max_evals = 40000;
  double init_step = 0.05;  // initial simplex edge length per coordinate
};

struct NmResult {
  std::vector<double> x;
  double f;
  long n_evals;
  bool converged;
};

// Minimizes f by the downhill simplex method with standard coefficients.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, const NmOptions& opts);

}  // namespace nbrig::detail
