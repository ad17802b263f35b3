// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace nbrig::detail {

struct DriverResult {
  std::vector<double> x;  // maximizer in transformed coordinates
  double f;               // maximal objective value
  long n_evals;
  bool converged;         // gradient hygiene satisfied within budget
  double grad_max;        // max |central finite-difference gradient component|
};

// Maximizes `objective` (e.g. a log-likelihood over unconstrained transformed
// coordinates): simplex descent from every start, restart-from-optimum until
// the gain falls below 1e-9, coordinate parabola polish, then a central
// finite-difference gradient check (step 1e-5, max-norm threshold 1e-3).
DriverResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                      const std::vector<std::vector<double>>& starts, double tol,
                      long max_evals);

}  // namespace nbrig::detail
