// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "nbrig/rig.hpp"

namespace nbrig {

struct MvNbrigParams {
  std::vector<double> rs;  // per-component shape r_1..r_d, all > 0
  RigParams mix;
  MvNbrigParams(std::vector<double> rs_, RigParams mix_);
  std::size_t dim() const { return rs.size(); }
  double r_tilde() const;
};

// Joint PMF by the d-dimensional alternating sum. Throws PrecisionError when
// the cancellation in the sum cannot be certified; use
// joint_pmf_via_univariate in that case.
double joint_pmf(const std::vector<std::int64_t>& xs, const MvNbrigParams& p);

// Joint PMF as a binomial-coefficient ratio times the univariate PMF of the
// component total (the stable route).
double joint_pmf_via_univariate(const std::vector<std::int64_t>& xs,
                                const MvNbrigParams& p);

struct MvMoments {
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<std::vector<double>> cov;
  std::vector<std::vector<double>> corr;
};

// Moments, covariance and correlation; requires alpha > 4.
MvMoments mv_moments(const MvNbrigParams& p);

}  // namespace nbrig
