// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace nbrig {

// Reciprocal inverse Gaussian mixing distribution, parameterized by shape
// alpha and scale-like m. The reciprocal of this variate is inverse Gaussian
// with mean m and shape alpha.
struct RigParams {
  double alpha;
  double m;
  RigParams(double alpha_, double m_);
};

// Density at z > 0.
double rig_pdf(double z, const RigParams& p);

// Moment generating function E[e^{tZ}], defined for t < alpha/2.
double rig_mgf(double t, const RigParams& p);

// log of rig_mgf, computed in a form that stays accurate for large
// |t| and small m. All internal mgf evaluations route through this.
double rig_log_mgf(double t, const RigParams& p);

// One draw using caller-owned generator state.
double rig_draw(std::mt19937_64& gen, const RigParams& p);

// n i.i.d. draws; deterministic for a given seed.
std::vector<double> rig_sample(std::size_t n, const RigParams& p, std::uint64_t seed);

}  // namespace nbrig
