// SPDX-License-Identifier: Apache-2.0
#include "nbrig/rig.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbrig {

RigParams::RigParams(double alpha_, double m_) : alpha(alpha_), m(m_) {
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw std::invalid_argument("RigParams: alpha must be finite and > 0");
  if (!std::isfinite(m) || m <= 0.0)
    throw std::invalid_argument("RigParams: m must be finite and > 0");
}

double rig_pdf(double z, const RigParams& p) {
  if (!(z > 0.0))
    throw std::domain_error("rig_pdf: z must be > 0");
  const double zm = z * p.m;
  const double expo = -(p.alpha / (2.0 * p.m)) * (zm - 2.0 + 1.0 / zm);
  return std::sqrt(p.alpha / (2.0 * M_PI * z)) * std::exp(expo);
}

double rig_log_mgf(double t, const RigParams& p) {
  if (!(t < p.alpha / 2.0))
    throw std::domain_error("rig_log_mgf: requires t < alpha/2 (mgf diverges)");
  const double u = 2.0 * t / p.alpha;
  return -0.5 * std::log1p(-u) + (2.0 * t / p.m) / (1.0 + std::sqrt(1.0 - u));
}

double rig_mgf(double t, const RigParams& p) { return std::exp(rig_log_mgf(t, p)); }

double rig_draw(std::mt19937_64& gen, const RigParams& p) {
  // Reciprocal of an inverse Gaussian draw (Michael-Schucany-Haas).
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double mu = p.m;
  const double lambda = p.alpha;
  double y = normal(gen);
  y *= y;
  double x = mu + mu * mu * y / (2.0 * lambda) -
             (mu / (2.0 * lambda)) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  const double w = (unif(gen) <= mu / (mu + x)) ? x : mu * mu / x;
  return 1.0 / w;
}

std::vector<double> rig_sample(std::size_t n, const RigParams& p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rig_draw(gen, p);
  return out;
}

}  // namespace nbrig
