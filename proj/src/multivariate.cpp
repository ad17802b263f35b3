// SPDX-License-Identifier: Apache-2.0
#include "nbrig/multivariate.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "detail/ladder.hpp"
#include "nbrig/distribution.hpp"
#include "nbrig/errors.hpp"

namespace nbrig {

MvNbrigParams::MvNbrigParams(std::vector<double> rs_, RigParams mix_)
    : rs(std::move(rs_)), mix(mix_) {
  if (rs.empty()) throw std::invalid_argument("MvNbrigParams: need at least one component");
  for (double r : rs)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("MvNbrigParams: every r_i must be finite and > 0");
}

double MvNbrigParams::r_tilde() const {
  double s = 0.0;
  for (double r : rs) s += r;
  return s;
}

namespace {

struct Totals {
  std::int64_t x_tilde;
  double log_prod_binom;  // sum over components of log C(r_i + x_i - 1, x_i)
};

Totals component_totals(const std::vector<std::int64_t>& xs, const MvNbrigParams& p) {
  if (xs.size() != p.dim())
    throw std::invalid_argument("joint pmf: xs length must match the number of components");
  Totals t{0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0) throw std::invalid_argument("joint pmf: counts must be >= 0");
    t.x_tilde += xs[i];
    t.log_prod_binom += detail::log_binom_real(p.rs[i], xs[i]);
  }
  return t;
}

double clamp_prob(double v) {
  if (v > 1.0) {
    if (v < 1.0 + 1e-9) return 1.0;
    throw std::logic_error("joint pmf exceeded 1 beyond rounding slack");
  }
  return v < 0.0 ? 0.0 : v;
}

}  // namespace

double joint_pmf(const std::vector<std::int64_t>& xs, const MvNbrigParams& p) {
  const Totals t = component_totals(xs, p);
  const double rt = p.r_tilde();
  if (t.x_tilde == 0) return std::exp(rig_log_mgf(-rt, p.mix));

  const detail::Eval s = detail::alt_sum(t.x_tilde, rt, p.mix.alpha, p.mix.m);
  if (!(s.rel_bound <= detail::kGiveUpRel))
    throw PrecisionError(
        "joint_pmf: alternating sum lost too many digits; "
        "use joint_pmf_via_univariate instead");
  return clamp_prob(std::exp(t.log_prod_binom + s.log_value));
}

double joint_pmf_via_univariate(const std::vector<std::int64_t>& xs,
                                const MvNbrigParams& p) {
  const Totals t = component_totals(xs, p);
  const double rt = p.r_tilde();
  if (t.x_tilde == 0) return std::exp(rig_log_mgf(-rt, p.mix));

  const double log_ratio = t.log_prod_binom - detail::log_binom_real(rt, t.x_tilde);
  const NbrigParams total(rt, p.mix);
  return clamp_prob(std::exp(log_ratio) * pmf_recursive(t.x_tilde, total));
}

MvMoments mv_moments(const MvNbrigParams& p) {
  if (!(p.mix.alpha > 4.0))
    throw std::domain_error("mv_moments: needs alpha > 4 for second moments");

  const std::size_t d = p.dim();
  const double m1 = rig_mgf(1.0, p.mix);
  const double m2 = rig_mgf(2.0, p.mix);
  const double mean_fac = std::expm1(rig_log_mgf(1.0, p.mix));
  const double gap = m2 - m1 * m1;

  MvMoments out;
  out.means.resize(d);
  out.variances.resize(d);
  out.cov.assign(d, std::vector<double>(d, 0.0));
  out.corr.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    out.means[i] = p.rs[i] * mean_fac;
    out.variances[i] = variance(NbrigParams(p.rs[i], p.mix));
  }
  for (std::size_t i = 0; i < d; ++i) {
    out.cov[i][i] = out.variances[i];
    out.corr[i][i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      const double c = p.rs[i] * p.rs[j] * gap;
      out.cov[i][j] = out.cov[j][i] = c;
      const double rho = c / std::sqrt(out.variances[i] * out.variances[j]);
      out.corr[i][j] = out.corr[j][i] = rho;
    }
  }
  return out;
}

}  // namespace nbrig
