// SPDX-License-Identifier: Apache-2.0
#include "nbrig/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/ladder.hpp"
#include "nbrig/baselines.hpp"
#include "nbrig/errors.hpp"

namespace nbrig {

namespace {

void check_x(std::int64_t x, const char* fn) {
  if (x < 0) throw std::domain_error(std::string(fn) + ": x must be >= 0");
}

double pmf0(const NbrigParams& p) { return std::exp(rig_log_mgf(-p.r, p.mix)); }

}  // namespace

NbrigParams::NbrigParams(double r_, RigParams mix_) : r(r_), mix(mix_) {
  if (!std::isfinite(r) || r <= 0.0)
    throw std::invalid_argument("NbrigParams: r must be finite and > 0");
}

NbrigParams::NbrigParams(double r_, double alpha, double m)
    : NbrigParams(r_, RigParams(alpha, m)) {}

double pmf_direct(std::int64_t x, const NbrigParams& p) {
  check_x(x, "pmf_direct");
  if (x == 0) return pmf0(p);
  const detail::Eval e = detail::alt_sum(x, p.r, p.mix.alpha, p.mix.m);
  if (!(e.rel_bound <= detail::kGiveUpRel))
    throw PrecisionError(
        "pmf_direct: alternating sum lost more than 6 significant digits at "
        "the highest working precision");
  double v = std::exp(detail::log_binom_real(p.r, x) + e.log_value);
  if (v > 1.0) {
    if (v > 1.0 + 1e-9)
      throw PrecisionError("pmf_direct: value certified but exceeds 1");
    v = 1.0;
  }
  return v;
}

double pmf_recursive(std::int64_t k, const NbrigParams& p) {
  check_x(k, "pmf_recursive");
  if (k == 0) return pmf0(p);
  const detail::Eval e = detail::recursion_final(k, p.r, p.mix.alpha, p.mix.m);
  return std::min(1.0, std::exp(e.log_value));
}

double log_pmf(std::int64_t x, const NbrigParams& p) {
  check_x(x, "log_pmf");
  if (x == 0) return rig_log_mgf(-p.r, p.mix);
  const detail::Eval dir = detail::alt_sum(x, p.r, p.mix.alpha, p.mix.m);
  const detail::Eval rec = detail::recursion_final(x, p.r, p.mix.alpha, p.mix.m);
  const double dir_log = detail::log_binom_real(p.r, x) + dir.log_value;
  if (dir.rel_bound <= rec.rel_bound && std::isfinite(dir_log)) return dir_log;
  if (std::isfinite(rec.log_value)) return rec.log_value;
  throw PrecisionError("log_pmf: neither evaluation could be certified");
}

double pmf(std::int64_t x, const NbrigParams& p) {
  return std::min(1.0, std::exp(log_pmf(x, p)));
}

double cdf(std::int64_t x, const NbrigParams& p) {
  if (x < 0) return 0.0;
  if (x == 0) return pmf0(p);
  const auto col = detail::recursion_column(x, p.r, p.mix.alpha, p.mix.m);
  double s = 0.0;
  for (double v : col.probs) s += v;
  return std::min(1.0, s);
}

namespace {

PmfTable table_from_column(const NbrigParams& p, std::int64_t x_max) {
  const auto col = detail::recursion_column(x_max, p.r, p.mix.alpha, p.mix.m);
  PmfTable t{p, col.probs, col.tail_mass};
  t.probs[0] = pmf0(p);
  return t;
}

}  // namespace

PmfTable make_pmf_table(const NbrigParams& p, std::int64_t x_max) {
  check_x(x_max, "make_pmf_table");
  return table_from_column(p, x_max);
}

PmfTable make_pmf_table(const NbrigParams& p) {
  if (!(p.mix.alpha > 2.0))
    throw std::domain_error(
        "make_pmf_table: automatic truncation needs alpha > 2 (finite mean); "
        "pass x_max explicitly for heavy-tailed parameters");
  const double mu = mean(p);
  const auto floor_x = static_cast<std::int64_t>(10.0 * (mu + 1.0)) + 1;
  std::int64_t hi = std::max<std::int64_t>(16, floor_x);
  for (;;) {
    PmfTable t = table_from_column(p, hi);
    for (std::int64_t x = floor_x; x <= t.x_max(); ++x) {
      if (t.probs[x] < 1e-14) {
        t.probs.resize(static_cast<std::size_t>(x) + 1);
        double s = 0.0;
        for (double v : t.probs) s += v;
        t.tail_mass = std::max(0.0, 1.0 - s);
        return t;
      }
    }
    hi = hi + hi / 2 + 8;
    if (hi > 100000)
      throw std::domain_error("make_pmf_table: truncation rule did not converge");
  }
}

double survival(std::int64_t x, const NbrigParams& p) {
  if (x < 0) return 1.0;
  PmfTable t = (p.mix.alpha > 2.0) ? make_pmf_table(p)
                                   : make_pmf_table(p, x + 512);
  if (t.x_max() < x + 1) t = make_pmf_table(p, x + 16);
  double s = t.tail_mass;
  for (std::int64_t k = t.x_max(); k > x; --k) s += t.probs[k];
  return std::min(1.0, s);
}

double factorial_moment(int k, const NbrigParams& p) {
  if (k < 1) throw std::invalid_argument("factorial_moment: order must be >= 1");
  if (!(p.mix.alpha > 2.0 * k))
    throw std::domain_error(
        "factorial_moment: needs alpha > 2k (the mixing mgf at t = k must exist)");
  using detail::R50;
  const R50 a(p.mix.alpha), mm(p.mix.m);
  R50 sum = 0;
  double choose = 1.0;  // C(k, j), exact small integers
  for (int j = 0; j <= k; ++j) {
    using std::exp;
    R50 term = R50(choose) * exp(detail::log_mgf_t<R50>(R50(k - j), a, mm));
    sum += (j & 1) ? -term : term;
    choose = choose * (k - j) / (j + 1);
  }
  const double pref = std::exp(std::lgamma(p.r + k) - std::lgamma(p.r));
  return pref * static_cast<double>(sum);
}

double mean(const NbrigParams& p) {
  if (!(p.mix.alpha > 2.0))
    throw std::domain_error("mean: needs alpha > 2 (mgf at t = 1 must exist)");
  return p.r * std::expm1(rig_log_mgf(1.0, p.mix));
}

double second_moment(const NbrigParams& p) {
  if (!(p.mix.alpha > 4.0))
    throw std::domain_error("second_moment: needs alpha > 4 (mgf at t = 2 must exist)");
  const double m1 = rig_mgf(1.0, p.mix);
  const double m2 = rig_mgf(2.0, p.mix);
  const double r = p.r;
  return (r + r * r) * m2 - (r + 2.0 * r * r) * m1 + r * r;
}

double variance(const NbrigParams& p) {
  const double mu = p.r * std::expm1(rig_log_mgf(1.0, p.mix));
  return second_moment(p) - mu * mu;
}

DispersionReport dispersion_report(const NbrigParams& p) {
  if (!(p.mix.alpha > 4.0))
    throw std::domain_error("dispersion_report: needs alpha > 4");
  DispersionReport rep{};
  rep.mean = mean(p);
  rep.variance = variance(p);
  rep.ratio = rep.variance / rep.mean;
  const double p_star = 1.0 / rig_mgf(1.0, p.mix);
  rep.nb_matched_variance = nb_variance(NbParams(p.r, p_star));
  if (!(rep.ratio > 1.0) || !(rep.variance > rep.nb_matched_variance))
    throw std::logic_error("dispersion_report: overdispersion inequalities violated");
  return rep;
}

std::vector<std::int64_t> sample(std::size_t n, const NbrigParams& p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = rig_draw(gen, p.mix);
    const double scale = std::expm1(lambda);
    std::gamma_distribution<double> gamma(p.r, scale);
    const double g = gamma(gen);
    if (g > 0.0) {
      std::poisson_distribution<std::int64_t> pois(g);
      out[i] = pois(gen);
    } else {
      out[i] = 0;
    }
  }
  return out;
}

}  // namespace nbrig
