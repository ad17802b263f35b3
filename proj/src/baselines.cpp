// SPDX-License-Identifier: Apache-2.0
#include "nbrig/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fit_driver.hpp"
#include "nbrig/fit.hpp"

namespace nbrig {

PoissonParams::PoissonParams(double lambda_) : lambda(lambda_) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw std::invalid_argument("PoissonParams: lambda must be finite and > 0");
}

NbParams::NbParams(double r_, double p_) : r(r_), p(p_) {
  if (!std::isfinite(r) || r <= 0.0)
    throw std::invalid_argument("NbParams: r must be finite and > 0");
  if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
    throw std::invalid_argument("NbParams: p must lie in (0, 1)");
}

double poisson_log_pmf(std::int64_t x, const PoissonParams& p) {
  if (x < 0) return -std::numeric_limits<double>::infinity();
  const double xd = static_cast<double>(x);
  return xd * std::log(p.lambda) - p.lambda - std::lgamma(xd + 1.0);
}

double poisson_pmf(std::int64_t x, const PoissonParams& p) {
  return x < 0 ? 0.0 : std::exp(poisson_log_pmf(x, p));
}

double nb_log_pmf(std::int64_t x, const NbParams& p) {
  if (x < 0) return -std::numeric_limits<double>::infinity();
  const double xd = static_cast<double>(x);
  const double lchoose =
      std::lgamma(p.r + xd) - std::lgamma(p.r) - std::lgamma(xd + 1.0);
  return lchoose + p.r * std::log(p.p) + xd * std::log1p(-p.p);
}

double nb_pmf(std::int64_t x, const NbParams& p) {
  return x < 0 ? 0.0 : std::exp(nb_log_pmf(x, p));
}

double nb_mean(const NbParams& p) { return p.r * (1.0 - p.p) / p.p; }

double nb_variance(const NbParams& p) { return p.r * (1.0 - p.p) / (p.p * p.p); }

namespace {

double weighted_mean(const CountData& data) {
  double s = 0.0;
  for (const auto& c : data.cells)
    s += static_cast<double>(c.x) * static_cast<double>(c.n);
  return s / static_cast<double>(data.total);
}

FitReport finish(std::string model, std::vector<std::string> names,
                 std::vector<double> params, double log_l, int k,
                 std::vector<double> expected, const CountData& data, bool converged,
                 long n_evals) {
  FitReport rep;
  rep.model = std::move(model);
  rep.param_names = std::move(names);
  rep.params = std::move(params);
  rep.log_l = log_l;
  rep.aic = 2.0 * k - 2.0 * log_l;
  rep.expected = std::move(expected);
  rep.converged = converged;
  rep.n_evals = n_evals;
  GofResult gof = chi_square_gof(data, rep.expected, k);
  rep.chi2 = gof.chi2;
  rep.chi2_ungrouped = gof.chi2_ungrouped;
  rep.df = gof.df;
  rep.p_value = gof.p_value;
  rep.p_valid = gof.p_valid;
  rep.df_floored = gof.df_floored;
  rep.grouping = std::move(gof.grouping);
  if (rep.df_floored)
    rep.warnings.push_back("too few grouped cells: df floored at 1, p-value omitted");
  return rep;
}

}  // namespace

FitReport fit_poisson(const CountData& data) {
  const double mu = weighted_mean(data);
  if (!(mu > 0.0))
    throw std::domain_error(
        "fit_poisson: sample mean is 0; lambda = 0 is outside the open parameter space");
  const PoissonParams fitted(mu);

  auto objective = [&](const std::vector<double>& t) {
    const PoissonParams q(std::exp(t[0]));
    double s = 0.0;
    for (const auto& c : data.cells)
      s += static_cast<double>(c.n) * poisson_log_pmf(c.x, q);
    return s;
  };
  const double log_l = objective({std::log(mu)});
  // Closed-form MLE; still report the gradient hygiene numbers honestly.
  const double h = 1e-5;
  const double g =
      (objective({std::log(mu) + h}) - objective({std::log(mu) - h})) / (2.0 * h);

  std::vector<double> expected;
  for (const auto& c : data.cells)
    expected.push_back(static_cast<double>(data.total) * poisson_pmf(c.x, fitted));
  return finish("poisson", {"lambda"}, {mu}, log_l, 1, std::move(expected), data,
                std::fabs(g) < 1e-3, 3);
}

FitReport fit_nb(const CountData& data) {
  if (data.cells.size() < 2)
    throw std::invalid_argument("fit_nb: needs at least 2 distinct counts");
  const double mu = weighted_mean(data);
  if (!(mu > 0.0))
    throw std::domain_error("fit_nb: sample mean is 0; no interior MLE exists");
  double ssq = 0.0;
  for (const auto& c : data.cells)
    ssq += static_cast<double>(c.n) * static_cast<double>(c.x) * static_cast<double>(c.x);
  const double var = ssq / static_cast<double>(data.total) - mu * mu;

  auto objective = [&](const std::vector<double>& t) -> double {
    try {
      const NbParams q(std::exp(t[0]), 1.0 / (1.0 + std::exp(-t[1])));
      double s = 0.0;
      for (const auto& c : data.cells)
        s += static_cast<double>(c.n) * nb_log_pmf(c.x, q);
      return std::isfinite(s) ? s : -std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  double r0 = 1.0, p0 = 0.5;
  if (var > mu) {
    r0 = mu * mu / (var - mu);
    p0 = r0 / (r0 + mu);
  }
  std::vector<std::vector<double>> starts{
      {std::log(r0), logit(p0)},
      {std::log(1.0), logit(1.0 / (1.0 + mu))},
      {std::log(0.5), logit(0.5)},
      {std::log(5.0), logit(5.0 / (5.0 + mu))},
  };

  const detail::DriverResult dr = detail::maximize(objective, starts, 1e-8, 120000);
  const NbParams fitted(std::exp(dr.x[0]), 1.0 / (1.0 + std::exp(-dr.x[1])));

  std::vector<double> expected;
  for (const auto& c : data.cells)
    expected.push_back(static_cast<double>(data.total) * nb_pmf(c.x, fitted));
  return finish("nb", {"r", "p"}, {fitted.r, fitted.p}, dr.f, 2, std::move(expected),
                data, dr.converged, dr.n_evals);
}

}  // namespace nbrig
