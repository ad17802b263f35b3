// SPDX-License-Identifier: Apache-2.0
#include "nbrig/fit.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fit_driver.hpp"
#include "nbrig/baselines.hpp"
#include "nbrig/errors.hpp"
#include "nelder_mead.hpp"

namespace nbrig {

CountData make_count_data(std::vector<CountCell> cells) {
  std::sort(cells.begin(), cells.end(),
            [](const CountCell& a, const CountCell& b) { return a.x < b.x; });
  std::vector<CountCell> merged;
  for (const auto& c : cells) {
    if (c.x < 0) throw std::invalid_argument("CountData: counts must be nonnegative");
    if (c.n < 0) throw std::invalid_argument("CountData: frequencies must be nonnegative");
    if (!merged.empty() && merged.back().x == c.x)
      merged.back().n += c.n;
    else
      merged.push_back(c);
  }
  std::int64_t total = 0;
  for (const auto& c : merged) total += c.n;
  if (total <= 0) throw std::invalid_argument("CountData: total frequency must be positive");
  return CountData{std::move(merged), total};
}

double log_likelihood(const NbrigParams& p, const CountData& data) {
  double s = 0.0;
  for (const auto& c : data.cells)
    if (c.n > 0) s += static_cast<double>(c.n) * log_pmf(c.x, p);
  return s;
}

namespace detail {

DriverResult maximize(const std::function<double(const std::vector<double>&)>& objective,
                      const std::vector<std::vector<double>>& starts, double tol,
                      long max_evals) {
  long used = 0;
  auto obj_min = [&](const std::vector<double>& x) { return -objective(x); };

  const long per_start =
      std::max<long>(2000, max_evals / (2 * static_cast<long>(starts.size()) + 2));
  NmResult best{{}, std::numeric_limits<double>::infinity(), 0, false};
  for (const auto& s : starts) {
    NmOptions o;
    o.diam_tol = tol;
    o.f_tol = 1e-9;
    o.max_evals = per_start;
    o.init_step = 0.05;
    NmResult r = nelder_mead(obj_min, s, o);
    used += r.n_evals;
    if (r.f < best.f) best = r;
  }

  // Restart from the incumbent with shrinking simplexes until no gain.
  double step = 1e-3;
  for (int round = 0; round < 10 && used < max_evals; ++round) {
    NmOptions o;
    o.diam_tol = tol * 0.1;
    o.f_tol = 1e-10;
    o.max_evals = std::min<long>(4000, max_evals - used);
    o.init_step = step;
    NmResult r = nelder_mead(obj_min, best.x, o);
    used += r.n_evals;
    const double gain = best.f - r.f;
    if (r.f < best.f) best = r;
    if (gain <= 1e-9) break;
    step = std::max(step * 0.3, 1e-6);
  }

  // Coordinate parabola polish.
  const std::size_t n = best.x.size();
  for (double h : {1e-4, 1e-5, 3e-6}) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> xp = best.x, xm = best.x;
      xp[i] += h;
      xm[i] -= h;
      const double fp = obj_min(xp), fm = obj_min(xm);
      used += 2;
      const double denom = fp - 2.0 * best.f + fm;
      if (!(denom > 0.0)) continue;
      double delta = 0.5 * h * (fm - fp) / denom;
      delta = std::clamp(delta, -2.0 * h, 2.0 * h);
      std::vector<double> xt = best.x;
      xt[i] += delta;
      const double ft = obj_min(xt);
      ++used;
      if (ft < best.f) {
        best.x = xt;
        best.f = ft;
      }
    }
  }

  // Central finite-difference gradient of the objective at the optimum.
  double grad_max = 0.0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xp = best.x, xm = best.x;
    xp[i] += h;
    xm[i] -= h;
    const double g = (objective(xp) - objective(xm)) / (2.0 * h);
    used += 2;
    grad_max = std::max(grad_max, std::fabs(g));
  }

  DriverResult out;
  out.x = best.x;
  out.f = -best.f;
  out.n_evals = used;
  out.grad_max = grad_max;
  out.converged = grad_max < 1e-3 && used <= max_evals + 64;
  return out;
}

}  // namespace detail

GofResult chi_square_gof(const CountData& observed, const std::vector<double>& expected,
                         int n_params) {
  if (expected.size() != observed.cells.size())
    throw std::invalid_argument("chi_square_gof: expected vector must align with cells");
  for (double e : expected)
    if (!(e > 0.0))
      throw std::invalid_argument("chi_square_gof: expected frequencies must be > 0");

  GofResult res{};
  res.chi2_ungrouped = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double o = static_cast<double>(observed.cells[i].n);
    const double d = o - expected[i];
    res.chi2_ungrouped += d * d / expected[i];
  }

  // Merge from the largest count downward until each group's expected >= 5.
  std::vector<GofGroup> groups;
  GofGroup cur{0, 0, 0.0, 0.0};
  bool open = false;
  for (std::size_t k = expected.size(); k-- > 0;) {
    if (!open) {
      cur = GofGroup{observed.cells[k].x, observed.cells[k].x, 0.0, 0.0};
      open = true;
    }
    cur.x_lo = observed.cells[k].x;
    cur.observed += static_cast<double>(observed.cells[k].n);
    cur.expected += expected[k];
    if (cur.expected >= 5.0) {
      groups.push_back(cur);
      open = false;
    }
  }
  if (open) {
    if (groups.empty()) {
      groups.push_back(cur);
    } else {
      groups.back().x_lo = cur.x_lo;
      groups.back().observed += cur.observed;
      groups.back().expected += cur.expected;
    }
  }
  std::reverse(groups.begin(), groups.end());

  res.chi2 = 0.0;
  for (const auto& g : groups) {
    const double d = g.observed - g.expected;
    res.chi2 += d * d / g.expected;
  }
  const int df_raw = static_cast<int>(groups.size()) - n_params - 1;
  res.df_floored = df_raw < 1;
  res.df = std::max(1, df_raw);
  res.p_valid = !res.df_floored;
  res.p_value = res.p_valid
                    ? boost::math::gamma_q(0.5 * res.df, 0.5 * res.chi2)
                    : std::numeric_limits<double>::quiet_NaN();
  res.grouping = std::move(groups);
  return res;
}

namespace {

FitReport assemble_report(std::string model, std::vector<std::string> names,
                          std::vector<double> params, double log_l, int k,
                          std::vector<double> expected, const CountData& data,
                          bool converged, long n_evals) {
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

FitReport fit_nbrig_mle(const CountData& data, const FitOptions& opts) {
  std::size_t distinct = data.cells.size();
  if (distinct < 2)
    throw std::invalid_argument(
        "fit_nbrig_mle: needs at least 2 distinct counts (likelihood is flat in r otherwise)");

  auto objective = [&](const std::vector<double>& t) -> double {
    try {
      const NbrigParams p(std::exp(t[0]), std::exp(t[1]), std::exp(t[2]));
      const double v = log_likelihood(p, data);
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts;
  if (!opts.inits.empty()) {
    for (const auto& q : opts.inits)
      starts.push_back({std::log(q[0]), std::log(q[1]), std::log(q[2])});
  } else {
    struct Cand {
      std::vector<double> t;
      double f;
    };
    std::vector<Cand> cands;
    for (double r : {0.5, 1.0, 2.0, 5.0})
      for (double a : {5.0, 25.0, 60.0})
        for (double m : {1.0, 5.0, 20.0, 40.0}) {
          std::vector<double> t{std::log(r), std::log(a), std::log(m)};
          cands.push_back({t, objective(t)});
        }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.f > b.f; });
    for (std::size_t i = 0; i < cands.size() && i < 6; ++i) starts.push_back(cands[i].t);
  }

  const detail::DriverResult dr =
      detail::maximize(objective, starts, opts.tol, opts.max_evals);
  const NbrigParams fitted(std::exp(dr.x[0]), std::exp(dr.x[1]), std::exp(dr.x[2]));

  std::vector<double> expected;
  expected.reserve(data.cells.size());
  for (const auto& c : data.cells)
    expected.push_back(static_cast<double>(data.total) * pmf(c.x, fitted));

  FitReport rep = assemble_report("nbrig", {"r", "alpha", "m"},
                                  {fitted.r, fitted.mix.alpha, fitted.mix.m}, dr.f, 3,
                                  std::move(expected), data, dr.converged, dr.n_evals);
  if (!(fitted.mix.alpha > 4.0))
    rep.warnings.push_back("alpha <= 4: variance-based diagnostics are unavailable");
  return rep;
}

std::vector<FitReport> compare_models(const CountData& data) {
  std::vector<FitReport> reports;
  reports.push_back(fit_poisson(data));
  reports.push_back(fit_nb(data));
  reports.push_back(fit_nbrig_mle(data));
  std::stable_sort(reports.begin(), reports.end(),
                   [](const FitReport& a, const FitReport& b) { return a.aic < b.aic; });
  return reports;
}

}  // namespace nbrig
