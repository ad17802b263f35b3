// SPDX-License-Identifier: Apache-2.0
#include "nbrig/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/ladder.hpp"
#include "nbrig/errors.hpp"

namespace nbrig {

SeverityPmf::SeverityPmf(const std::vector<std::pair<std::int64_t, double>>& entries) {
  std::int64_t max_y = 0;
  for (const auto& [y, fy] : entries) {
    if (y == 0 && fy != 0.0)
      throw std::invalid_argument(
          "SeverityPmf: f(0) > 0 is not supported; remove the zero mass "
          "analytically (condition on at least one positive claim) first");
    if (y < 0) throw std::invalid_argument("SeverityPmf: severities must be positive");
    if (!(fy >= 0.0) || !std::isfinite(fy))
      throw std::invalid_argument("SeverityPmf: masses must be finite and >= 0");
    max_y = std::max(max_y, y);
  }
  if (max_y < 1) throw std::invalid_argument("SeverityPmf: no positive-severity mass");
  probs.assign(static_cast<std::size_t>(max_y) + 1, 0.0);
  for (const auto& [y, fy] : entries) {
    if (y >= 1) {
      if (probs[y] != 0.0)
        throw std::invalid_argument("SeverityPmf: duplicate severity value");
      probs[y] = fy;
    }
  }
  double sum = 0.0;
  for (double v : probs) sum += v;
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("SeverityPmf: masses must sum to 1 (within 1e-12)");
}

bool SeverityPmf::is_unit_mass_at_one() const {
  if (probs.size() < 2 || probs[1] != 1.0) return false;
  for (std::size_t y = 2; y < probs.size(); ++y)
    if (probs[y] != 0.0) return false;
  return true;
}

double AggregateDist::mass(std::int64_t x) const {
  if (x == 0) return atom0;
  if (x < 1 || x > x_max()) return 0.0;
  return probs[static_cast<std::size_t>(x) - 1];
}

namespace {

double atom_closed_form(const NbrigParams& p) {
  return std::exp(rig_log_mgf(-p.r, p.mix));
}

// One run of the aggregate recursion at precision Real over the shift
// triangle {(x, j) : x + j <= x_max}, with per-entry error amplification.
template <class Real>
struct AggRun {
  std::vector<double> g;          // g(x), x = 0..x_max (shift j = 0)
  std::vector<double> rel_bound;  // certified relative bound per entry
  double tail_mass;
  double worst;
};

template <class Real>
AggRun<Real> aggregate_eval(const NbrigParams& p, const SeverityPmf& f,
                            std::int64_t x_max) {
  using std::exp;
  const double eps = static_cast<double>(std::numeric_limits<Real>::epsilon());
  const Real a(p.mix.alpha), mm(p.mix.m);
  const std::int64_t my = f.max_y();
  std::vector<Real> fy(f.probs.begin(), f.probs.end());

  // layer[x][j] = g(x; r + j); amp mirrors it with magnitude bounds.
  std::vector<std::vector<Real>> layer(static_cast<std::size_t>(x_max) + 1);
  std::vector<std::vector<double>> amp(static_cast<std::size_t>(x_max) + 1);
  layer[0].resize(static_cast<std::size_t>(x_max) + 1);
  amp[0].resize(static_cast<std::size_t>(x_max) + 1);
  for (std::int64_t j = 0; j <= x_max; ++j) {
    const Real logm = detail::log_mgf_t<Real>(-(Real(p.r) + j), a, mm);
    layer[0][j] = exp(logm);
    amp[0][j] = std::fabs(static_cast<double>(layer[0][j])) *
                (3.0 + std::fabs(static_cast<double>(logm)));
  }

  for (std::int64_t x = 1; x <= x_max; ++x) {
    layer[x].resize(static_cast<std::size_t>(x_max - x) + 1);
    amp[x].resize(static_cast<std::size_t>(x_max - x) + 1);
    for (std::int64_t j = 0; j <= x_max - x; ++j) {
      const Real rp = Real(p.r) + j;
      Real acc = 0;
      double acc_amp = 0.0;
      const std::int64_t y_hi = std::min<std::int64_t>(x, my);
      for (std::int64_t y = 1; y <= y_hi; ++y) {
        if (f.probs[y] == 0.0) continue;
        const Real w1 = (rp * y + (x - y)) / x;
        const Real w2 = (rp * y) / x;
        acc += fy[y] * (w1 * layer[x - y][j] - w2 * layer[x - y][j + 1]);
        acc_amp += f.probs[y] *
                   (static_cast<double>(w1) * amp[x - y][j] +
                    static_cast<double>(w2) * amp[x - y][j + 1]);
      }
      layer[x][j] = acc;
      amp[x][j] = acc_amp + 6.0 * std::fabs(static_cast<double>(acc));
    }
  }

  AggRun<Real> out;
  out.g.resize(static_cast<std::size_t>(x_max) + 1);
  out.rel_bound.resize(static_cast<std::size_t>(x_max) + 1);
  out.worst = 0.0;
  Real total = 0;
  for (std::int64_t x = 0; x <= x_max; ++x) {
    const Real v = layer[x][0];
    total += v;
    out.g[x] = static_cast<double>(v);
    const double mag = std::fabs(out.g[x]);
    const double am = amp[x][0];
    double b;
    if (am == 0.0)
      b = 0.0;  // exact zero propagated from the severity support
    else if (mag > 0.0)
      b = eps * am / mag;
    else
      b = std::numeric_limits<double>::infinity();
    out.rel_bound[x] = b;
    out.worst = std::max(out.worst, b);
  }
  out.tail_mass = std::max(0.0, static_cast<double>(Real(1) - total));
  return out;
}

AggregateDist from_run(const NbrigParams& p, const std::vector<double>& g,
                       double tail_mass) {
  AggregateDist out{p, atom_closed_form(p),
                    std::vector<double>(g.begin() + 1, g.end()), tail_mass, "recursion"};
  for (double& v : out.probs)
    if (v < 0.0 && v > -1e-10) v = 0.0;
  return out;
}

}  // namespace

ConvResult convolve(const std::vector<double>& a, const std::vector<double>& b,
                    std::int64_t x_max) {
  if (x_max < 0) throw std::invalid_argument("convolve: x_max must be >= 0");
  const std::size_t full = a.empty() || b.empty() ? 0 : a.size() + b.size() - 1;
  std::vector<double> c(full, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  ConvResult out;
  const std::size_t keep = std::min<std::size_t>(full, static_cast<std::size_t>(x_max) + 1);
  out.probs.assign(c.begin(), c.begin() + keep);
  out.probs.resize(static_cast<std::size_t>(x_max) + 1, 0.0);
  out.tail = 0.0;
  for (std::size_t k = keep; k < full; ++k) out.tail += c[k];
  return out;
}

AggregateDist aggregate_pmf(const NbrigParams& p, const SeverityPmf& f, std::int64_t x_max,
                            const AggregateOptions& opts) {
  if (x_max < 0) throw std::invalid_argument("aggregate_pmf: x_max must be >= 0");

  if (opts.allow_count_reduction && f.is_unit_mass_at_one()) {
    PmfTable t = make_pmf_table(p, x_max);
    AggregateDist out{p, t.probs[0],
                      std::vector<double>(t.probs.begin() + 1, t.probs.end()),
                      t.tail_mass, "count"};
    return out;
  }

  std::vector<double> g;
  double tail = 0.0;
  {
    auto run = aggregate_eval<double>(p, f, x_max);
    if (run.worst <= detail::kTargetRel) {
      g = run.g;
      tail = run.tail_mass;
    }
  }
  if (g.empty()) {
    auto run = aggregate_eval<detail::R50>(p, f, x_max);
    if (run.worst <= detail::kTargetRel) {
      g = run.g;
      tail = run.tail_mass;
    }
  }
  if (g.empty()) {
    auto run = aggregate_eval<detail::R150>(p, f, x_max);
    if (run.worst <= detail::kTargetRel) {
      g = run.g;
      tail = run.tail_mass;
    }
  }
  if (g.empty()) {
    auto run = aggregate_eval<detail::R400>(p, f, x_max);
    g = run.g;
    tail = run.tail_mass;
  }

  for (double v : g) {
    if (v < -1e-10) {
      // Recursion went unstable; the convolution definition is authoritative.
      std::int64_t n_max = x_max;
      PmfTable t = make_pmf_table(p, n_max);
      while (t.tail_mass > 1e-12 && n_max < 100000) {
        n_max = 2 * n_max + 16;
        t = make_pmf_table(p, n_max);
      }
      AggregateDist out = aggregate_bruteforce(p, f, x_max, n_max);
      out.method = "bruteforce";
      return out;
    }
  }
  return from_run(p, g, tail);
}

AggregateDist aggregate_bruteforce(const NbrigParams& p, const SeverityPmf& f,
                                   std::int64_t x_max, std::int64_t n_max) {
  if (x_max < 0) throw std::invalid_argument("aggregate_bruteforce: x_max must be >= 0");
  if (n_max < 0) throw std::invalid_argument("aggregate_bruteforce: n_max must be >= 0");

  const PmfTable counts = make_pmf_table(p, n_max);
  std::vector<double> acc(static_cast<std::size_t>(x_max) + 1, 0.0);
  double acc_tail = 0.0;

  std::vector<double> cur{1.0};  // zero-fold convolution: unit mass at 0
  cur.resize(static_cast<std::size_t>(x_max) + 1, 0.0);
  double cur_tail = 0.0;
  acc[0] += counts.probs[0];

  double sev_mass = 0.0;
  for (double v : f.probs) sev_mass += v;

  for (std::int64_t n = 1; n <= n_max; ++n) {
    ConvResult next = convolve(cur, f.probs, x_max);
    cur_tail = cur_tail * sev_mass + next.tail;
    cur = std::move(next.probs);
    const double pn = counts.probs[n];
    for (std::size_t x = 0; x <= static_cast<std::size_t>(x_max); ++x)
      acc[x] += pn * cur[x];
    acc_tail += pn * cur_tail;
  }

  // Tail counts only mass the computed convolutions pushed past x_max; the
  // count mass beyond n_max is the caller's truncation budget.
  AggregateDist out{p, acc[0], std::vector<double>(acc.begin() + 1, acc.end()), acc_tail,
                    "bruteforce"};
  return out;
}

}  // namespace nbrig
