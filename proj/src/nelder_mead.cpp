// SPDX-License-Identifier: Apache-2.0
#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nbrig::detail {

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, const NmOptions& opts) {
  const std::size_t n = x0.size();
  long evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> verts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += opts.init_step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(verts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> v2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      v2[i] = verts[order[i]];
      f2[i] = fv[order[i]];
    }
    verts.swap(v2);
    fv.swap(f2);
  };

  auto converged = [&] {
    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diam = std::max(diam, std::fabs(verts[i][j] - verts[0][j]));
    const double spread = std::isfinite(fv[n]) ? fv[n] - fv[0]
                                               : std::numeric_limits<double>::infinity();
    return diam < opts.diam_tol && spread < opts.f_tol;
  };

  sort_simplex();
  bool ok = false;
  while (evals < opts.max_evals) {
    if (converged()) {
      ok = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j] / static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = centroid[j] + coef * (verts[n][j] - centroid[j]);
      return x;
    };

    const auto xr = blend(-1.0);  // reflection
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const auto xe = blend(-2.0);  // expansion
      const double fe = eval(xe);
      if (fe < fr) {
        verts[n] = xe;
        fv[n] = fe;
      } else {
        verts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      verts[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = blend(outside ? -0.5 : 0.5);  // contraction
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[n])) {
        verts[n] = xc;
        fv[n] = fc;
      } else {  // shrink toward the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            verts[i][j] = verts[0][j] + 0.5 * (verts[i][j] - verts[0][j]);
          fv[i] = eval(verts[i]);
        }
      }
    }
    sort_simplex();
  }
  sort_simplex();
  return {verts[0], fv[0], evals, ok};
}

}  // namespace nbrig::detail
