// SPDX-License-Identifier: Apache-2.0
#pragma once
//
// Escalating-precision evaluation engines for the mixed-count PMF.
//
// Both PMF algorithms (the alternating sum over mgf values and the shifted
// recursion) combine seed values exp(logM(-(r+j))) that cancel catastrophically
// as x grows: at the fitted case-study parameters the relative precision lost
// is roughly half a decimal digit per unit of x, so double arithmetic returns
// garbage well before x = 20. Each engine therefore runs at the cheapest
// precision level whose running error bound certifies the result, escalating
// through 50, 150 and 400 decimal digits when needed. Bounds are tracked in
// double alongside the working-precision values; they only need magnitudes.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/log1p.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace nbrig::detail {

namespace mp = boost::multiprecision;
using R50 = mp::number<mp::cpp_bin_float<50>, mp::et_off>;
using R150 = mp::number<mp::cpp_bin_float<150>, mp::et_off>;
using R400 = mp::number<mp::cpp_bin_float<400>, mp::et_off>;

// Relative accuracy demanded before an evaluation is accepted without
// escalating further, and the certification level beyond which the direct
// algorithm refuses to return a value at all.
inline constexpr double kTargetRel = 1e-13;
inline constexpr double kGiveUpRel = 1e-6;

struct Eval {
  double log_value;  // log of the (positive) result
  double rel_bound;  // certified relative error bound; +inf when uncertified
};

template <class Real>
Real log_mgf_t(const Real& t, const Real& alpha, const Real& m) {
  using std::sqrt;
  const Real u = 2 * t / alpha;
  return -boost::math::log1p(-u) / 2 + (2 * t / m) / (1 + sqrt(1 - u));
}

// log(sum) and bound for S(x) = sum_{j=0..x} C(x,j) (-1)^j M(-(r+j)),
// via Neumaier-compensated summation. log_value excludes any prefactor.
// C(x,j) is advanced multiplicatively (its forward error, <= 2j ulps, is
// folded into the bound factor); per-term lgamma at working precision would
// dominate the runtime.
template <class Real>
Eval alt_sum_eval(std::int64_t x, double r, double alpha, double m) {
  using std::exp;
  using std::fabs;
  using std::log;
  const double eps = static_cast<double>(std::numeric_limits<Real>::epsilon());
  const Real a(alpha), mm(m);

  Real sum = 0, comp = 0, abs_sum = 0;
  Real coef = 1;  // C(x, j)
  double max_abs_logm = 0;
  for (std::int64_t j = 0; j <= x; ++j) {
    const Real logm = log_mgf_t<Real>(-(Real(r) + j), a, mm);
    max_abs_logm = std::max(max_abs_logm, std::fabs(static_cast<double>(logm)));
    Real term = coef * exp(logm);
    if (j & 1) term = -term;
    abs_sum += fabs(term);
    const Real s = sum + term;
    if (fabs(sum) >= fabs(term))
      comp += (sum - s) + term;
    else
      comp += (term - s) + sum;
    sum = s;
    if (j < x) coef = coef * Real(x - j) / Real(j + 1);
  }
  sum += comp;

  const double factor = 6.0 + 2.0 * static_cast<double>(x) + max_abs_logm;
  if (!(sum > 0))
    return {std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::infinity()};
  const double cond = static_cast<double>(abs_sum / sum);
  return {static_cast<double>(log(sum)), eps * cond * factor};
}

// Drives alt_sum_eval through the precision ladder.
inline Eval alt_sum(std::int64_t x, double r, double alpha, double m) {
  Eval e = alt_sum_eval<double>(x, r, alpha, m);
  if (e.rel_bound <= kTargetRel) return e;
  e = alt_sum_eval<R50>(x, r, alpha, m);
  if (e.rel_bound <= kTargetRel) return e;
  e = alt_sum_eval<R150>(x, r, alpha, m);
  if (e.rel_bound <= kTargetRel) return e;
  return alt_sum_eval<R400>(x, r, alpha, m);
}

// log C(r+x-1, x) for real r > 0, integer x >= 0.
inline double log_binom_real(double r, std::int64_t x) {
  return std::lgamma(r + static_cast<double>(x)) - std::lgamma(r) -
         std::lgamma(static_cast<double>(x) + 1.0);
}

// One full run of the shifted recursion
//   p(k; r') = ((r'+k-1)/k) [ p(k-1; r') - (r'/(r'+k-1)) p(k-1; r'+1) ]
// over the triangle {(i, j) : i + j <= k}, seeded by p(0; r+j) = M(-(r+j)).
// Returns the j = 0 column p(0..k; r) together with per-entry relative error
// bounds derived from an amplification recursion over entry magnitudes.
template <class Real>
struct RecColumn {
  std::vector<Real> probs;        // p(i; r), i = 0..k
  std::vector<double> rel_bound;  // certified relative bound per entry
};

template <class Real>
RecColumn<Real> recursion_eval(std::int64_t k, double r, double alpha, double m) {
  using std::exp;
  using std::fabs;
  const double eps = static_cast<double>(std::numeric_limits<Real>::epsilon());
  const Real a(alpha), mm(m);

  std::vector<Real> cur(static_cast<std::size_t>(k) + 1);
  std::vector<double> amp(static_cast<std::size_t>(k) + 1);
  for (std::int64_t j = 0; j <= k; ++j) {
    const Real logm = log_mgf_t<Real>(-(Real(r) + j), a, mm);
    cur[j] = exp(logm);
    amp[j] = std::fabs(static_cast<double>(cur[j])) *
             (3.0 + std::fabs(static_cast<double>(logm)));
  }

  RecColumn<Real> out;
  out.probs.resize(static_cast<std::size_t>(k) + 1);
  out.rel_bound.resize(static_cast<std::size_t>(k) + 1);
  auto record = [&](std::int64_t i) {
    out.probs[i] = cur[0];
    const double mag = std::fabs(static_cast<double>(cur[0]));
    out.rel_bound[i] = (cur[0] > 0 && mag > 0)
                           ? eps * amp[0] / mag
                           : (amp[0] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  };
  record(0);

  for (std::int64_t i = 1; i <= k; ++i) {
    for (std::int64_t j = 0; j <= k - i; ++j) {
      const Real rp = Real(r) + j;
      const Real denom = rp + (i - 1);
      const Real coef = denom / i;
      const Real ratio = rp / denom;
      cur[j] = coef * (cur[j] - ratio * cur[j + 1]);
      amp[j] = static_cast<double>(coef) *
                   (amp[j] + static_cast<double>(ratio) * amp[j + 1]) +
               6.0 * std::fabs(static_cast<double>(cur[j]));
    }
    record(i);
  }
  return out;
}

// Column of p(0..k; r) in double, escalated until every entry is certified
// (exact zeros pass). worst_bound reports the final certification level.
struct ColumnResult {
  std::vector<double> probs;
  std::vector<double> log_probs;
  std::vector<double> rel_bound;
  double worst_bound;
  double tail_mass;  // 1 - sum(probs), taken in working precision
};

template <class Real>
ColumnResult column_from(const RecColumn<Real>& rc) {
  using std::log;
  ColumnResult out;
  const std::size_t n = rc.probs.size();
  out.probs.resize(n);
  out.log_probs.resize(n);
  out.rel_bound = rc.rel_bound;
  out.worst_bound = 0.0;
  Real sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.probs[i] = static_cast<double>(rc.probs[i]);
    out.log_probs[i] = (rc.probs[i] > 0)
                           ? static_cast<double>(log(rc.probs[i]))
                           : -std::numeric_limits<double>::infinity();
    out.worst_bound = std::max(out.worst_bound, rc.rel_bound[i]);
    sum += rc.probs[i];
  }
  out.tail_mass = std::max(0.0, static_cast<double>(Real(1) - sum));
  return out;
}

inline ColumnResult recursion_column(std::int64_t k, double r, double alpha, double m) {
  {
    auto rc = recursion_eval<double>(k, r, alpha, m);
    auto col = column_from(rc);
    if (col.worst_bound <= kTargetRel) return col;
  }
  {
    auto rc = recursion_eval<R50>(k, r, alpha, m);
    auto col = column_from(rc);
    if (col.worst_bound <= kTargetRel) return col;
  }
  {
    auto rc = recursion_eval<R150>(k, r, alpha, m);
    auto col = column_from(rc);
    if (col.worst_bound <= kTargetRel) return col;
  }
  return column_from(recursion_eval<R400>(k, r, alpha, m));
}

// Final-entry evaluation via the recursion, escalating on that entry only.
inline Eval recursion_final(std::int64_t k, double r, double alpha, double m) {
  using std::log;
  auto run = [&](auto tag) -> Eval {
    using Real = decltype(tag);
    auto rc = recursion_eval<Real>(k, r, alpha, m);
    const Real v = rc.probs[static_cast<std::size_t>(k)];
    if (!(v > 0))
      return {std::numeric_limits<double>::quiet_NaN(),
              std::numeric_limits<double>::infinity()};
    return {static_cast<double>(log(v)), rc.rel_bound[static_cast<std::size_t>(k)]};
  };
  Eval e = run(double{});
  if (e.rel_bound <= kTargetRel) return e;
  e = run(R50{});
  if (e.rel_bound <= kTargetRel) return e;
  e = run(R150{});
  if (e.rel_bound <= kTargetRel) return e;
  return run(R400{});
}

}  // namespace nbrig::detail
