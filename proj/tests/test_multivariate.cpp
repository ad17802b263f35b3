#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nbrig/distribution.hpp"
#include "nbrig/errors.hpp"
#include "nbrig/multivariate.hpp"
#include "testutil.hpp"

using nbrig::MvNbrigParams;
using nbrig::NbrigParams;
using nbrig::RigParams;
using testutil::rel_err;

namespace {

// Classical Jacobi sweep; good enough for 3x3 symmetric matrices.
double smallest_eig(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    std::size_t p = 0, q = 1;
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::fabs(a[i][j]) > off) {
          off = std::fabs(a[i][j]);
          p = i;
          q = j;
        }
    if (off < 1e-15) break;
    const double phi = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
    const double c = std::cos(phi), s = std::sin(phi);
    for (std::size_t k = 0; k < n; ++k) {
      const double akp = a[k][p], akq = a[k][q];
      a[k][p] = c * akp - s * akq;
      a[k][q] = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double apk = a[p][k], aqk = a[q][k];
      a[p][k] = c * apk - s * aqk;
      a[q][k] = s * apk + c * aqk;
    }
  }
  double mn = a[0][0];
  for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, a[i][i]);
  return mn;
}

}  // namespace

TEST_CASE("parameter and argument validation") {
  const RigParams mix(10.0, 2.0);
  CHECK_THROWS_AS(MvNbrigParams({}, mix), std::invalid_argument);
  CHECK_THROWS_AS(MvNbrigParams({1.0, 0.0}, mix), std::invalid_argument);
  CHECK_THROWS_AS(MvNbrigParams({1.0, -2.0}, mix), std::invalid_argument);
  CHECK_THROWS_AS(MvNbrigParams({std::numeric_limits<double>::quiet_NaN()}, mix),
                  std::invalid_argument);

  const MvNbrigParams p({1.0, 2.0}, mix);
  CHECK_THROWS_AS(nbrig::joint_pmf({0}, p), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::joint_pmf({0, 1, 2}, p), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::joint_pmf({0, -1}, p), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::joint_pmf_via_univariate({0}, p), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::joint_pmf_via_univariate({0, -1}, p), std::invalid_argument);
}

TEST_CASE("shape accessors") {
  const MvNbrigParams p({0.5, 1.0, 1.5}, RigParams(10.0, 2.0));
  CHECK(p.dim() == 3);
  CHECK(p.r_tilde() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("one component reduces to the univariate pmf") {
  const RigParams mix(0.5, 0.5);
  const MvNbrigParams p({0.5}, mix);
  const NbrigParams u(0.5, mix);
  for (std::int64_t x = 0; x <= 8; ++x) {
    CHECK(rel_err(nbrig::joint_pmf({x}, p), nbrig::pmf_direct(x, u)) < 1e-13);
    CHECK(rel_err(nbrig::joint_pmf_via_univariate({x}, p), nbrig::pmf_recursive(x, u)) <
          1e-13);
  }
}

TEST_CASE("two evaluation routes agree") {
  const std::vector<MvNbrigParams> ps{
      MvNbrigParams({1.0, 1.03}, testutil::accidents_params().mix),
      MvNbrigParams({1.4, 2.0}, testutil::swiss_params().mix),
  };
  for (const auto& p : ps) {
    for (std::int64_t x1 = 0; x1 <= 5; ++x1)
      for (std::int64_t x2 = 0; x2 <= 5; ++x2) {
        const double a = nbrig::joint_pmf({x1, x2}, p);
        const double b = nbrig::joint_pmf_via_univariate({x1, x2}, p);
        CHECK(a > 0.0);
        CHECK(rel_err(a, b) < 1e-9);
      }
  }
  const MvNbrigParams p3({0.5, 1.0, 1.5}, testutil::swiss_params().mix);
  for (std::int64_t x1 = 0; x1 <= 5; ++x1)
    for (std::int64_t x2 = 0; x2 <= 5; ++x2)
      for (std::int64_t x3 = 0; x3 <= 5; ++x3) {
        const double a = nbrig::joint_pmf({x1, x2, x3}, p3);
        const double b = nbrig::joint_pmf_via_univariate({x1, x2, x3}, p3);
        CHECK(rel_err(a, b) < 1e-9);
      }
}

TEST_CASE("all-zero vector hits the closed form") {
  const MvNbrigParams p({0.5, 1.0, 1.5}, testutil::swiss_params().mix);
  const double closed = std::exp(nbrig::rig_log_mgf(-p.r_tilde(), p.mix));
  CHECK(nbrig::joint_pmf({0, 0, 0}, p) == closed);
  CHECK(nbrig::joint_pmf_via_univariate({0, 0, 0}, p) == closed);
  CHECK(nbrig::pmf_recursive(0, NbrigParams(p.r_tilde(), p.mix)) == closed);
}

TEST_CASE("summing one component out recovers the marginal") {
  const MvNbrigParams p({1.0, 1.03}, testutil::accidents_params().mix);
  const NbrigParams marg(1.0, p.mix);
  for (std::int64_t x1 : {0, 1, 3, 5}) {
    double acc = 0.0;
    for (std::int64_t x2 = 0; x2 <= 80; ++x2)
      acc += nbrig::joint_pmf_via_univariate({x1, x2}, p);
    CHECK(std::fabs(acc - nbrig::pmf(x1, marg)) <= 1e-8);
  }
}

TEST_CASE("pairwise sweep: total mass and brute-force moments") {
  const MvNbrigParams p({1.0, 1.03}, testutil::accidents_params().mix);
  double mass = 0.0, ex1 = 0.0, ex2 = 0.0, ex12 = 0.0;
  for (std::int64_t s = 0; s <= 60; ++s)
    for (std::int64_t x1 = 0; x1 <= s; ++x1) {
      const std::int64_t x2 = s - x1;
      const double v = nbrig::joint_pmf_via_univariate({x1, x2}, p);
      mass += v;
      ex1 += static_cast<double>(x1) * v;
      ex2 += static_cast<double>(x2) * v;
      ex12 += static_cast<double>(x1) * static_cast<double>(x2) * v;
    }
  const double total_cdf = nbrig::cdf(60, NbrigParams(p.r_tilde(), p.mix));
  CHECK(std::fabs(mass - total_cdf) <= 1e-10);

  const auto mm = nbrig::mv_moments(p);
  CHECK(rel_err(ex1, mm.means[0]) < 1e-6);
  CHECK(rel_err(ex2, mm.means[1]) < 1e-6);
  CHECK(rel_err(ex12 - ex1 * ex2, mm.cov[0][1]) < 1e-5);
}

TEST_CASE("deep joint tail: direct route gives up, stable route does not") {
  const MvNbrigParams p({1.0, 1.03}, testutil::accidents_params().mix);
  CHECK(nbrig::joint_pmf({450, 450}, p) >= 0.0);  // still certifiable
  try {
    nbrig::joint_pmf({500, 500}, p);
    CHECK(false);
  } catch (const nbrig::PrecisionError& e) {
    CHECK(std::string(e.what()).find("joint_pmf_via_univariate") != std::string::npos);
  }
  const double v = nbrig::joint_pmf_via_univariate({500, 500}, p);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  CHECK(v < 1e-6);
}

TEST_CASE("moment formulas") {
  const RigParams mix = testutil::accidents_params().mix;
  const MvNbrigParams p({1.0, 1.03}, mix);
  const auto mm = nbrig::mv_moments(p);
  REQUIRE(mm.means.size() == 2);
  REQUIRE(mm.cov.size() == 2);

  const double fac = nbrig::rig_mgf(1.0, mix) - 1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rel_err(mm.means[i], p.rs[i] * fac) < 1e-12);
    CHECK(rel_err(mm.means[i], nbrig::mean(NbrigParams(p.rs[i], mix))) < 1e-12);
    CHECK(mm.variances[i] == nbrig::variance(NbrigParams(p.rs[i], mix)));
    CHECK(mm.cov[i][i] == mm.variances[i]);
    CHECK(mm.corr[i][i] == 1.0);
  }
  CHECK(rel_err(mm.cov[0][1], 0.008164808187504020503327) < 1e-10);
  CHECK(mm.cov[0][1] == mm.cov[1][0]);
  CHECK(mm.corr[0][1] == mm.corr[1][0]);
  CHECK(mm.cov[0][1] > 0.0);
  CHECK(mm.corr[0][1] > 0.0);
  CHECK(mm.corr[0][1] < 1.0);
  CHECK(rel_err(mm.corr[0][1],
                mm.cov[0][1] / std::sqrt(mm.variances[0] * mm.variances[1])) < 1e-14);
}

TEST_CASE("covariance and correlation matrices are positive semidefinite") {
  const MvNbrigParams p({0.5, 1.0, 1.5}, testutil::swiss_params().mix);
  const auto mm = nbrig::mv_moments(p);
  REQUIRE(mm.cov.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      CHECK(mm.cov[i][j] == mm.cov[j][i]);
      CHECK(mm.cov[i][j] > 0.0);
      CHECK(mm.corr[i][j] > 0.0);
      CHECK(mm.corr[i][j] < 1.0);
    }
  CHECK(smallest_eig(mm.cov) >= -1e-10);
  CHECK(smallest_eig(mm.corr) >= -1e-10);
}

TEST_CASE("vanishing component decouples") {
  const MvNbrigParams p({1e-8, 1.0}, testutil::swiss_params().mix);
  const auto mm = nbrig::mv_moments(p);
  CHECK(mm.cov[0][1] > 0.0);
  CHECK(mm.cov[0][1] < 1e-9);
  CHECK(mm.corr[0][1] > 0.0);
  CHECK(mm.corr[0][1] < 1.0);
}

TEST_CASE("second moments need a steep enough mixing tail") {
  CHECK_THROWS_AS(nbrig::mv_moments(MvNbrigParams({1.0, 2.0}, RigParams(4.0, 2.0))),
                  std::domain_error);
  CHECK_THROWS_AS(nbrig::mv_moments(MvNbrigParams({1.0, 2.0}, RigParams(3.9, 2.0))),
                  std::domain_error);
}
