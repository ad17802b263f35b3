#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nbrig/distribution.hpp"
#include "nbrig/fit.hpp"
#include "testutil.hpp"

using nbrig::CountCell;
using nbrig::CountData;
using nbrig::FitOptions;
using nbrig::NbrigParams;
using testutil::rel_err;

namespace {

bool has_warning(const std::vector<std::string>& warnings, const std::string& needle) {
  for (const auto& w : warnings)
    if (w.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("count data is sorted, merged and validated") {
  const auto d = nbrig::make_count_data({{3, 5}, {0, 10}, {1, 2}});
  REQUIRE(d.cells.size() == 3);
  CHECK(d.cells[0].x == 0);
  CHECK(d.cells[1].x == 1);
  CHECK(d.cells[2].x == 3);
  CHECK(d.cells[0].n == 10);
  CHECK(d.total == 17);

  const auto m = nbrig::make_count_data({{1, 5}, {1, 3}, {0, 2}});
  REQUIRE(m.cells.size() == 2);
  CHECK(m.cells[1].x == 1);
  CHECK(m.cells[1].n == 8);
  CHECK(m.total == 10);

  CHECK_THROWS_AS(nbrig::make_count_data({{-1, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::make_count_data({{1, -5}}), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::make_count_data({}), std::invalid_argument);
  CHECK_THROWS_AS(nbrig::make_count_data({{0, 0}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("log likelihood at the published parameters") {
  const auto d1 = nbrig::make_count_data(testutil::swiss_cells());
  const double ll1 = nbrig::log_likelihood(testutil::swiss_params(), d1);
  CHECK(std::fabs(ll1 - (-54609.9009827593367)) < 1e-5);

  const auto d2 = nbrig::make_count_data(testutil::accidents_cells());
  const double ll2 = nbrig::log_likelihood(testutil::accidents_params(), d2);
  CHECK(std::fabs(ll2 - (-5343.05653580710981)) < 1e-6);

  const NbrigParams p(1.0, 10.0, 2.0);
  const auto single = nbrig::make_count_data({{0, 25}});
  CHECK(nbrig::log_likelihood(p, single) == 25.0 * nbrig::log_pmf(0, p));
}

TEST_CASE("chi-square grouping mechanics") {
  SUBCASE("perfect fit") {
    const auto d = nbrig::make_count_data({{0, 10}, {1, 7}, {2, 6}});
    const auto g = nbrig::chi_square_gof(d, {10.0, 7.0, 6.0}, 0);
    CHECK(g.chi2 == 0.0);
    CHECK(g.chi2_ungrouped == 0.0);
    CHECK(g.df == 2);
    CHECK(g.p_valid);
    CHECK(g.p_value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.grouping.size() == 3);
  }
  SUBCASE("small tail cells are pooled") {
    const auto d = nbrig::make_count_data({{0, 14}, {1, 6}, {2, 2}, {3, 1}});
    const auto g = nbrig::chi_square_gof(d, {12.0, 6.0, 4.0, 1.0}, 1);
    REQUIRE(g.grouping.size() == 3);
    CHECK(g.grouping[2].x_lo == 2);
    CHECK(g.grouping[2].x_hi == 3);
    CHECK(g.grouping[2].observed == 3.0);
    CHECK(g.grouping[2].expected == 5.0);
    CHECK(std::fabs(g.chi2 - 17.0 / 15.0) < 1e-12);
    CHECK(g.df == 1);
    CHECK_FALSE(g.df_floored);
    CHECK(g.p_valid);
    CHECK(std::fabs(g.p_value - 0.28706544814496113735) < 1e-12);
  }
  SUBCASE("everything pools into one group") {
    const auto d = nbrig::make_count_data({{0, 16}, {1, 2}, {2, 2}});
    const auto g = nbrig::chi_square_gof(d, {16.0, 2.0, 2.0}, 1);
    REQUIRE(g.grouping.size() == 1);
    CHECK(g.chi2 == 0.0);
    CHECK(g.df == 1);
    CHECK(g.df_floored);
    CHECK_FALSE(g.p_valid);
    CHECK(std::isnan(g.p_value));
  }
  SUBCASE("leftover head merges into the lowest closed group") {
    const auto d = nbrig::make_count_data({{0, 2}, {1, 8}, {2, 1}});
    const auto g = nbrig::chi_square_gof(d, {3.0, 7.0, 2.0}, 0);
    REQUIRE(g.grouping.size() == 1);
    CHECK(g.grouping[0].x_lo == 0);
    CHECK(g.grouping[0].x_hi == 2);
    CHECK(g.grouping[0].observed == 11.0);
    CHECK(g.grouping[0].expected == 12.0);
    CHECK(std::fabs(g.chi2 - 1.0 / 12.0) < 1e-12);
    CHECK(g.df == 1);
    CHECK(g.df_floored);
  }
  SUBCASE("validation") {
    const auto d = nbrig::make_count_data({{0, 10}, {1, 7}});
    CHECK_THROWS_AS(nbrig::chi_square_gof(d, {10.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(nbrig::chi_square_gof(d, {10.0, 0.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(nbrig::chi_square_gof(d, {10.0, -1.0}, 0), std::invalid_argument);
  }
}

TEST_CASE("goodness of fit at the published parameters") {
  const auto d = nbrig::make_count_data(testutil::swiss_cells());
  const NbrigParams p = testutil::swiss_params();
  std::vector<double> expected;
  for (const auto& c : d.cells)
    expected.push_back(static_cast<double>(d.total) * nbrig::pmf(c.x, p));
  const auto g = nbrig::chi_square_gof(d, expected, 3);
  CHECK(std::fabs(g.chi2 - 0.938963) < 1e-3);
  CHECK(std::fabs(g.chi2_ungrouped - 1.315361) < 1e-3);
  CHECK(g.df == 2);
  CHECK(g.p_valid);
  CHECK(std::fabs(g.p_value - 0.625327) < 1e-3);
  REQUIRE(g.grouping.size() == 6);
  CHECK(g.grouping[5].x_lo == 5);
  CHECK(g.grouping[5].x_hi == 6);
  CHECK(g.grouping[5].observed == 8.0);
  CHECK(std::fabs(g.grouping[5].expected - 8.655) < 1e-2);
}

TEST_CASE("degenerate samples are rejected") {
  CHECK_THROWS_AS(nbrig::fit_nbrig_mle(nbrig::make_count_data({{5, 10}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(nbrig::fit_nbrig_mle(nbrig::make_count_data({{2, 3}, {2, 4}})),
                  std::invalid_argument);
}

TEST_CASE("fit is invariant to cell order and duplicate splitting") {
  FitOptions opts;
  opts.inits = {{0.5, 20.0, 2.0}};
  const auto a = nbrig::fit_nbrig_mle(
      nbrig::make_count_data({{0, 300}, {1, 80}, {2, 25}, {3, 8}, {4, 3}}), opts);
  const auto b = nbrig::fit_nbrig_mle(
      nbrig::make_count_data({{1, 40}, {4, 3}, {0, 300}, {2, 25}, {3, 8}, {1, 40}}), opts);
  CHECK(a.log_l == b.log_l);
  REQUIRE(a.params.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.params[i] == b.params[i]);
  CHECK(a.n_evals == b.n_evals);
}

TEST_CASE("shallow mixing tail raises a warning") {
  const auto data = nbrig::make_count_data(
      {{0, 60}, {1, 15}, {2, 8}, {3, 5}, {5, 4}, {8, 3}, {12, 2}, {20, 2}, {30, 1}});
  FitOptions opts;
  opts.inits = {{1.0, 3.0, 5.0}};
  const auto rep = nbrig::fit_nbrig_mle(data, opts);
  CHECK(rep.converged);
  CHECK(rep.params[1] <= 4.0);
  CHECK(has_warning(rep.warnings, "alpha <= 4"));
}

TEST_CASE("an exhausted evaluation budget is reported") {
  const auto data = nbrig::make_count_data(testutil::swiss_cells());
  FitOptions opts;
  opts.max_evals = 50;
  const auto rep = nbrig::fit_nbrig_mle(data, opts);
  CHECK_FALSE(rep.converged);
  CHECK(rep.n_evals > 50);
  CHECK(std::isfinite(rep.log_l));
}

TEST_CASE("mle on the first data set") {
  const auto data = nbrig::make_count_data(testutil::swiss_cells());
  const auto rep = nbrig::fit_nbrig_mle(data);
  CHECK(rep.model == "nbrig");
  REQUIRE(rep.params.size() == 3);
  REQUIRE(rep.param_names.size() == 3);
  CHECK(rep.param_names[0] == "r");
  CHECK(rep.param_names[1] == "alpha");
  CHECK(rep.param_names[2] == "m");
  for (double v : rep.params) CHECK(v > 0.0);
  CHECK(rep.converged);
  CHECK(rep.warnings.empty());
  CHECK(std::fabs(rep.log_l - (-54609.9009827593367)) < 1.0);
  CHECK(rep.log_l >= -54609.9009827593367 - 1e-6);  // at least as good as published
  CHECK(std::fabs(rep.aic - 109225.8019655187) < 2.0);
  CHECK(rep.aic == 6.0 - 2.0 * rep.log_l);
  CHECK(rep.expected.size() == data.cells.size());
  CHECK(rep.df == 2);
  CHECK(rep.p_valid);
  CHECK(rep.p_value > 0.1);
  CHECK(rep.chi2 < 6.0);

  const auto again = nbrig::fit_nbrig_mle(data);
  CHECK(again.log_l == rep.log_l);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.params[i] == rep.params[i]);
  CHECK(again.n_evals == rep.n_evals);
}

TEST_CASE("mle on the second data set, with refit from the optimum") {
  const auto data = nbrig::make_count_data(testutil::accidents_cells());
  const auto rep = nbrig::fit_nbrig_mle(data);
  CHECK(rep.converged);
  CHECK(std::fabs(rep.log_l - (-5343.05653580710981)) < 1.0);
  CHECK(rep.log_l >= -5343.05653580710981 - 1e-6);
  CHECK(std::fabs(rep.aic - 10692.1130716142) < 2.0);
  CHECK(rep.df == 2);
  CHECK(rep.p_valid);
  CHECK(rep.p_value > 0.01);

  FitOptions from_opt;
  from_opt.inits = {{rep.params[0], rep.params[1], rep.params[2]}};
  const auto refit = nbrig::fit_nbrig_mle(data, from_opt);
  CHECK(refit.log_l >= rep.log_l - 1e-9);
  CHECK(refit.log_l - rep.log_l <= 1e-6);
}

TEST_CASE("fitted optimum dominates the generating parameters") {
  const NbrigParams truth(3.0, 50.0, 30.0);
  const auto draws = nbrig::sample(200000, truth, 2024);
  std::map<std::int64_t, std::int64_t> hist;
  for (const auto v : draws) ++hist[v];
  std::vector<CountCell> cells;
  for (const auto& [x, n] : hist) cells.push_back({x, n});
  const auto data = nbrig::make_count_data(cells);

  const auto rep = nbrig::fit_nbrig_mle(data);
  CHECK(rep.converged);
  CHECK(rep.log_l >= nbrig::log_likelihood(truth, data) - 1e-6);
}

TEST_CASE("model comparison on the first data set") {
  const auto data = nbrig::make_count_data(testutil::swiss_cells());
  const auto reports = nbrig::compare_models(data);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].model == "nbrig");
  CHECK(reports[1].model == "nb");
  CHECK(reports[2].model == "poisson");
  CHECK(reports[0].aic <= reports[1].aic);
  CHECK(reports[1].aic <= reports[2].aic);
  CHECK(std::fabs(reports[0].aic - 109225.8) < 2.0);
  CHECK(std::fabs(reports[1].aic - 109234.6) < 2.0);
  CHECK(std::fabs(reports[2].aic - 110218.91) < 2.0);
  CHECK(reports[0].chi2 < reports[1].chi2);
  CHECK(reports[1].chi2 < reports[2].chi2);
  CHECK(std::fabs(reports[2].params[0] - 0.15514004655703236465) < 1e-4);
  CHECK(std::fabs(reports[2].log_l - (-55108.45491360509)) < 1e-6);
  CHECK(reports[2].p_valid);
  CHECK(reports[2].p_value < 1e-6);
  CHECK(reports[0].p_value > 0.1);
}

TEST_CASE("model comparison on the second data set") {
  const auto data = nbrig::make_count_data(testutil::accidents_cells());
  const auto reports = nbrig::compare_models(data);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].model == "nbrig");
  CHECK(std::fabs(reports[0].aic - 10692.1) < 2.0);
  CHECK(std::fabs(reports[1].aic - 10700.08) < 2.0);
  CHECK(std::fabs(reports[2].aic - 10983.56) < 2.0);
  CHECK(std::fabs(reports[2].log_l - (-5490.780544653066)) < 1e-6);

  double expected_total = 0.0;
  for (double e : reports[0].expected) expected_total += e;
  CHECK(std::fabs(expected_total - 9461.0) < 1.0);
}

TEST_CASE("nested models on equidispersed data") {
  const auto data = testutil::poisson_synthetic(20000, 1.0, 99);
  const auto reports = nbrig::compare_models(data);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].model == "poisson");

  double aic_p = 0.0, aic_nb = 0.0, aic_nbrig = 0.0;
  double ll_p = 0.0, ll_nb = 0.0, ll_nbrig = 0.0;
  for (const auto& r : reports) {
    if (r.model == "poisson") {
      aic_p = r.aic;
      ll_p = r.log_l;
    } else if (r.model == "nb") {
      aic_nb = r.aic;
      ll_nb = r.log_l;
    } else {
      aic_nbrig = r.aic;
      ll_nbrig = r.log_l;
    }
  }
  CHECK(aic_nb - aic_p > 0.0);
  CHECK(aic_nb - aic_p <= 2.0001);
  CHECK(aic_nbrig - aic_p > 0.0);
  CHECK(aic_nbrig - aic_p <= 4.0001);
  CHECK(ll_nb >= ll_p - 1e-6);
  CHECK(ll_nbrig >= ll_p - 0.01);
}
