#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rigp/error.hpp"
#include "rigp/metrics.hpp"
#include "rigp/rng.hpp"

using namespace rigp;

namespace {

/// Type-7 sample quantile straight from its definition.
double type7(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

/// Two grid points and two events, so five slots including the residual integral.
PosteriorSamples samples_with(const Eigen::MatrixXd& draws) {
  Dataset d(Domain::interval(4.0));
  d.events = {point1(1.0), point1(3.0)};
  d.grid = midpoint_grid(d.domain, 2);
  PosteriorSamples s;
  s.layout = StateLayout::from(d);
  s.lam_draws = draws;
  return s;
}

Eigen::MatrixXd random_draws(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = 1.0 + 3.0 * uniform01(rng) + static_cast<double>(j);
  }
  return m;
}

PointQuantiles interval(double lo, double hi) {
  PointQuantiles q;
  q.q025 = lo;
  q.q975 = hi;
  q.q50 = 0.5 * (lo + hi);
  return q;
}

}  // namespace

TEST(Quantiles, TypeSevenValues) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.975), 3.925);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({7.0}, 0.3), 7.0);
}

TEST(Quantiles, MatchDefinitionOnRandomData) {
  Rng rng = make_rng(1);
  const Eigen::MatrixXd draws = random_draws(rng, 137, 4);
  const auto q = column_quantiles(draws);
  ASSERT_EQ(q.size(), 4u);
  for (Eigen::Index j = 0; j < 4; ++j) {
    std::vector<double> col(draws.col(j).data(), draws.col(j).data() + draws.rows());
    const auto& p = q[static_cast<std::size_t>(j)];
    EXPECT_DOUBLE_EQ(p.q025, type7(col, 0.025));
    EXPECT_DOUBLE_EQ(p.q25, type7(col, 0.25));
    EXPECT_DOUBLE_EQ(p.q50, type7(col, 0.5));
    EXPECT_DOUBLE_EQ(p.q75, type7(col, 0.75));
    EXPECT_DOUBLE_EQ(p.q975, type7(col, 0.975));
  }
}

TEST(Quantiles, MonotoneAndOrderInvariant) {
  Rng rng = make_rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd draws = random_draws(rng, 50, 3);
    const auto a = column_quantiles(draws);
    for (Eigen::Index i = draws.rows() - 1; i > 0; --i) {
      const auto k = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(i + 1));
      draws.row(i).swap(draws.row(std::min(k, i)));
    }
    const auto b = column_quantiles(draws);
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_LE(a[j].q025, a[j].q25);
      EXPECT_LE(a[j].q25, a[j].q50);
      EXPECT_LE(a[j].q50, a[j].q75);
      EXPECT_LE(a[j].q75, a[j].q975);
      EXPECT_EQ(a[j].q025, b[j].q025);
      EXPECT_EQ(a[j].q50, b[j].q50);
      EXPECT_EQ(a[j].q975, b[j].q975);
    }
  }
}

TEST(Sse, Example) {
  EXPECT_DOUBLE_EQ(sum_squared_error({1, 2}, {1.5, 1}), 1.25);
  EXPECT_THROW(sum_squared_error({1, 2}, {1}), ContractViolation);
}

TEST(Sse, MatchingPointsAddNothing) {
  Rng rng = make_rng(3);
  std::vector<double> est, truth;
  for (int i = 0; i < 30; ++i) {
    est.push_back(uniform01(rng));
    truth.push_back(uniform01(rng));
  }
  const double base = sum_squared_error(est, truth);
  for (int i = 0; i < 10; ++i) {
    const double v = uniform01(rng);
    est.push_back(v);
    truth.push_back(v);
  }
  EXPECT_EQ(sum_squared_error(est, truth), base);
}

TEST(Coverage, Example) {
  const std::vector<PointQuantiles> q{interval(4, 6), interval(5, 9), interval(0, 5), interval(6, 7)};
  EXPECT_DOUBLE_EQ(coverage(q, {5, 5, 5, 5}), 0.75);
  EXPECT_DOUBLE_EQ(mean_ci_width(q), (2 + 4 + 5 + 1) / 4.0);
}

TEST(Coverage, MatchesPointwiseRecheck) {
  Rng rng = make_rng(4);
  const Eigen::MatrixXd draws = random_draws(rng, 40, 25);
  const auto q = column_quantiles(draws);
  std::vector<double> truth;
  for (int j = 0; j < 25; ++j) truth.push_back(1.0 + 4.0 * uniform01(rng) + j);
  int miss = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (truth[j] < q[j].q025 || truth[j] > q[j].q975) ++miss;
  }
  EXPECT_DOUBLE_EQ(coverage(q, truth), 1.0 - miss / 25.0);
}

TEST(Summarize, ConstantDraws) {
  const Eigen::MatrixXd draws = Eigen::MatrixXd::Constant(10, 5, 2.0);
  const EvalReport r = summarize(samples_with(draws), std::vector<double>{2.0, 3.0, 2.0, 2.0});
  EXPECT_EQ(r.ci_width, 0.0);
  EXPECT_DOUBLE_EQ(*r.coverage_grid, 0.5);
  EXPECT_DOUBLE_EQ(*r.coverage_obs, 1.0);
  EXPECT_DOUBLE_EQ(*r.sse_grid, 1.0);
  EXPECT_DOUBLE_EQ(*r.sse_obs, 0.0);
}

TEST(Summarize, SplitsGridAndObservedSlots) {
  Rng rng = make_rng(5);
  const Eigen::MatrixXd draws = random_draws(rng, 60, 5);
  const EvalReport r = summarize(samples_with(draws));
  EXPECT_EQ(r.n_draws, 60u);
  EXPECT_EQ(r.n_grid, 2u);
  EXPECT_EQ(r.n_obs, 2u);
  EXPECT_EQ(r.quantiles.size(), 5u);
  EXPECT_FALSE(r.sse_grid.has_value());
  EXPECT_FALSE(r.coverage_obs.has_value());
  EXPECT_FALSE(r.theta_median.has_value());
  const auto q = column_quantiles(draws);
  EXPECT_DOUBLE_EQ(r.ci_width, 0.5 * ((q[0].q975 - q[0].q025) + (q[1].q975 - q[1].q025)));
  EXPECT_DOUBLE_EQ(*r.ci_width_obs, 0.5 * ((q[2].q975 - q[2].q025) + (q[3].q975 - q[3].q025)));
}

TEST(Summarize, ThetaMedian) {
  PosteriorSamples s = samples_with(Eigen::MatrixXd::Ones(3, 5));
  s.theta_draws = {4.0, 1.0, 2.0};
  EXPECT_EQ(summarize(s).theta_median, 2.0);
}

TEST(Summarize, Errors) {
  EXPECT_THROW(summarize(samples_with(Eigen::MatrixXd::Ones(1, 5))), ContractViolation);
  EXPECT_THROW(summarize(samples_with(Eigen::MatrixXd::Ones(3, 5)), std::vector<double>{1.0}),
               ContractViolation);
}

TEST(Serialization, JsonKeys) {
  const Eigen::MatrixXd draws = Eigen::MatrixXd::Constant(4, 5, 1.0);
  const auto j = to_json(summarize(samples_with(draws), std::vector<double>{1, 1, 1, 1}));
  for (const char* key : {"n_draws", "n_grid", "n_obs", "sse_grid", "sse_obs", "coverage_grid",
                          "coverage_obs", "ci_width_grid", "ci_width_obs", "ci_width", "quantiles"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["n_draws"], 4);
  EXPECT_EQ(j["quantiles"].size(), 5u);
}

TEST(Serialization, QuantileCsv) {
  std::ostringstream os;
  write_quantile_csv(os, {"0.5", "x,y"}, {interval(1, 2), interval(3, 4)});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "point,q025,q25,q50,q75,q975");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "0.5,1,0,");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 6), "\"x,y\",");
  EXPECT_THROW(write_quantile_csv(os, {"a"}, {}), ContractViolation);
}
