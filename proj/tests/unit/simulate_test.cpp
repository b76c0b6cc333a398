#include <gtest/gtest.h>

#include <cmath>

#include "rigp/error.hpp"
#include "rigp/simulate.hpp"
#include "test_support.hpp"

using namespace rigp;
namespace rt = rigp::testing;

namespace {

double lambda1(double s) {
  const double z = (s - 25.0) / 10.0;
  return 2.0 * std::exp(-s / 15.0) + std::exp(-z * z);
}

double mean_count(const IntensitySpec& spec, const Domain& domain, int runs, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  double total = 0.0;
  for (int r = 0; r < runs; ++r) total += static_cast<double>(simulate_thinning(spec, domain, rng).size());
  return total / runs;
}

}  // namespace

TEST(Intensity, Lambda1Values) {
  const auto spec = IntensitySpec::lambda1();
  EXPECT_NEAR(eval_intensity(spec, point1(25.0)), 2 * std::exp(-5.0 / 3.0) + 1, 1e-15);
  EXPECT_NEAR(eval_intensity(spec, point1(25.0)), 1.37775, 1e-5);
  for (double s : {0.0, 3.3, 17.0, 49.9}) EXPECT_DOUBLE_EQ(eval_intensity(spec, point1(s)), lambda1(s));
  EXPECT_DOUBLE_EQ(eval_intensity(IntensitySpec::lambda1(3.0), point1(7.0)), 3 * lambda1(7.0));
}

TEST(Intensity, Lambda1Integral) {
  const double exact = intensity_integral(IntensitySpec::lambda1(), Box::interval(0, 50), 1);
  EXPECT_NEAR(exact, rt::integrate(lambda1, 0, 50), 1e-10);
  EXPECT_NEAR(exact, 46.65, 0.005);
  EXPECT_NEAR(intensity_integral(IntensitySpec::lambda1(2.0), Box::interval(10, 20), 1),
              2 * rt::integrate(lambda1, 10, 20), 1e-10);
}

TEST(Intensity, Lambda2IsConstant) {
  const auto spec = IntensitySpec::lambda2();
  for (double s : {0.0, 1.7, 5.0}) EXPECT_EQ(eval_intensity(spec, point1(s)), 10.0);
  EXPECT_DOUBLE_EQ(intensity_integral(spec, Box::interval(1, 4), 1), 30.0);
}

TEST(Intensity, TableAndPiecewise) {
  const auto table = IntensitySpec::table({0, 2, 4}, {1, 5, 3});
  EXPECT_DOUBLE_EQ(eval_intensity(table, point1(1.0)), 3.0);
  EXPECT_DOUBLE_EQ(eval_intensity(table, point1(3.0)), 4.0);
  EXPECT_DOUBLE_EQ(eval_intensity(table, point1(9.0)), 3.0);
  EXPECT_NEAR(intensity_integral(table, Box::interval(0, 4), 1), 6.0 + 8.0, 1e-12);
  EXPECT_NEAR(intensity_integral(table, Box::interval(1, 3), 1),
              rt::integrate([&](double x) { return eval_intensity(table, point1(x)); }, 1, 3, {2}),
              1e-12);

  const auto pw = IntensitySpec::piecewise({0, 1, 3}, {2, 7});
  EXPECT_EQ(eval_intensity(pw, point1(0.5)), 2.0);
  EXPECT_EQ(eval_intensity(pw, point1(1.0)), 7.0);
  EXPECT_NEAR(intensity_integral(pw, Box::interval(0.5, 2), 1), 1.0 + 7.0, 1e-12);
  EXPECT_THROW(IntensitySpec::piecewise({0, 1}, {2, 7}), ContractViolation);
  EXPECT_THROW(IntensitySpec::table({0, 0}, {1, 1}), ContractViolation);
}

TEST(Intensity, ProductInTwoDimensions) {
  const auto p = IntensitySpec::product(IntensitySpec::table({0, 2}, {1, 3}),
                                        IntensitySpec::constant(2.0));
  Point x{};
  x[0] = 1.0;
  x[1] = 0.7;
  EXPECT_DOUBLE_EQ(eval_intensity(p, x), 4.0);
  EXPECT_NEAR(intensity_integral(p, Box::rect(0, 2, 0, 3), 2), 4.0 * 6.0, 1e-12);
}

TEST(Intensity, OutOfDomain) {
  const Domain d = Domain::interval(5.0);
  EXPECT_THROW(eval_intensity(IntensitySpec::lambda2(), d, {point1(6.0)}), DomainError);
  EXPECT_EQ(eval_intensity(IntensitySpec::lambda2(), d, {point1(5.0)}), std::vector<double>{10.0});
}

TEST(Intensity, ParseAndDescribe) {
  EXPECT_EQ(IntensitySpec::parse("lambda1").kind, IntensitySpec::Kind::Lambda1);
  EXPECT_EQ(IntensitySpec::parse("lambda2:3").scale, 3.0);
  EXPECT_EQ(IntensitySpec::parse("lambda1*2").scale, 2.0);
  const auto c = IntensitySpec::parse("constant:10");
  EXPECT_EQ(c.rate, 10.0);
  EXPECT_EQ(c.describe(), "constant:10");
  const auto t = IntensitySpec::parse("table:0,1,2/5,6,7*2");
  EXPECT_EQ(t.knots, (std::vector<double>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(eval_intensity(t, point1(0.5)), 11.0);
  EXPECT_EQ(IntensitySpec::parse("piecewise:0,1,2/3,4").values, (std::vector<double>{3, 4}));
  EXPECT_EQ(IntensitySpec::lambda1(3).describe(), "lambda1*3");
  EXPECT_THROW(IntensitySpec::parse("gamma:1"), ContractViolation);
  EXPECT_THROW(IntensitySpec::parse("constant"), ContractViolation);
  EXPECT_THROW(IntensitySpec::parse("table:0,1"), ContractViolation);
  EXPECT_THROW(IntensitySpec::parse("constant:ten"), ContractViolation);
}

TEST(Intensity, UpperBoundDominates) {
  const Domain d = Domain::interval(50.0);
  const auto spec = IntensitySpec::lambda1();
  const double bound = intensity_upper_bound(spec, d);
  for (int i = 0; i <= 5000; ++i) EXPECT_GE(bound, lambda1(0.01 * i));
  EXPECT_LE(bound, 1.02 * 2.0 + 0.1);
}

TEST(Thinning, ConstantRateMeanCount) {
  const double m = mean_count(IntensitySpec::constant(10.0), Domain::interval(5.0), 2000, 1);
  EXPECT_NEAR(m, 50.0, 3 * std::sqrt(50.0) / std::sqrt(2000.0));
}

TEST(Thinning, Lambda1MeanCount) {
  const double m = mean_count(IntensitySpec::lambda1(), Domain::interval(50.0), 2000, 2);
  EXPECT_NEAR(m, 46.65, 3 * std::sqrt(46.65 / 2000.0));
}

TEST(Thinning, ZeroIntensity) {
  Rng rng = make_rng(3);
  for (int r = 0; r < 100; ++r) {
    EXPECT_TRUE(simulate_thinning(IntensitySpec::constant(0.0), Domain::interval(5.0), rng).empty());
  }
}

TEST(Thinning, SortedInsideDomain) {
  Rng rng = make_rng(4);
  const auto ev = simulate_thinning(IntensitySpec::lambda1(), Domain::interval(50.0), rng);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    EXPECT_GE(ev[i][0], 0.0);
    EXPECT_LE(ev[i][0], 50.0);
    if (i) EXPECT_LE(ev[i - 1][0], ev[i][0]);
  }
}

TEST(Thinning, PiecewiseCountsPerPiece) {
  const std::vector<double> edges{0, 1, 3, 5};
  const std::vector<double> levels{2, 0.5, 4};
  const auto spec = IntensitySpec::piecewise(edges, levels);
  const Domain d = Domain::interval(5.0);
  Rng rng = make_rng(5);
  const int runs = 5000;
  std::vector<double> counts(3, 0.0);
  for (int r = 0; r < runs; ++r) {
    for (const Point& p : simulate_thinning(spec, d, rng)) {
      const std::size_t k = p[0] < 1 ? 0 : (p[0] < 3 ? 1 : 2);
      counts[k] += 1;
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double mu = levels[k] * (edges[k + 1] - edges[k]);
    EXPECT_NEAR(counts[k] / runs, mu, 3 * std::sqrt(mu / runs)) << "piece " << k;
  }
}

TEST(Thinning, Superposition) {
  const Domain d = Domain::interval(50.0);
  const auto sum = IntensitySpec::sum({IntensitySpec::constant(1.0), IntensitySpec::lambda1()});
  const double want = 50.0 + intensity_integral(IntensitySpec::lambda1(), d.bounds(), 1);
  EXPECT_NEAR(intensity_integral(sum, d.bounds(), 1), want, 1e-10);
  EXPECT_NEAR(mean_count(sum, d, 2000, 6), want, 3 * std::sqrt(want / 2000.0));
}

TEST(Thinning, TwoDimensional) {
  const Domain d = Domain::rectangle({0, 2}, {0, 3});
  const double m = mean_count(IntensitySpec::constant(5.0), d, 1000, 7);
  EXPECT_NEAR(m, 30.0, 3 * std::sqrt(30.0 / 1000.0));
}

TEST(Thinning, Deterministic) {
  Rng a = make_rng(9), b = make_rng(9);
  const Domain d = Domain::interval(50.0);
  const auto ea = simulate_thinning(IntensitySpec::lambda1(), d, a);
  const auto eb = simulate_thinning(IntensitySpec::lambda1(), d, b);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) EXPECT_EQ(ea[i][0], eb[i][0]);
}

TEST(Binning, Example) {
  const Domain d = Domain::interval(2.0);
  const BinnedEvents b = bin_events({point1(0.5), point1(1.5), point1(1.6)}, {Box::interval(1, 2)}, d);
  ASSERT_EQ(b.kept.size(), 1u);
  EXPECT_EQ(b.kept[0][0], 0.5);
  ASSERT_EQ(b.bins.size(), 1u);
  EXPECT_EQ(b.bins[0].count, 2.0);
}

TEST(Binning, EmptyBin) {
  const Domain d = Domain::interval(3.0);
  const BinnedEvents b = bin_events({point1(0.5)}, {Box::interval(1, 2), Box::interval(2, 3)}, d);
  EXPECT_EQ(b.bins[0].count, 0.0);
  EXPECT_EQ(b.bins[1].count, 0.0);
}

TEST(Binning, RecountMatches) {
  Rng rng = make_rng(10);
  const Domain d = Domain::interval(50.0);
  const auto ev = simulate_thinning(IntensitySpec::lambda1(), d, rng);
  const auto boxes = tail_bins(d, 30.0, 4.0);
  const BinnedEvents b = bin_events(ev, boxes, d);
  double binned = 0.0;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    double recount = 0.0;
    for (const Point& p : ev) {
      if (p[0] >= boxes[k].lo[0] && (p[0] < boxes[k].hi[0] || (k + 1 == boxes.size() && p[0] <= 50.0))) {
        recount += 1;
      }
    }
    EXPECT_EQ(b.bins[k].count, recount);
    binned += b.bins[k].count;
  }
  EXPECT_EQ(binned + static_cast<double>(b.kept.size()), static_cast<double>(ev.size()));
  for (const Point& p : b.kept) EXPECT_LT(p[0], 30.0);
}

TEST(Binning, OverlapRejected) {
  const Domain d = Domain::interval(5.0);
  EXPECT_THROW(bin_events({}, {Box::interval(1, 3), Box::interval(2, 4)}, d), ContractViolation);
  EXPECT_THROW(bin_events({}, {Box::interval(4, 6)}, d), Error);
}

TEST(Binning, TailBins) {
  const auto bins = tail_bins(Domain::interval(365.0), 281.0, 7.0);
  ASSERT_EQ(bins.size(), 12u);
  EXPECT_EQ(bins.front().lo[0], 281.0);
  EXPECT_EQ(bins[1].lo[0], 288.0);
  EXPECT_EQ(bins.back().hi[0], 365.0);
  EXPECT_EQ(bins.back().lo[0], 281.0 + 11 * 7.0);
  EXPECT_THROW(tail_bins(Domain::interval(5.0), 1.0, 0.0), ContractViolation);
}
