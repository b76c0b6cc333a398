#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rigp/error.hpp"
#include "rigp/metrics.hpp"
#include "rigp/samplers.hpp"
#include "rigp/simulate.hpp"
#include "test_support.hpp"

using namespace rigp;
namespace rt = rigp::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset small_events(std::uint64_t seed, double T = 10.0, std::size_t grid = 20) {
  Rng rng = make_rng(seed);
  Dataset d(Domain::interval(T));
  d.events = simulate_thinning(IntensitySpec::constant(2.0), d.domain, rng);
  d.grid = midpoint_grid(d.domain, grid);
  return d;
}

double gaussian_logp(const Eigen::VectorXd& z, Eigen::VectorXd& g) {
  g = -z;
  return -0.5 * z.squaredNorm();
}

/// Monte Carlo standard error of the mean from non-overlapping batch means.
double batch_mean_se(const std::vector<double>& x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    means.push_back(s / static_cast<double>(len));
  }
  return std::sqrt(rt::variance(means) / static_cast<double>(batches));
}

}  // namespace

TEST(Ess, StaysInsideSlab) {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 0.3, 0.3, 1.0;
  const Eigen::MatrixXd L = S.llt().matrixL();
  const LogLikFn slab = [](const Eigen::VectorXd& x) {
    return (x(0) > 0.9 && x(0) < 1.1) ? 0.0 : -kInf;
  };
  Rng rng = make_rng(7);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  for (int i = 0; i < 5000; ++i) {
    const EssResult r = ess_step(x, L, slab, rng);
    x = r.state;
    ASSERT_GT(x(0), 0.9);
    ASSERT_LT(x(0), 1.1);
    ASSERT_EQ(r.loglik, 0.0);
  }
}

TEST(Ess, TruncatedGaussianMarginals) {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 0.6, 0.6, 2.0;
  const Eigen::MatrixXd L = S.llt().matrixL();
  const LogLikFn orthant = [](const Eigen::VectorXd& x) {
    return (x.array() > 0).all() ? 0.0 : -kInf;
  };
  Rng rng = make_rng(11);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  std::vector<double> a0, a1;
  for (int i = 0; i < 20000 * 5; ++i) {
    x = ess_step(x, L, orthant, rng).state;
    if (i % 5 == 4) {
      a0.push_back(x(0));
      a1.push_back(x(1));
    }
  }
  std::mt19937_64 gen(99);
  std::normal_distribution<double> n01;
  std::vector<double> b0, b1;
  while (b0.size() < 20000) {
    const Eigen::Vector2d y = L * Eigen::Vector2d(n01(gen), n01(gen));
    if (y(0) > 0 && y(1) > 0) {
      b0.push_back(y(0));
      b1.push_back(y(1));
    }
  }
  EXPECT_GT(rt::ks_two_sample_p(a0, b0), 0.01);
  EXPECT_GT(rt::ks_two_sample_p(a1, b1), 0.01);
}

TEST(Ess, Deterministic) {
  const Eigen::MatrixXd L = Eigen::MatrixXd::Identity(3, 3);
  const LogLikFn f = [](const Eigen::VectorXd& x) {
    return (x.array() > 0).all() ? -x.sum() : -kInf;
  };
  Rng a = make_rng(5), b = make_rng(5);
  Eigen::VectorXd xa = Eigen::VectorXd::Ones(3), xb = xa;
  for (int i = 0; i < 100; ++i) {
    xa = ess_step(xa, L, f, a).state;
    xb = ess_step(xb, L, f, b).state;
  }
  EXPECT_EQ(xa, xb);
}

TEST(Ess, NonFiniteStartIsRejected) {
  const Eigen::MatrixXd L = Eigen::MatrixXd::Identity(2, 2);
  const LogLikFn f = [](const Eigen::VectorXd& x) { return x(0) > 0 ? 0.0 : -kInf; };
  Rng rng = make_rng(1);
  EXPECT_THROW(ess_step(Eigen::VectorXd::Constant(2, -1.0), L, f, rng), ContractViolation);
}

TEST(Nuts, StandardGaussianMean) {
  Nuts nuts;
  Rng rng = make_rng(21);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  nuts.initialize(z, gaussian_logp, rng);
  nuts.set_adapting(true);
  for (int i = 0; i < 1000; ++i) z = nuts.step(z, gaussian_logp, rng);
  nuts.set_adapting(false);
  std::vector<double> x0, x1;
  for (int i = 0; i < 20000; ++i) {
    z = nuts.step(z, gaussian_logp, rng);
    x0.push_back(z(0));
    x1.push_back(z(1));
  }
  EXPECT_LT(std::abs(rt::mean(x0)), 3 * batch_mean_se(x0));
  EXPECT_LT(std::abs(rt::mean(x1)), 3 * batch_mean_se(x1));
  EXPECT_NEAR(rt::variance(x0), 1.0, 0.1);
  EXPECT_EQ(nuts.stats().divergences, 0u);
}

TEST(Nuts, LeapfrogConservesEnergy) {
  Eigen::VectorXd z(2), r(2), g;
  z << 1.0, -0.5;
  r << 0.3, 0.8;
  const double h0 = -gaussian_logp(z, g) + 0.5 * r.squaredNorm();
  double logp = 0.0;
  for (int i = 0; i < 100; ++i) logp = leapfrog(z, r, g, 1e-3, gaussian_logp);
  EXPECT_NEAR(-logp + 0.5 * r.squaredNorm(), h0, 1e-6);
}

TEST(Nuts, Deterministic) {
  auto run = [] {
    Nuts nuts;
    Rng rng = make_rng(3);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(4);
    nuts.initialize(z, gaussian_logp, rng);
    nuts.set_adapting(true);
    for (int i = 0; i < 200; ++i) z = nuts.step(z, gaussian_logp, rng);
    return z;
  };
  EXPECT_EQ(run(), run());
}

TEST(Nuts, RejectsLeavingThePositiveOrthant) {
  const LogDensityGradFn f = [](const Eigen::VectorXd& z, Eigen::VectorXd& g) {
    if ((z.array() <= 0).any()) return -kInf;
    g = -(z.array() - 0.2).matrix();
    return -0.5 * (z.array() - 0.2).matrix().squaredNorm();
  };
  Nuts nuts;
  Rng rng = make_rng(8);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(3, 0.5);
  nuts.initialize(z, f, rng);
  nuts.set_adapting(true);
  for (int i = 0; i < 2000; ++i) {
    z = nuts.step(z, f, rng);
    ASSERT_GT(z.minCoeff(), 0.0);
  }
}

TEST(Gibbs, ConditionalExample) {
  Dataset d(Domain::interval(5.0));
  d.events = {point1(1.0), point1(2.0), point1(4.0)};
  const StateLayout layout = StateLayout::from(d);
  ASSERT_EQ(layout.size(), 4u);  // M = 3 plus the integral slot
  const auto bundle = BmPrecisionBundle::build(d.domain, StateLayout::points(d), layout.regions, 1e-8);
  Eigen::VectorXd lam(4);
  lam << 1.0, 2.0, 0.5, 4.0;
  lam *= 2.0 / std::sqrt(bundle.quadratic_form(lam));
  ASSERT_NEAR(bundle.quadratic_form(lam), 4.0, 1e-12);
  const GammaParams g = theta_conditional(lam, bundle, GammaPrior{0.1, 0.1});
  EXPECT_NEAR(g.shape, 2.1, 1e-14);
  EXPECT_NEAR(g.rate, 2.1, 1e-12);
}

TEST(Gibbs, ZeroStateKeepsPriorRate) {
  Dataset d(Domain::interval(5.0));
  d.events = {point1(1.0), point1(2.0), point1(4.0)};
  const StateLayout layout = StateLayout::from(d);
  const auto bundle = BmPrecisionBundle::build(d.domain, StateLayout::points(d), layout.regions, 1e-8);
  const GammaParams g = theta_conditional(Eigen::VectorXd::Zero(4), bundle, GammaPrior{0.3, 0.7});
  EXPECT_DOUBLE_EQ(g.shape, 0.3 + 2.0);
  EXPECT_DOUBLE_EQ(g.rate, 0.7);
}

TEST(Gibbs, RateIncrementScalesQuadratically) {
  Rng rng = make_rng(4);
  const Dataset d = small_events(4);
  const StateLayout layout = StateLayout::from(d);
  const auto bundle = BmPrecisionBundle::build(d.domain, StateLayout::points(d), layout.regions, 1e-8);
  const GammaPrior prior{0.1, 0.25};
  Eigen::VectorXd lam(static_cast<Eigen::Index>(layout.size()));
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = 0.1 + uniform01(rng);
  const double base = theta_conditional(lam, bundle, prior).rate - prior.beta;
  const double a = 2.0;
  const double scaled = theta_conditional(Eigen::VectorXd(a * lam), bundle, prior).rate - prior.beta;
  EXPECT_NEAR(scaled, a * a * base, 1e-12 * scaled);
}

TEST(Gibbs, DrawMomentsMatchConditional) {
  const Dataset d = small_events(9);
  const StateLayout layout = StateLayout::from(d);
  const auto bundle = BmPrecisionBundle::build(d.domain, StateLayout::points(d), layout.regions, 1e-8);
  const Eigen::VectorXd lam = initial_state(d, layout);
  const GammaPrior prior{0.1, 0.1};
  const GammaParams g = theta_conditional(lam, bundle, prior);
  Rng rng = make_rng(13);
  std::vector<double> draws;
  for (int i = 0; i < 50000; ++i) draws.push_back(gibbs_theta(lam, bundle, prior, rng));
  EXPECT_LT(rt::relative_error(rt::mean(draws), g.shape / g.rate), 0.01);
  EXPECT_LT(rt::relative_error(rt::variance(draws), g.shape / (g.rate * g.rate)), 0.01);
}

TEST(Chain, ZeroLength) {
  ChainConfig cfg;
  cfg.n_burnin = 0;
  cfg.n_samples = 0;
  const PosteriorSamples s = run_chain(small_events(1), BrownianMotion{1.0}, cfg);
  EXPECT_EQ(s.n_draws(), 0u);
  EXPECT_TRUE(s.theta_draws.empty());
  EXPECT_EQ(static_cast<std::size_t>(s.lam_draws.cols()), s.layout.size());
}

TEST(Chain, CountsAndPositivity) {
  ChainConfig cfg;
  cfg.n_burnin = 50;
  cfg.n_samples = 40;
  cfg.thin = 3;
  const PosteriorSamples s = run_chain(small_events(2), BrownianMotion{1.0}, cfg);
  EXPECT_EQ(s.n_draws(), 40u);
  EXPECT_EQ(s.theta_draws.size(), 40u);
  EXPECT_EQ(s.diagnostics.iterations, 50u + 40u * 3u);
  EXPECT_GT(s.lam_draws.minCoeff(), 0.0);
  for (double t : s.theta_draws) EXPECT_GT(t, 0.0);
}

TEST(Chain, SameSeedSameDraws) {
  ChainConfig cfg;
  cfg.n_burnin = 30;
  cfg.n_samples = 30;
  cfg.seed = 77;
  const Dataset d = small_events(3);
  const PosteriorSamples a = run_chain(d, BrownianMotion{1.0}, cfg);
  const PosteriorSamples b = run_chain(d, BrownianMotion{1.0}, cfg);
  EXPECT_EQ(a.lam_draws, b.lam_draws);
  EXPECT_EQ(a.theta_draws, b.theta_draws);
  cfg.seed = 78;
  EXPECT_NE(run_chain(d, BrownianMotion{1.0}, cfg).lam_draws, a.lam_draws);
}

TEST(Chain, SquaredExponentialHasNoThetaDraws) {
  ChainConfig cfg;
  cfg.n_burnin = 50;
  cfg.n_samples = 50;
  const PosteriorSamples s = run_chain(small_events(5), SquaredExponential{4.0, 0.5}, cfg);
  EXPECT_TRUE(s.theta_draws.empty());
  EXPECT_GT(s.lam_draws.minCoeff(), 0.0);
}

TEST(Chain, MixedDataWithNuts) {
  Dataset d = small_events(6, 10.0, 10);
  std::vector<Point> kept;
  for (const Point& p : d.events) {
    if (p[0] < 7.0) kept.push_back(p);
  }
  const std::size_t tail = d.events.size() - kept.size();
  d.events = kept;
  d.bins.push_back(Bin{Box::interval(7.0, 10.0), static_cast<double>(tail)});
  ChainConfig cfg;
  cfg.n_burnin = 200;
  cfg.n_samples = 200;
  cfg.sampler = SamplerKind::Nuts;
  const PosteriorSamples s = run_chain(d, BrownianMotion{1.0}, cfg);
  EXPECT_EQ(s.n_draws(), 200u);
  EXPECT_GT(s.lam_draws.minCoeff(), 0.0);
  EXPECT_GT(s.diagnostics.nuts.transitions, 0u);
  EXPECT_GT(s.diagnostics.nuts_step_size, 0.0);
}

TEST(Chain, SamplerNames) {
  EXPECT_EQ(parse_sampler("ess"), SamplerKind::Ess);
  EXPECT_EQ(parse_sampler("nuts"), SamplerKind::Nuts);
  EXPECT_EQ(sampler_name(SamplerKind::Nuts), "nuts");
  EXPECT_THROW(parse_sampler("gibbs"), Error);
}

TEST(Chain, EssAndNutsAgreeOnMedians) {
  Rng rng = make_rng(31);
  Dataset d(Domain::interval(50.0));
  d.events = simulate_thinning(IntensitySpec::lambda1(), d.domain, rng);
  d.grid = midpoint_grid(d.domain, 100);
  ChainConfig cfg;
  cfg.seed = 5;
  cfg.n_burnin = 10000;
  cfg.n_samples = 50000;
  const EvalReport ess = summarize(run_chain(d, BrownianMotion{1.0}, cfg));
  cfg.sampler = SamplerKind::Nuts;
  cfg.n_burnin = 2000;
  cfg.n_samples = 10000;
  const EvalReport nuts = summarize(run_chain(d, BrownianMotion{1.0}, cfg));
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    worst = std::max(worst, std::abs(ess.quantiles[i].q50 - nuts.quantiles[i].q50));
  }
  EXPECT_LE(worst, 0.15 * ess.ci_width) << "max median gap " << worst << ", width " << ess.ci_width;
}
