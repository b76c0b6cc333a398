#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "rigp/error.hpp"
#include "rigp/samplers.hpp"

namespace rigp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd normal_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = standard_normal(rng);
  return r;
}

// Brownian prior N(0, Ct/theta) has variance 1/(theta eps) along the level
// direction u, far wider than the posterior. Both samplers therefore work
// with a reference Gaussian that keeps the prior on the complement of u but
// centres the level at `mean` with spread `spread`; the discrepancy is moved
// into the likelihood, so the target is unchanged.
class BrownianReference {
 public:
  BrownianReference(const BmPrecisionBundle& bundle, const Eigen::VectorXd& mean, double spread)
      : bundle_(bundle), mean_(mean), mean_level_(bundle.level_direction().dot(mean)),
        spread_(spread),
        level_scale_(spread * std::sqrt(bundle.level_shift() + bundle.epsilon())) {}

  void set_theta(double theta) { theta_ = theta; }
  const Eigen::VectorXd& mean() const { return mean_; }

  // x -> P x, P = (I - uu^T)/sqrt(theta) + level_scale uu^T.
  Eigen::VectorXd scale(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd& u = bundle_.level_direction();
    const double a = u.dot(x);
    return (x - a * u) / std::sqrt(theta_) + level_scale_ * a * u;
  }
  Eigen::VectorXd unscale(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd& u = bundle_.level_direction();
    const double a = u.dot(x);
    return std::sqrt(theta_) * (x - a * u) + (a / level_scale_) * u;
  }

  // lam = mean + P W^{-1/2} z, with W = L L^T.
  Eigen::VectorXd from_white(const Eigen::VectorXd& z) const {
    Eigen::VectorXd w = bundle_.W_chol().triangularView<Eigen::Lower>().transpose().solve(z);
    return mean_ + scale(w);
  }
  Eigen::VectorXd to_white(const Eigen::VectorXd& lam) const {
    return bundle_.W_chol().transpose() * unscale(lam - mean_);
  }
  // Gradient with respect to z given the gradient with respect to lam.
  Eigen::VectorXd pull_back(const Eigen::VectorXd& grad) const {
    return bundle_.W_chol().triangularView<Eigen::Lower>().solve(scale(grad));
  }

  // log N(lam; 0, Ct/theta) - log N(lam; mean, reference), up to a constant.
  double log_ratio(const Eigen::VectorXd& lam) const {
    const double b = bundle_.level_direction().dot(lam);
    const double d = b - mean_level_;
    return d * d / (2.0 * spread_ * spread_) - 0.5 * theta_ * bundle_.epsilon() * b * b;
  }

  Eigen::VectorXd draw_centered(Rng& rng) const {
    return from_white(normal_vector(mean_.size(), rng)) - mean_;
  }

 private:
  const BmPrecisionBundle& bundle_;
  Eigen::VectorXd mean_;
  double mean_level_;
  double spread_;
  double level_scale_;
  double theta_ = 1.0;
};

}  // namespace

GammaParams theta_conditional(const Eigen::VectorXd& state, const BmPrecisionBundle& bundle,
                              const GammaPrior& prior) {
  if (state.size() != bundle.size()) throw ContractViolation("state does not match bundle");
  if (!(prior.alpha > 0.0 && prior.beta > 0.0)) {
    throw ContractViolation("Gamma prior parameters must be positive");
  }
  return GammaParams{prior.alpha + 0.5 * static_cast<double>(state.size()),
                     prior.beta + 0.5 * bundle.quadratic_form(state)};
}

double gibbs_theta(const Eigen::VectorXd& state, const BmPrecisionBundle& bundle,
                   const GammaPrior& prior, Rng& rng) {
  const GammaParams p = theta_conditional(state, bundle, prior);
  return std::gamma_distribution<double>(p.shape, 1.0 / p.rate)(rng);
}

std::string sampler_name(SamplerKind kind) { return kind == SamplerKind::Ess ? "ess" : "nuts"; }

SamplerKind parse_sampler(const std::string& name) {
  if (name == "ess") return SamplerKind::Ess;
  if (name == "nuts") return SamplerKind::Nuts;
  throw ContractViolation("unknown sampler '" + name + "' (expected ess or nuts)");
}

PosteriorSamples run_chain(const Dataset& data, const KernelSpec& kernel,
                           const ChainConfig& config) {
  if (config.thin < 1) throw ContractViolation("thin must be at least 1");
  validate(kernel, data.domain);

  PosteriorSamples out;
  out.layout = StateLayout::from(data);
  out.seed = config.seed;
  const StateLayout& layout = out.layout;
  const std::vector<Point> points = StateLayout::points(data);
  if (points.empty()) throw ContractViolation("need at least one grid point or event");
  const auto n = static_cast<Eigen::Index>(layout.size());

  Rng rng = make_rng(config.seed);
  Eigen::VectorXd state = initial_state(data, layout);
  auto loglik = [&layout](const Eigen::VectorXd& lam) { return log_likelihood(lam, layout); };
  if (!std::isfinite(loglik(state))) {
    throw InitializationFailure(
        "constant starting state has zero likelihood; check that the domain measure and counts "
        "are positive");
  }

  const bool brownian = is_brownian(kernel);
  std::optional<BmPrecisionBundle> bundle;
  std::optional<AugmentedCovariance> cov;
  std::unique_ptr<BrownianReference> reference;
  double theta = 1.0;
  if (brownian) {
    bundle = BmPrecisionBundle::build(data.domain, points, layout.regions, config.epsilon);
    const double n_tot = std::max(data.total_count(), 1.0);
    reference = std::make_unique<BrownianReference>(*bundle, state,
                                                    2.0 * state.norm() / std::sqrt(n_tot));
    theta = gibbs_theta(state, *bundle, config.theta_prior, rng);
  } else {
    cov.emplace(build_augmented_covariance(kernel, data.domain, points, layout.regions));
  }

  // log density and gradient in whitened coordinates
  LogDensityGradFn white_density = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    const Eigen::VectorXd lam = brownian
        ? reference->from_white(z)
        : Eigen::VectorXd(cov->chol().triangularView<Eigen::Lower>() * z);
    if (!(lam.minCoeff() > 0.0)) return kNegInf;
    auto [value, g] = brownian ? log_posterior_and_gradient(lam, layout, BmPrior{&*bundle, theta})
                               : log_posterior_and_gradient(lam, layout, *cov);
    grad = brownian ? reference->pull_back(g)
                    : Eigen::VectorXd(cov->chol().transpose() * g);
    return value;
  };
  auto to_white = [&](const Eigen::VectorXd& lam) -> Eigen::VectorXd {
    if (brownian) return reference->to_white(lam);
    return cov->chol().triangularView<Eigen::Lower>().solve(lam);
  };

  Nuts nuts(config.nuts);
  if (config.sampler == SamplerKind::Nuts) {
    if (brownian) reference->set_theta(theta);
    nuts.initialize(to_white(state), white_density, rng);
    nuts.set_adapting(config.n_burnin > 0);
  }

  const std::uint64_t total = config.n_burnin + config.n_samples * config.thin;
  out.lam_draws.resize(static_cast<Eigen::Index>(config.n_samples), n);
  if (brownian) out.theta_draws.reserve(config.n_samples);
  Eigen::Index kept = 0;

  for (std::uint64_t it = 0; it < total; ++it) {
    if (it == config.n_burnin) nuts.set_adapting(false);
    if (brownian) reference->set_theta(theta);

    if (config.sampler == SamplerKind::Ess) {
      EssResult res;
      if (brownian) {
        auto target = [&](const Eigen::VectorXd& lam) {
          const double ll = loglik(lam);
          return std::isfinite(ll) ? ll + reference->log_ratio(lam) : kNegInf;
        };
        res = elliptical_slice(state, target(state), reference->mean(),
                               reference->draw_centered(rng), target, rng);
      } else {
        res = elliptical_slice(state, loglik(state), Eigen::VectorXd::Zero(n),
                               cov->chol().triangularView<Eigen::Lower>() * normal_vector(n, rng),
                               loglik, rng);
      }
      state = std::move(res.state);
      out.diagnostics.ess_shrinks += static_cast<std::uint64_t>(res.shrinks);
    } else {
      const Eigen::VectorXd z = nuts.step(to_white(state), white_density, rng);
      state = brownian ? reference->from_white(z)
                       : Eigen::VectorXd(cov->chol().triangularView<Eigen::Lower>() * z);
    }

    if (brownian) theta = gibbs_theta(state, *bundle, config.theta_prior, rng);

    if (it >= config.n_burnin && (it - config.n_burnin + 1) % config.thin == 0) {
      out.lam_draws.row(kept++) = state.transpose();
      if (brownian) out.theta_draws.push_back(theta);
    }
  }

  out.diagnostics.iterations = total;
  out.diagnostics.nuts = nuts.stats();
  out.diagnostics.nuts_step_size = config.sampler == SamplerKind::Nuts ? nuts.step_size() : 0.0;
  return out;
}

}  // namespace rigp
