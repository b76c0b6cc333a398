#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rigp/gmrf.hpp"
#include "rigp/kernels.hpp"
#include "rigp/model.hpp"
#include "rigp/rng.hpp"

namespace rigp {

using LogLikFn = std::function<double(const Eigen::VectorXd&)>;
/// Returns log density and writes its gradient; may return -inf (gradient
/// then ignored).
using LogDensityGradFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// ---------------------------------------------------------------------------
// Elliptical slice sampling

struct EssResult {
  Eigen::VectorXd state;
  double loglik = 0.0;
  int shrinks = 0;
};

/// One elliptical slice update for prior N(mean, S) times exp(loglik).
/// `nu` is a draw from N(0, S); `current_loglik` must be finite.
EssResult elliptical_slice(const Eigen::VectorXd& current, double current_loglik,
                           const Eigen::VectorXd& mean, const Eigen::VectorXd& nu,
                           const LogLikFn& loglik, Rng& rng);

/// Zero-mean prior given by its lower Cholesky factor.
EssResult ess_step(const Eigen::VectorXd& current, const Eigen::MatrixXd& chol,
                   const LogLikFn& loglik, Rng& rng);

// ---------------------------------------------------------------------------
// No-U-Turn sampler (slice variant with dual-averaging step size)

struct NutsConfig {
  double target_accept = 0.8;
  int max_depth = 10;
  double max_energy_error = 1000.0;
  double gamma = 0.05;
  double t0 = 10.0;
  double kappa = 0.75;
};

struct NutsStats {
  std::uint64_t transitions = 0;
  std::uint64_t divergences = 0;
  std::uint64_t depth_sum = 0;
  double accept_sum = 0.0;
};

/// One leapfrog step for H(z, r) = -logp(z) + |r|^2 / 2. `grad` holds the
/// gradient at `z` on entry and at the new point on exit.
double leapfrog(Eigen::VectorXd& z, Eigen::VectorXd& r, Eigen::VectorXd& grad, double step,
                const LogDensityGradFn& f);

class Nuts {
 public:
  explicit Nuts(NutsConfig config = {});

  /// Heuristic initial step size (doubling/halving until the one-step
  /// acceptance crosses 1/2); also resets dual averaging.
  void initialize(const Eigen::VectorXd& z, const LogDensityGradFn& f, Rng& rng);
  void set_adapting(bool adapting);
  bool adapting() const noexcept { return adapting_; }
  double step_size() const noexcept { return step_; }
  void set_step_size(double step) { step_ = step; }
  const NutsStats& stats() const noexcept { return stats_; }
  int last_depth() const noexcept { return last_depth_; }

  /// One transition from `z`; the log density at z must be finite.
  Eigen::VectorXd step(const Eigen::VectorXd& z, const LogDensityGradFn& f, Rng& rng);

 private:
  struct Tree;
  Tree build_tree(const Eigen::VectorXd& z, const Eigen::VectorXd& r, const Eigen::VectorXd& grad,
                  double log_u, int direction, int depth, double h0,
                  const LogDensityGradFn& f, Rng& rng);
  void adapt(double accept_stat);

  NutsConfig config_;
  double step_ = 0.1;
  bool adapting_ = false;
  // dual averaging state
  double mu_ = 0.0;
  double h_bar_ = 0.0;
  double log_step_bar_ = 0.0;
  std::uint64_t adapt_iter_ = 0;
  NutsStats stats_;
  int last_depth_ = 0;
};

// ---------------------------------------------------------------------------
// Conjugate precision update

struct GammaParams {
  double shape = 0.0;
  double rate = 0.0;
};

/// Full conditional of the Brownian precision: Gamma(alpha + n/2,
/// beta + lam^T (Qt + eps I) lam / 2), n the state dimension.
GammaParams theta_conditional(const Eigen::VectorXd& state, const BmPrecisionBundle& bundle,
                              const GammaPrior& prior);
double gibbs_theta(const Eigen::VectorXd& state, const BmPrecisionBundle& bundle,
                   const GammaPrior& prior, Rng& rng);

// ---------------------------------------------------------------------------
// Chain driver

enum class SamplerKind { Ess, Nuts };

std::string sampler_name(SamplerKind kind);
SamplerKind parse_sampler(const std::string& name);

struct ChainConfig {
  std::uint64_t n_burnin = 10000;
  std::uint64_t n_samples = 50000;
  std::uint64_t thin = 1;
  SamplerKind sampler = SamplerKind::Ess;
  std::uint64_t seed = 1;
  /// Brownian prior perturbation and the Gamma prior on its precision.
  double epsilon = 1e-8;
  GammaPrior theta_prior{};
  NutsConfig nuts{};
};

struct ChainDiagnostics {
  std::uint64_t iterations = 0;
  std::uint64_t ess_shrinks = 0;
  NutsStats nuts{};
  double nuts_step_size = 0.0;
};

struct PosteriorSamples {
  StateLayout layout;
  /// One retained draw per row.
  Eigen::MatrixXd lam_draws;
  /// Retained precision draws (Brownian kernels only).
  std::vector<double> theta_draws;
  ChainDiagnostics diagnostics;
  std::uint64_t seed = 0;

  std::size_t n_draws() const noexcept { return static_cast<std::size_t>(lam_draws.rows()); }
};

/// Metropolis-within-Gibbs: lambda | theta by ESS or NUTS, then theta | lambda
/// by its Gamma conditional for Brownian kernels. SE kernels keep their
/// hyperparameters fixed.
PosteriorSamples run_chain(const Dataset& data, const KernelSpec& kernel,
                           const ChainConfig& config);

}  // namespace rigp
