#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "rigp/domain.hpp"
#include "rigp/gmrf.hpp"
#include "rigp/kernels.hpp"

namespace rigp {

struct Bin {
  Box box;
  double count = 0.0;
};

/// Half-open membership [lo, hi); a point on the domain's upper edge belongs
/// to the bin touching that edge.
bool in_bin(const Box& bin, const Point& p, const Domain& domain);

/// Events, optional binned counts and prediction points on one domain.
/// In mixed mode the events live in B0 = S minus the bins.
struct Dataset {
  explicit Dataset(Domain d) : domain(std::move(d)) {}

  Domain domain;
  std::vector<Point> events;
  std::vector<Bin> bins;
  std::vector<Point> grid;

  bool mixed() const noexcept { return !bins.empty(); }
  double total_count() const;
  /// Throws ContractViolation / DomainError when the invariants fail.
  void validate() const;
};

/// Positional map of the latent state [grid | observed | integrals].
///
/// Pure-event data has one integral slot, Lambda(S). Mixed data carries
/// Lambda(B0) followed by Lambda(B_1..B_J); B0 is omitted when the bins
/// cover S. Lambda(S) is always the sum of the integral slots.
struct StateLayout {
  std::size_t n_grid = 0;
  std::size_t n_obs = 0;
  std::vector<Region> regions;
  std::vector<double> counts;
  std::vector<double> measures;
  bool residual_slot = true;  // first integral slot carries no count

  static StateLayout from(const Dataset& data);

  std::size_t n_values() const noexcept { return n_grid + n_obs; }
  std::size_t n_integrals() const noexcept { return regions.size(); }
  std::size_t size() const noexcept { return n_values() + regions.size(); }
  std::size_t obs_begin() const noexcept { return n_grid; }
  std::size_t integral_begin() const noexcept { return n_values(); }

  /// Grid points followed by events, matching the value slots.
  static std::vector<Point> points(const Dataset& data);
  /// Total intensity mass, i.e. Lambda(S).
  double total_integral(const Eigen::VectorXd& state) const;
};

using State = Eigen::VectorXd;

struct GammaPrior {
  double alpha = 0.1;
  double beta = 0.1;
};

/// Brownian prior N(0, Ct / theta) from a precision bundle.
struct BmPrior {
  const BmPrecisionBundle* bundle = nullptr;
  double theta = 1.0;
};

/// Constant starting point: values at rate r and integrals at r * |region|,
/// with r = max(N + total count, 1) / |S|.
State initial_state(const Dataset& data, const StateLayout& layout);

/// -Lambda(S) + sum log lambda(s_n) + sum c_j log Lambda(B_j); -inf when any
/// component is not strictly positive.
double log_likelihood(const State& state, const StateLayout& layout);

/// Gaussian log density including its normalizing constant; the orthant
/// normalizer of the truncation is not included.
double log_prior(const State& state, const AugmentedCovariance& cov);
double log_prior(const State& state, const BmPrior& prior);

/// Gradient of the log-likelihood at a strictly positive state.
Eigen::VectorXd log_likelihood_gradient(const State& state, const StateLayout& layout);

std::pair<double, Eigen::VectorXd> log_posterior_and_gradient(const State& state,
                                                              const StateLayout& layout,
                                                              const AugmentedCovariance& cov);
std::pair<double, Eigen::VectorXd> log_posterior_and_gradient(const State& state,
                                                              const StateLayout& layout,
                                                              const BmPrior& prior);

}  // namespace rigp
