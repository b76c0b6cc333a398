#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "rigp/domain.hpp"

namespace rigp {

/// k(x,y) = amplitude * exp(-inv_length_sq * |x-y|^2 / 2), isotropic in 2D.
struct SquaredExponential {
  double amplitude = 1.0;
  double inv_length_sq = 1.0;
};

/// k(s,t) = min(s,t) / precision.
struct BrownianMotion {
  double precision = 1.0;
};

/// k(x,y) = min(x1,y1) * min(x2,y2) / precision.
struct BrownianSheet {
  double precision = 1.0;
};

/// Per-axis squared exponential factors multiplied together.
struct ProductSE {
  std::array<double, kMaxDim> amplitude{1.0, 1.0};
  std::array<double, kMaxDim> inv_length_sq{1.0, 1.0};
};

using KernelSpec = std::variant<SquaredExponential, BrownianMotion, BrownianSheet, ProductSE>;

std::string kernel_name(const KernelSpec& spec);
/// True for the Brownian families whose precision is sampled by Gibbs.
bool is_brownian(const KernelSpec& spec);
/// Throws ContractViolation when a hyperparameter is not strictly positive
/// or the family does not fit the domain dimension.
void validate(const KernelSpec& spec, const Domain& domain);

/// Brownian kernels with the precision replaced by `precision`; the SE
/// families are returned unchanged.
KernelSpec with_precision(const KernelSpec& spec, double precision);

// All coordinates below are raw dataset coordinates; the domain offset is
// applied internally.

double kernel_eval(const KernelSpec& spec, const Domain& domain, const Point& x, const Point& y);

/// Integral over `region` of k(s, .).
double kernel_single_integral(const KernelSpec& spec, const Domain& domain, const Point& s,
                              const Box& region);
double kernel_single_integral(const KernelSpec& spec, const Domain& domain, const Point& s,
                              const Region& region);

/// Integral over region_a x region_b of k(s, t).
double kernel_double_integral(const KernelSpec& spec, const Domain& domain, const Box& region_a,
                              const Box& region_b);
double kernel_double_integral(const KernelSpec& spec, const Domain& domain,
                              const Region& region_a, const Region& region_b);

/// Joint prior covariance of [f(x_1..x_M), integral of f over each region].
class AugmentedCovariance {
 public:
  AugmentedCovariance(Eigen::MatrixXd v, std::size_t n_points);

  const Eigen::MatrixXd& V() const noexcept { return v_; }
  /// Lower factor with chol * chol^T = V + jitter * I.
  const Eigen::MatrixXd& chol() const noexcept { return l_; }
  double jitter() const noexcept { return jitter_; }
  std::size_t n_points() const noexcept { return n_points_; }
  std::size_t n_regions() const noexcept { return static_cast<std::size_t>(v_.rows()) - n_points_; }
  Eigen::Index size() const noexcept { return v_.rows(); }

  auto block_ss() const { return v_.topLeftCorner(n_points_, n_points_); }
  auto block_si() const { return v_.topRightCorner(n_points_, n_regions()); }
  auto block_ii() const { return v_.bottomRightCorner(n_regions(), n_regions()); }

  /// (V + jitter I)^{-1} x.
  Eigen::VectorXd solve(const Eigen::VectorXd& x) const;
  /// x^T (V + jitter I)^{-1} x.
  double quadratic_form(const Eigen::VectorXd& x) const;
  double log_det() const;

 private:
  Eigen::MatrixXd v_;
  Eigen::MatrixXd l_;
  double jitter_ = 0.0;
  std::size_t n_points_;
};

/// Cholesky with escalating diagonal jitter (1e-12 .. 1e-6, relative to the
/// mean diagonal). Returns the absolute jitter used; throws
/// IllConditionedCovariance after the last attempt.
double jittered_cholesky(const Eigen::MatrixXd& v, Eigen::MatrixXd& lower);

/// Rejects points closer than 1e-9 of the domain extent.
void require_distinct(const Domain& domain, const std::vector<Point>& points);

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Domain& domain,
                              const std::vector<Point>& points);

/// Raw [values | region integrals] covariance without factorization.
Eigen::MatrixXd augmented_matrix(const KernelSpec& spec, const Domain& domain,
                                 const std::vector<Point>& points,
                                 const std::vector<Region>& regions);

AugmentedCovariance build_augmented_covariance(const KernelSpec& spec, const Domain& domain,
                                               const std::vector<Point>& points,
                                               const std::vector<Region>& regions);

}  // namespace rigp
