#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "rigp/domain.hpp"

namespace rigp {

/// Precision structures for the Brownian prior with the level integrated out.
///
/// With C the unit-precision augmented covariance over [values | region
/// integrals] and l = (1,..,1, |R_1|,..,|R_J|), the intrinsic precision is
///   Qt = C^{-1} - C^{-1} l l^T C^{-1} / (l^T C^{-1} l),
/// which annihilates l. The prior actually used is N(0, Ct / theta) with
/// Ct = (Qt + eps I)^{-1}.
///
/// All vectors and dense matrices are in caller order. In 1D the points are
/// sorted internally so the value block of C^{-1} is the tridiagonal random
/// walk precision, and products with Qt cost O(M * regions).
class BmPrecisionBundle {
 public:
  /// Brownian motion (1D) or Brownian sheet (2D) depending on the domain.
  static BmPrecisionBundle build(const Domain& domain, const std::vector<Point>& points,
                                 const std::vector<Region>& regions, double epsilon);

  std::size_t n_points() const noexcept { return n_points_; }
  Eigen::Index size() const noexcept { return l_.size(); }
  double epsilon() const noexcept { return epsilon_; }

  const Eigen::MatrixXd& C() const noexcept { return c_; }
  const Eigen::MatrixXd& C_inv() const noexcept { return c_inv_; }
  const Eigen::VectorXd& l() const noexcept { return l_; }
  const Eigen::MatrixXd& Q_tilde() const noexcept { return q_tilde_; }
  /// (Qt + eps I)^{-1}, assembled without inverting the near-singular matrix.
  const Eigen::MatrixXd& C_tilde() const noexcept { return c_tilde_; }

  /// Unit vector along l; the eigenvector of Qt + eps I with eigenvalue eps.
  const Eigen::VectorXd& level_direction() const noexcept { return u_; }
  /// Mean diagonal of Qt; the eigenvalue assigned to u in W.
  double level_shift() const noexcept { return kappa_; }
  /// Lower Cholesky factor of W = Qt + eps I + kappa u u^T, which is well
  /// conditioned and shares every other eigenpair with Qt + eps I.
  const Eigen::MatrixXd& W_chol() const noexcept { return w_chol_; }

  /// Value-block random walk precision (inverse of the min-kernel matrix).
  /// Tridiagonal in sorted order; only available for 1D bundles.
  const Eigen::MatrixXd& random_walk_precision() const;
  /// sorted position k holds caller index permutation()[k].
  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

  /// lam^T Qt lam (level invariant, no eps term).
  double intrinsic_form(const Eigen::VectorXd& lam) const;
  /// lam^T (Qt + eps I) lam.
  double quadratic_form(const Eigen::VectorXd& lam) const;
  /// (Qt + eps I) lam.
  Eigen::VectorXd precision_times(const Eigen::VectorXd& lam) const;
  /// log det(Qt + eps I).
  double log_det_precision() const noexcept { return log_det_; }

 private:
  BmPrecisionBundle() = default;

  Eigen::VectorXd to_sorted(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_sorted(const Eigen::VectorXd& x) const;
  // C^{-1} x for x in sorted order, using the block structure.
  Eigen::VectorXd c_inv_sorted(const Eigen::VectorXd& x) const;
  Eigen::VectorXd c_inv_times(const Eigen::VectorXd& x) const;

  std::size_t n_points_ = 0;
  int dim_ = 1;
  double epsilon_ = 0.0;
  double kappa_ = 0.0;
  double log_det_ = 0.0;

  std::vector<std::size_t> perm_;
  Eigen::MatrixXd c_, c_inv_, q_tilde_, c_tilde_, w_chol_, rw_precision_;
  Eigen::VectorXd l_, u_, g_;
  double gamma_ = 0.0;

  // 1D structured pieces, sorted order.
  Eigen::VectorXd q_diag_, q_off_;
  Eigen::MatrixXd qb_;
  Eigen::LLT<Eigen::MatrixXd> schur_;
};

}  // namespace rigp
