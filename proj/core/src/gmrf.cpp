#include "rigp/gmrf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rigp/error.hpp"
#include "rigp/kernels.hpp"

namespace rigp {

BmPrecisionBundle BmPrecisionBundle::build(const Domain& domain, const std::vector<Point>& points,
                                           const std::vector<Region>& regions, double epsilon) {
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (points.empty()) throw ContractViolation("at least one point is required");
  for (const auto& p : points) {
    const Point k = domain.to_kernel(p);
    for (int a = 0; a < domain.dim(); ++a) {
      if (!(k[a] > 0.0)) {
        std::ostringstream os;
        os << "Brownian precision needs strictly positive coordinates, got " << k[a];
        throw ContractViolation(os.str());
      }
    }
  }
  require_distinct(domain, points);

  BmPrecisionBundle b;
  b.n_points_ = points.size();
  b.dim_ = domain.dim();
  b.epsilon_ = epsilon;
  const KernelSpec unit = domain.dim() == 1 ? KernelSpec{BrownianMotion{1.0}}
                                            : KernelSpec{BrownianSheet{1.0}};
  validate(unit, domain);
  b.c_ = augmented_matrix(unit, domain, points, regions);

  const auto m = static_cast<Eigen::Index>(points.size());
  const auto r = static_cast<Eigen::Index>(regions.size());
  const Eigen::Index n = m + r;
  b.l_ = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 0; j < r; ++j) b.l_(m + j) = regions[j].measure(domain.dim());

  b.perm_.resize(points.size());
  std::iota(b.perm_.begin(), b.perm_.end(), 0);

  if (b.dim_ == 1) {
    std::sort(b.perm_.begin(), b.perm_.end(),
              [&](std::size_t i, std::size_t j) { return points[i][0] < points[j][0]; });
    Eigen::VectorXd x(m);
    for (Eigen::Index k = 0; k < m; ++k) x(k) = domain.to_kernel(points[b.perm_[k]])[0];

    // Brownian motion pinned at 0: independent increments give a tridiagonal
    // precision with 1/gap couplings.
    b.q_diag_ = Eigen::VectorXd::Zero(m);
    b.q_off_ = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index k = 0; k < m; ++k) {
      const double left = 1.0 / (x(k) - (k == 0 ? 0.0 : x(k - 1)));
      b.q_diag_(k) += left;
      if (k > 0) {
        b.q_diag_(k - 1) += left;
        b.q_off_(k - 1) = -left;
      }
    }

    Eigen::MatrixXd cross(m, r);
    for (Eigen::Index k = 0; k < m; ++k) {
      cross.row(k) = b.c_.block(static_cast<Eigen::Index>(b.perm_[k]), m, 1, r);
    }
    b.qb_.resize(m, r);
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) {
        double v = b.q_diag_(k) * cross(k, j);
        if (k > 0) v += b.q_off_(k - 1) * cross(k - 1, j);
        if (k + 1 < m) v += b.q_off_(k) * cross(k + 1, j);
        b.qb_(k, j) = v;
      }
    }
    Eigen::MatrixXd schur = b.c_.bottomRightCorner(r, r) - cross.transpose() * b.qb_;
    b.schur_.compute(schur);
    if (r > 0 && b.schur_.info() != Eigen::Success) {
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(schur, Eigen::EigenvaluesOnly)
              .eigenvalues()(0);
      throw IllConditionedCovariance("integral block is singular given the point values",
                                     min_eig);
    }

    Eigen::MatrixXd sorted_inv(n, n);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    q.diagonal() = b.q_diag_;
    for (Eigen::Index k = 0; k + 1 < m; ++k) q(k, k + 1) = q(k + 1, k) = b.q_off_(k);
    const Eigen::MatrixXd s_inv = r > 0 ? b.schur_.solve(Eigen::MatrixXd::Identity(r, r))
                                        : Eigen::MatrixXd(0, 0);
    sorted_inv.topLeftCorner(m, m) = q + b.qb_ * s_inv * b.qb_.transpose();
    sorted_inv.topRightCorner(m, r) = -b.qb_ * s_inv;
    sorted_inv.bottomLeftCorner(r, m) = sorted_inv.topRightCorner(m, r).transpose();
    sorted_inv.bottomRightCorner(r, r) = s_inv;

    Eigen::VectorXi pos(n);
    for (Eigen::Index k = 0; k < m; ++k) pos(static_cast<Eigen::Index>(b.perm_[k])) = static_cast<int>(k);
    for (Eigen::Index j = m; j < n; ++j) pos(j) = static_cast<int>(j);
    b.c_inv_.resize(n, n);
    b.rw_precision_.resize(m, m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) b.c_inv_(i, j) = sorted_inv(pos(i), pos(j));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) b.rw_precision_(i, j) = q(pos(i), pos(j));
    }
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(b.c_);
    if (llt.info() == Eigen::Success) {
      b.c_inv_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    } else {
      Eigen::MatrixXd lower;
      jittered_cholesky(b.c_, lower);
      Eigen::MatrixXd li = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
      b.c_inv_ = li.transpose() * li;
    }
    b.c_inv_ = 0.5 * (b.c_inv_ + b.c_inv_.transpose()).eval();
  }

  b.g_ = b.c_inv_times(b.l_);
  b.gamma_ = b.l_.dot(b.g_);
  b.q_tilde_ = b.c_inv_ - b.g_ * b.g_.transpose() / b.gamma_;
  b.q_tilde_ = 0.5 * (b.q_tilde_ + b.q_tilde_.transpose()).eval();

  b.u_ = b.l_ / b.l_.norm();
  b.kappa_ = b.q_tilde_.diagonal().mean();
  Eigen::MatrixXd w = b.q_tilde_ + b.kappa_ * b.u_ * b.u_.transpose();
  w.diagonal().array() += epsilon;
  jittered_cholesky(w, b.w_chol_);

  Eigen::MatrixXd w_inv_half =
      b.w_chol_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  b.c_tilde_ = w_inv_half.transpose() * w_inv_half;
  b.c_tilde_ += (1.0 / epsilon - 1.0 / (b.kappa_ + epsilon)) * b.u_ * b.u_.transpose();

  b.log_det_ = 2.0 * b.w_chol_.diagonal().array().log().sum() +
               std::log(epsilon / (b.kappa_ + epsilon));
  return b;
}

const Eigen::MatrixXd& BmPrecisionBundle::random_walk_precision() const {
  if (dim_ != 1) throw ContractViolation("random walk precision exists only for 1D bundles");
  return rw_precision_;
}

Eigen::VectorXd BmPrecisionBundle::to_sorted(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (std::size_t k = 0; k < n_points_; ++k) y(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(perm_[k]));
  return y;
}

Eigen::VectorXd BmPrecisionBundle::from_sorted(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (std::size_t k = 0; k < n_points_; ++k) y(static_cast<Eigen::Index>(perm_[k])) = x(static_cast<Eigen::Index>(k));
  return y;
}

Eigen::VectorXd BmPrecisionBundle::c_inv_sorted(const Eigen::VectorXd& x) const {
  const auto m = static_cast<Eigen::Index>(n_points_);
  const Eigen::Index r = x.size() - m;
  Eigen::VectorXd qv(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    double v = q_diag_(k) * x(k);
    if (k > 0) v += q_off_(k - 1) * x(k - 1);
    if (k + 1 < m) v += q_off_(k) * x(k + 1);
    qv(k) = v;
  }
  Eigen::VectorXd out(x.size());
  if (r == 0) {
    out = qv;
    return out;
  }
  const Eigen::VectorXd t = schur_.solve(qb_.transpose() * x.head(m) - x.tail(r));
  out.head(m) = qv + qb_ * t;
  out.tail(r) = -t;
  return out;
}

Eigen::VectorXd BmPrecisionBundle::c_inv_times(const Eigen::VectorXd& x) const {
  if (dim_ == 1) return from_sorted(c_inv_sorted(to_sorted(x)));
  return c_inv_ * x;
}

double BmPrecisionBundle::intrinsic_form(const Eigen::VectorXd& lam) const {
  if (lam.size() != l_.size()) throw ContractViolation("state dimension does not match bundle");
  // lam^T Qt lam = min over c of (lam - c l)^T C^{-1} (lam - c l); evaluating
  // at the minimizer avoids cancelling two large terms.
  const double level = g_.dot(lam) / gamma_;
  const Eigen::VectorXd resid = lam - level * l_;
  return std::max(0.0, resid.dot(c_inv_times(resid)));
}

double BmPrecisionBundle::quadratic_form(const Eigen::VectorXd& lam) const {
  return intrinsic_form(lam) + epsilon_ * lam.squaredNorm();
}

Eigen::VectorXd BmPrecisionBundle::precision_times(const Eigen::VectorXd& lam) const {
  if (lam.size() != l_.size()) throw ContractViolation("state dimension does not match bundle");
  return c_inv_times(lam) - g_ * (g_.dot(lam) / gamma_) + epsilon_ * lam;
}

}  // namespace rigp
