#include <cmath>
#include <numbers>

#include "rigp/error.hpp"
#include "rigp/samplers.hpp"

namespace rigp {

EssResult elliptical_slice(const Eigen::VectorXd& current, double current_loglik,
                           const Eigen::VectorXd& mean, const Eigen::VectorXd& nu,
                           const LogLikFn& loglik, Rng& rng) {
  if (!std::isfinite(current_loglik)) {
    throw ContractViolation("elliptical slice needs a finite log-likelihood at the current state");
  }
  const double log_y = current_loglik + std::log(uniform01(rng));
  const Eigen::VectorXd x0 = current - mean;

  double angle = 2.0 * std::numbers::pi * uniform01(rng);
  double lo = angle - 2.0 * std::numbers::pi;
  double hi = angle;
  EssResult out;
  while (true) {
    Eigen::VectorXd proposal = mean + x0 * std::cos(angle) + nu * std::sin(angle);
    const double ll = loglik(proposal);
    if (ll > log_y) {
      out.state = std::move(proposal);
      out.loglik = ll;
      return out;
    }
    ++out.shrinks;
    if (angle < 0.0) {
      lo = angle;
    } else {
      hi = angle;
    }
    if (hi - lo < 1e-12) {
      // Bracket collapsed onto the current point.
      out.state = current;
      out.loglik = current_loglik;
      return out;
    }
    angle = lo + (hi - lo) * uniform01(rng);
  }
}

EssResult ess_step(const Eigen::VectorXd& current, const Eigen::MatrixXd& chol,
                   const LogLikFn& loglik, Rng& rng) {
  if (chol.rows() != current.size()) throw ContractViolation("Cholesky factor does not match state");
  Eigen::VectorXd z(current.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  const Eigen::VectorXd nu = chol.triangularView<Eigen::Lower>() * z;
  return elliptical_slice(current, loglik(current), Eigen::VectorXd::Zero(current.size()), nu,
                          loglik, rng);
}

}  // namespace rigp
