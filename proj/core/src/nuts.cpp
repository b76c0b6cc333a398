#include <cmath>
#include <limits>

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

bool no_u_turn(const Eigen::VectorXd& z_minus, const Eigen::VectorXd& z_plus,
               const Eigen::VectorXd& r_minus, const Eigen::VectorXd& r_plus) {
  const Eigen::VectorXd span = z_plus - z_minus;
  return span.dot(r_minus) >= 0.0 && span.dot(r_plus) >= 0.0;
}

}  // namespace

double leapfrog(Eigen::VectorXd& z, Eigen::VectorXd& r, Eigen::VectorXd& grad, double step,
                const LogDensityGradFn& f) {
  r.noalias() += 0.5 * step * grad;
  z.noalias() += step * r;
  const double logp = f(z, grad);
  if (!std::isfinite(logp)) return kNegInf;
  r.noalias() += 0.5 * step * grad;
  return logp;
}

struct Nuts::Tree {
  Eigen::VectorXd z_minus, r_minus, g_minus;
  Eigen::VectorXd z_plus, r_plus, g_plus;
  Eigen::VectorXd z_prime;
  double n = 0.0;
  bool s = true;
  double alpha = 0.0;
  double n_alpha = 0.0;
};

Nuts::Nuts(NutsConfig config) : config_(config) {
  if (!(config_.target_accept > 0.0 && config_.target_accept < 1.0)) {
    throw ContractViolation("NUTS target acceptance must lie in (0,1)");
  }
  if (config_.max_depth < 1) throw ContractViolation("NUTS max depth must be at least 1");
}

void Nuts::initialize(const Eigen::VectorXd& z, const LogDensityGradFn& f, Rng& rng) {
  Eigen::VectorXd g(z.size());
  const double logp0 = f(z, g);
  if (!std::isfinite(logp0)) throw ContractViolation("NUTS start point has zero density");
  double step = 1.0;
  auto log_ratio = [&](double eps) {
    Eigen::VectorXd zz = z;
    Eigen::VectorXd gg = g;
    Eigen::VectorXd r = normal_vector(z.size(), rng);
    const double h0 = logp0 - 0.5 * r.squaredNorm();
    const double logp = leapfrog(zz, r, gg, eps, f);
    return std::isfinite(logp) ? logp - 0.5 * r.squaredNorm() - h0 : kNegInf;
  };
  double lr = log_ratio(step);
  const double dir = lr > std::log(0.5) ? 1.0 : -1.0;
  for (int k = 0; k < 100 && dir * lr > -dir * std::log(2.0); ++k) {
    step *= std::pow(2.0, dir);
    lr = log_ratio(step);
  }
  step_ = step;
  mu_ = std::log(10.0 * step_);
  h_bar_ = 0.0;
  log_step_bar_ = 0.0;
  adapt_iter_ = 0;
}

void Nuts::set_adapting(bool adapting) {
  if (adapting_ && !adapting && adapt_iter_ > 0) step_ = std::exp(log_step_bar_);
  adapting_ = adapting;
}

void Nuts::adapt(double accept_stat) {
  const double m = static_cast<double>(++adapt_iter_);
  const double w = 1.0 / (m + config_.t0);
  h_bar_ = (1.0 - w) * h_bar_ + w * (config_.target_accept - accept_stat);
  const double log_step = mu_ - std::sqrt(m) / config_.gamma * h_bar_;
  const double eta = std::pow(m, -config_.kappa);
  log_step_bar_ = eta * log_step + (1.0 - eta) * log_step_bar_;
  step_ = std::exp(log_step);
}

Nuts::Tree Nuts::build_tree(const Eigen::VectorXd& z, const Eigen::VectorXd& r,
                            const Eigen::VectorXd& grad, double log_u, int direction, int depth,
                            double h0, const LogDensityGradFn& f, Rng& rng) {
  if (depth == 0) {
    Tree t;
    t.z_minus = z;
    t.r_minus = r;
    t.g_minus = grad;
    const double logp = leapfrog(t.z_minus, t.r_minus, t.g_minus, direction * step_, f);
    const double h = std::isfinite(logp) ? logp - 0.5 * t.r_minus.squaredNorm() : kNegInf;
    t.n = log_u <= h ? 1.0 : 0.0;
    t.s = h > log_u - config_.max_energy_error;
    if (!t.s) ++stats_.divergences;
    t.alpha = std::isfinite(h) ? std::min(1.0, std::exp(h - h0)) : 0.0;
    t.n_alpha = 1.0;
    t.z_plus = t.z_minus;
    t.r_plus = t.r_minus;
    t.g_plus = t.g_minus;
    t.z_prime = t.z_minus;
    return t;
  }
  Tree t = build_tree(z, r, grad, log_u, direction, depth - 1, h0, f, rng);
  if (!t.s) return t;
  Tree u = direction < 0 ? build_tree(t.z_minus, t.r_minus, t.g_minus, log_u, direction,
                                      depth - 1, h0, f, rng)
                         : build_tree(t.z_plus, t.r_plus, t.g_plus, log_u, direction,
                                      depth - 1, h0, f, rng);
  if (direction < 0) {
    t.z_minus = std::move(u.z_minus);
    t.r_minus = std::move(u.r_minus);
    t.g_minus = std::move(u.g_minus);
  } else {
    t.z_plus = std::move(u.z_plus);
    t.r_plus = std::move(u.r_plus);
    t.g_plus = std::move(u.g_plus);
  }
  if (t.n + u.n > 0.0 && uniform01(rng) < u.n / (t.n + u.n)) t.z_prime = std::move(u.z_prime);
  t.alpha += u.alpha;
  t.n_alpha += u.n_alpha;
  t.s = u.s && no_u_turn(t.z_minus, t.z_plus, t.r_minus, t.r_plus);
  t.n += u.n;
  return t;
}

Eigen::VectorXd Nuts::step(const Eigen::VectorXd& z, const LogDensityGradFn& f, Rng& rng) {
  Eigen::VectorXd grad(z.size());
  const double logp0 = f(z, grad);
  if (!std::isfinite(logp0)) throw ContractViolation("NUTS transition from a zero-density state");
  const Eigen::VectorXd r0 = normal_vector(z.size(), rng);
  const double h0 = logp0 - 0.5 * r0.squaredNorm();
  const double log_u = h0 + std::log(uniform01(rng));

  Eigen::VectorXd z_minus = z, z_plus = z, r_minus = r0, r_plus = r0;
  Eigen::VectorXd g_minus = grad, g_plus = grad;
  Eigen::VectorXd next = z;
  double n = 1.0;
  bool s = true;
  int depth = 0;
  double alpha = 0.0, n_alpha = 1.0;
  while (s && depth < config_.max_depth) {
    const int direction = uniform01(rng) < 0.5 ? -1 : 1;
    Tree t;
    if (direction < 0) {
      t = build_tree(z_minus, r_minus, g_minus, log_u, direction, depth, h0, f, rng);
      z_minus = t.z_minus;
      r_minus = t.r_minus;
      g_minus = t.g_minus;
    } else {
      t = build_tree(z_plus, r_plus, g_plus, log_u, direction, depth, h0, f, rng);
      z_plus = t.z_plus;
      r_plus = t.r_plus;
      g_plus = t.g_plus;
    }
    if (t.s && uniform01(rng) < t.n / n) next = t.z_prime;
    n += t.n;
    s = t.s && no_u_turn(z_minus, z_plus, r_minus, r_plus);
    alpha = t.alpha;
    n_alpha = t.n_alpha;
    ++depth;
  }
  const double accept = alpha / n_alpha;
  ++stats_.transitions;
  stats_.depth_sum += static_cast<std::uint64_t>(depth);
  stats_.accept_sum += accept;
  last_depth_ = depth;
  if (adapting_) adapt(accept);
  return next;
}

}  // namespace rigp
