#include "rigp/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rigp/error.hpp"

namespace rigp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gaussian_log_density(const Eigen::VectorXd& x, const AugmentedCovariance& cov) {
  const auto n = static_cast<double>(x.size());
  return -0.5 * cov.quadratic_form(x) - 0.5 * cov.log_det() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

std::vector<std::pair<double, double>> theta_bounds(KernelFamily family, const MapConfig& config) {
  if (!(config.theta_min > 0.0 && config.theta_max >= config.theta_min)) {
    throw ContractViolation("theta bounds must satisfy 0 < min <= max");
  }
  return std::vector<std::pair<double, double>>(
      n_hyperparameters(family), {std::log10(config.theta_min), std::log10(config.theta_max)});
}

std::vector<double> unlog(const std::vector<double>& x, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = std::pow(10.0, x[k]);
  return out;
}

void require_1d(const Domain& domain) {
  if (domain.dim() != 1) {
    throw ContractViolation("hyperparameter estimation is implemented for 1D domains only");
  }
}

}  // namespace

PiecewiseGrid::PiecewiseGrid(double length, std::size_t m) : length_(length), m_(m) {
  if (!(length > 0.0)) throw ContractViolation("grid length must be positive");
  if (m == 0) throw ContractViolation("piecewise grid needs at least one interval");
  edges_.push_back(0.0);
  if (m >= 2) {
    const double delta = length / static_cast<double>(m - 1);
    for (std::size_t k = 1; k < m; ++k) {
      breaks_.push_back((2.0 * static_cast<double>(k) - 1.0) * delta / 2.0);
    }
  }
  edges_.insert(edges_.end(), breaks_.begin(), breaks_.end());
  edges_.push_back(length);
}

std::vector<double> PiecewiseGrid::lengths() const {
  std::vector<double> out(m_);
  for (std::size_t k = 0; k < m_; ++k) out[k] = edges_[k + 1] - edges_[k];
  return out;
}

std::vector<double> PiecewiseGrid::midpoints() const {
  std::vector<double> out(m_);
  for (std::size_t k = 0; k < m_; ++k) out[k] = 0.5 * (edges_[k] + edges_[k + 1]);
  return out;
}

std::size_t PiecewiseGrid::interval_of(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return static_cast<std::size_t>(it - breaks_.begin());
}

KernelFamily parse_family(const std::string& name) {
  if (name == "se") return KernelFamily::SquaredExponential;
  if (name == "bm") return KernelFamily::BrownianMotion;
  throw ContractViolation("unknown kernel family '" + name + "' (expected se or bm)");
}

std::size_t n_hyperparameters(KernelFamily family) {
  return family == KernelFamily::SquaredExponential ? 2 : 1;
}

KernelSpec make_kernel(KernelFamily family, const std::vector<double>& params) {
  if (params.size() != n_hyperparameters(family)) {
    throw ContractViolation("wrong number of kernel hyperparameters");
  }
  if (family == KernelFamily::SquaredExponential) return SquaredExponential{params[0], params[1]};
  return BrownianMotion{params[0]};
}

double map_objective(const PiecewiseGrid& grid, const std::vector<double>& lam_star,
                     const KernelSpec& kernel, const Dataset& data, double c) {
  require_1d(data.domain);
  if (lam_star.size() != grid.size()) throw ContractViolation("one level per interval expected");
  if (!(c >= 0.0 && c <= 1.0)) throw ContractViolation("prior weight must lie in [0,1]");
  for (double v : lam_star) {
    if (!(v > 0.0)) return kNegInf;
  }
  const std::vector<double> len = grid.lengths();

  double loglik = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) total += lam_star[k] * len[k];
  loglik -= total;
  for (const auto& e : data.events) loglik += std::log(lam_star[grid.interval_of(e[0])]);
  const auto& edges = grid.edges();
  for (const auto& bin : data.bins) {
    double mass = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double lo = std::max(bin.box.lo[0], edges[k]);
      const double hi = std::min(bin.box.hi[0], edges[k + 1]);
      if (hi > lo) mass += lam_star[k] * (hi - lo);
    }
    if (bin.count > 0.0) loglik += bin.count * std::log(mass);
  }

  double logprior = 0.0;
  if (c > 0.0) {
    std::vector<Point> pts;
    for (double t : grid.midpoints()) pts.push_back(point1(t));
    Eigen::VectorXd x(static_cast<Eigen::Index>(grid.size() + 1));
    for (std::size_t k = 0; k < grid.size(); ++k) x(static_cast<Eigen::Index>(k)) = lam_star[k];
    x(static_cast<Eigen::Index>(grid.size())) = total;
    try {
      const auto cov = build_augmented_covariance(kernel, data.domain, pts,
                                                  {Region::of(data.domain.bounds())});
      logprior = gaussian_log_density(x, cov);
    } catch (const IllConditionedCovariance&) {
      return kNegInf;
    }
  }
  return (1.0 - c) * loglik + c * logprior;
}

MapFit fit_map(const Dataset& data, KernelFamily family, const MapConfig& config) {
  require_1d(data.domain);
  data.validate();
  if (!(config.c > 0.0 && config.c < 1.0)) throw ContractViolation("c must lie in (0,1)");
  if (config.m_min < 1 || config.m_max < config.m_min) {
    throw ContractViolation("m range must satisfy 1 <= m_min <= m_max");
  }
  const double length = data.domain.bounds().hi[0] - data.domain.bounds().lo[0];
  const double level_hi = 10.0 * std::max(data.total_count(), 1.0) / length;
  const std::size_t n_theta = n_hyperparameters(family);

  MapFit best;
  best.objective = kNegInf;
  for (std::size_t m = config.m_min; m <= config.m_max; ++m) {
    const PiecewiseGrid grid(length, m);
    auto bounds = theta_bounds(family, config);
    for (std::size_t k = 0; k < m; ++k) bounds.emplace_back(1e-6 * level_hi, level_hi);
    auto objective = [&](const std::vector<double>& x) {
      const std::vector<double> params = unlog(x, n_theta);
      const std::vector<double> levels(x.begin() + static_cast<std::ptrdiff_t>(n_theta), x.end());
      return map_objective(grid, levels, make_kernel(family, params), data, config.c);
    };
    DeConfig de = config.optimizer;
    de.seed = derive_seed(config.optimizer.seed, m);
    DeResult res;
    try {
      res = differential_evolution(objective, bounds, de);
    } catch (const EstimationFailure&) {
      best.objective_by_m.push_back(kNegInf);
      continue;
    }
    best.objective_by_m.push_back(res.value);
    if (res.value > best.objective) {
      best.objective = res.value;
      best.m = m;
      best.params = unlog(res.x, n_theta);
      best.lam_star.assign(res.x.begin() + static_cast<std::ptrdiff_t>(n_theta), res.x.end());
    }
  }
  if (best.m == 0) {
    throw EstimationFailure("weighted MAP objective was non-finite for every m in [" +
                            std::to_string(config.m_min) + ", " + std::to_string(config.m_max) +
                            "]");
  }
  best.kernel = make_kernel(family, best.params);
  return best;
}

double oracle_log_density(const std::vector<Point>& points, const std::vector<double>& values,
                          double integral, const KernelSpec& kernel, const Domain& domain) {
  if (points.size() != values.size()) throw ContractViolation("one value per point expected");
  Eigen::VectorXd x(static_cast<Eigen::Index>(points.size() + 1));
  for (std::size_t k = 0; k < values.size(); ++k) x(static_cast<Eigen::Index>(k)) = values[k];
  x(static_cast<Eigen::Index>(points.size())) = integral;
  try {
    const auto cov =
        build_augmented_covariance(kernel, domain, points, {Region::of(domain.bounds())});
    return gaussian_log_density(x, cov);
  } catch (const IllConditionedCovariance&) {
    return kNegInf;
  }
}

OracleFit fit_oracle_mle(const std::vector<Point>& points, const std::vector<double>& values,
                         double integral, const Domain& domain, KernelFamily family,
                         const MapConfig& config) {
  require_1d(domain);
  if (points.empty()) throw ContractViolation("oracle fit needs at least one point");
  const std::size_t n_theta = n_hyperparameters(family);
  auto objective = [&](const std::vector<double>& x) {
    return oracle_log_density(points, values, integral, make_kernel(family, unlog(x, n_theta)),
                              domain);
  };
  const DeResult res = differential_evolution(objective, theta_bounds(family, config),
                                              config.optimizer);
  OracleFit fit;
  fit.params = unlog(res.x, n_theta);
  fit.kernel = make_kernel(family, fit.params);
  fit.log_density = res.value;
  return fit;
}

OracleFit fit_oracle_mle(const IntensitySpec& truth, const Dataset& data, KernelFamily family,
                         const MapConfig& config) {
  const std::vector<double> values = eval_intensity(truth, data.domain, data.events);
  const double integral =
      intensity_integral(truth, data.domain.bounds(), data.domain.dim());
  return fit_oracle_mle(data.events, values, integral, data.domain, family, config);
}

}  // namespace rigp
