#pragma once

#include <string>
#include <vector>

#include "rigp/differential_evolution.hpp"
#include "rigp/kernels.hpp"
#include "rigp/model.hpp"
#include "rigp/simulate.hpp"

namespace rigp {

/// m intervals on [0, T]: half-width end intervals around the m-1 interior
/// grid points k * T/(m-1), so the breakpoints sit midway between them.
class PiecewiseGrid {
 public:
  PiecewiseGrid(double length, std::size_t m);

  std::size_t size() const noexcept { return m_; }
  double length() const noexcept { return length_; }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  /// Interval edges including 0 and T.
  const std::vector<double>& edges() const noexcept { return edges_; }
  std::vector<double> lengths() const;
  std::vector<double> midpoints() const;
  std::size_t interval_of(double t) const;

 private:
  double length_;
  std::size_t m_;
  std::vector<double> breaks_;
  std::vector<double> edges_;
};

enum class KernelFamily { SquaredExponential, BrownianMotion };

KernelFamily parse_family(const std::string& name);
std::size_t n_hyperparameters(KernelFamily family);
/// SE: (amplitude, inv_length_sq); BM: (precision).
KernelSpec make_kernel(KernelFamily family, const std::vector<double>& params);

struct MapConfig {
  double c = 0.2;
  std::size_t m_min = 1;
  std::size_t m_max = 10;
  double theta_min = 1e-4;
  double theta_max = 1e4;
  DeConfig optimizer{};
};

/// (1-c) * piecewise-constant Poisson log-likelihood
///   + c * log N((lam*, Lambda*); 0, V_theta),
/// with V_theta over the interval midpoints and the whole domain and
/// Lambda* = sum lam*_j |I_j|. The orthant normalizer is left out.
double map_objective(const PiecewiseGrid& grid, const std::vector<double>& lam_star,
                     const KernelSpec& kernel, const Dataset& data, double c);

struct MapFit {
  KernelSpec kernel;
  std::vector<double> params;
  std::size_t m = 0;
  std::vector<double> lam_star;
  double objective = 0.0;
  /// Best objective found for each m in [m_min, m_max].
  std::vector<double> objective_by_m;
};

MapFit fit_map(const Dataset& data, KernelFamily family, const MapConfig& config);

struct OracleFit {
  KernelSpec kernel;
  std::vector<double> params;
  double log_density = 0.0;
};

/// Gaussian log density of true values at `points` and the true integral over
/// the domain under V_theta.
double oracle_log_density(const std::vector<Point>& points, const std::vector<double>& values,
                          double integral, const KernelSpec& kernel, const Domain& domain);

/// Maximizes oracle_log_density over theta (log10 scale search).
OracleFit fit_oracle_mle(const std::vector<Point>& points, const std::vector<double>& values,
                         double integral, const Domain& domain, KernelFamily family,
                         const MapConfig& config);
/// Uses the ground truth at the observed events and its exact integral.
OracleFit fit_oracle_mle(const IntensitySpec& truth, const Dataset& data, KernelFamily family,
                         const MapConfig& config);

}  // namespace rigp
