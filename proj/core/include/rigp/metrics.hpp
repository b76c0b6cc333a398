#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rigp/samplers.hpp"

namespace rigp {

struct PointQuantiles {
  double q025 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q975 = 0.0;
};

/// Linear interpolation between order statistics (type 7); `sorted` must be
/// ascending and nonempty.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Per-column quantiles of a draws-by-slots matrix.
std::vector<PointQuantiles> column_quantiles(const Eigen::MatrixXd& draws);

double sum_squared_error(const std::vector<double>& estimate, const std::vector<double>& truth);
/// Fraction of points with truth inside [q025, q975].
double coverage(const std::vector<PointQuantiles>& q, const std::vector<double>& truth);
double mean_ci_width(const std::vector<PointQuantiles>& q);

struct EvalReport {
  std::size_t n_draws = 0;
  std::size_t n_grid = 0;
  std::size_t n_obs = 0;
  /// One entry per state slot in layout order [grid | observed | integrals].
  std::vector<PointQuantiles> quantiles;
  std::optional<double> sse_grid, sse_obs;
  std::optional<double> coverage_grid, coverage_obs;
  std::optional<double> ci_width_grid, ci_width_obs;
  /// Mean 95% width over grid slots (observed slots when there is no grid).
  double ci_width = 0.0;
  std::optional<double> theta_median;
};

/// `truth` holds the true intensity at the value slots (grid then observed).
EvalReport summarize(const PosteriorSamples& samples,
                     const std::optional<std::vector<double>>& truth = std::nullopt);

nlohmann::json to_json(const EvalReport& report);

/// CSV with header point,q025,q25,q50,q75,q975 and one row per label.
void write_quantile_csv(std::ostream& os, const std::vector<std::string>& labels,
                        const std::vector<PointQuantiles>& quantiles);

}  // namespace rigp
