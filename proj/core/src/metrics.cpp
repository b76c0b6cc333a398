#include "rigp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "rigp/error.hpp"

namespace rigp {

namespace {

template <typename T>
std::vector<T> slice(const std::vector<T>& v, std::size_t begin, std::size_t count) {
  return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(begin),
                        v.begin() + static_cast<std::ptrdiff_t>(begin + count));
}

std::vector<double> medians(const std::vector<PointQuantiles>& q) {
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& p : q) out.push_back(p.q50);
  return out;
}

}  // namespace

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ContractViolation("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<PointQuantiles> column_quantiles(const Eigen::MatrixXd& draws) {
  std::vector<PointQuantiles> out(static_cast<std::size_t>(draws.cols()));
  std::vector<double> col(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    for (Eigen::Index i = 0; i < draws.rows(); ++i) col[static_cast<std::size_t>(i)] = draws(i, j);
    std::sort(col.begin(), col.end());
    out[static_cast<std::size_t>(j)] =
        PointQuantiles{quantile_sorted(col, 0.025), quantile_sorted(col, 0.25),
                       quantile_sorted(col, 0.5), quantile_sorted(col, 0.75),
                       quantile_sorted(col, 0.975)};
  }
  return out;
}

double sum_squared_error(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) throw ContractViolation("SSE inputs differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    acc += d * d;
  }
  return acc;
}

double coverage(const std::vector<PointQuantiles>& q, const std::vector<double>& truth) {
  if (q.size() != truth.size()) throw ContractViolation("coverage inputs differ in length");
  if (q.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (truth[i] >= q[i].q025 && truth[i] <= q[i].q975) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(q.size());
}

double mean_ci_width(const std::vector<PointQuantiles>& q) {
  if (q.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& p : q) acc += p.q975 - p.q025;
  return acc / static_cast<double>(q.size());
}

EvalReport summarize(const PosteriorSamples& samples,
                     const std::optional<std::vector<double>>& truth) {
  if (samples.n_draws() < 2) throw ContractViolation("summaries need at least two retained draws");
  EvalReport r;
  r.n_draws = samples.n_draws();
  r.n_grid = samples.layout.n_grid;
  r.n_obs = samples.layout.n_obs;
  r.quantiles = column_quantiles(samples.lam_draws);

  const auto grid_q = slice(r.quantiles, 0, r.n_grid);
  const auto obs_q = slice(r.quantiles, r.n_grid, r.n_obs);
  if (r.n_grid > 0) r.ci_width_grid = mean_ci_width(grid_q);
  if (r.n_obs > 0) r.ci_width_obs = mean_ci_width(obs_q);
  r.ci_width = r.n_grid > 0 ? *r.ci_width_grid : r.ci_width_obs.value_or(0.0);

  if (truth) {
    if (truth->size() != r.n_grid + r.n_obs) {
      throw ContractViolation("truth must have one value per grid point and event");
    }
    const auto t_grid = slice(*truth, 0, r.n_grid);
    const auto t_obs = slice(*truth, r.n_grid, r.n_obs);
    if (r.n_grid > 0) {
      r.sse_grid = sum_squared_error(medians(grid_q), t_grid);
      r.coverage_grid = coverage(grid_q, t_grid);
    }
    if (r.n_obs > 0) {
      r.sse_obs = sum_squared_error(medians(obs_q), t_obs);
      r.coverage_obs = coverage(obs_q, t_obs);
    }
  }
  if (!samples.theta_draws.empty()) {
    std::vector<double> th = samples.theta_draws;
    std::sort(th.begin(), th.end());
    r.theta_median = quantile_sorted(th, 0.5);
  }
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["n_draws"] = r.n_draws;
  j["n_grid"] = r.n_grid;
  j["n_obs"] = r.n_obs;
  auto opt = [&j](const char* key, const std::optional<double>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  opt("sse_grid", r.sse_grid);
  opt("sse_obs", r.sse_obs);
  opt("coverage_grid", r.coverage_grid);
  opt("coverage_obs", r.coverage_obs);
  opt("ci_width_grid", r.ci_width_grid);
  opt("ci_width_obs", r.ci_width_obs);
  opt("theta_median", r.theta_median);
  j["ci_width"] = r.ci_width;
  nlohmann::json q = nlohmann::json::array();
  for (const auto& p : r.quantiles) q.push_back({p.q025, p.q25, p.q50, p.q75, p.q975});
  j["quantiles"] = std::move(q);
  return j;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_quantile_csv(std::ostream& os, const std::vector<std::string>& labels,
                        const std::vector<PointQuantiles>& quantiles) {
  if (labels.size() != quantiles.size()) throw ContractViolation("one label per quantile row");
  os << "point,q025,q25,q50,q75,q975\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& q = quantiles[i];
    os << csv_field(labels[i]) << ',' << q.q025 << ',' << q.q25 << ',' << q.q50 << ',' << q.q75 << ','
       << q.q975 << '\n';
  }
}

}  // namespace rigp
