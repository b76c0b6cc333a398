#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace rigp::cli {

struct RunConfig {
  std::string mode = "fit";
  std::string kernel = "bm";
  /// se: amplitude,inv_length_sq; product_se: a_x,r_x,a_y,r_y. Empty means
  /// estimate (1D SE only).
  std::vector<double> theta;
  std::string hyper = "map";
  double epsilon = 1e-8;
  std::uint64_t iters = 50000;
  std::uint64_t burnin = 10000;
  std::uint64_t thin = 1;
  std::string sampler = "ess";
  std::uint64_t seed = 1;
  std::size_t grid = 100;
  std::string out = "out";
  std::string events;
  std::string bins;
  std::string points;
  std::string domain;
  std::vector<double> offset;
  std::string intensity;
  std::string bin_tail;
  std::size_t replicates = 1;
  std::size_t jobs = 1;
  double map_c = 0.2;
  std::size_t m_max = 10;
  double alpha = 0.1;
  double beta = 0.1;
};

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected so typos do not pass silently.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path);

}  // namespace rigp::cli
