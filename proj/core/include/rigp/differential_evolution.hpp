#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace rigp {

struct DeConfig {
  /// 0 selects 10 x dimension.
  std::size_t population = 0;
  std::size_t generations = 500;
  double crossover = 0.9;
  double f_min = 0.5;
  double f_max = 1.0;
  /// Stop once the spread of population values drops below this.
  double tolerance = 1e-12;
  std::uint64_t seed = 1;
};

struct DeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t generations = 0;
};

/// DE/rand/1/bin maximizer inside a box. Non-finite objective values are
/// treated as -inf; throws EstimationFailure when nothing finite is found.
DeResult differential_evolution(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<std::pair<double, double>>& bounds,
                                const DeConfig& config);

}  // namespace rigp
