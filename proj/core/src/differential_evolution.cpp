#include "rigp/differential_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rigp/error.hpp"
#include "rigp/rng.hpp"

namespace rigp {

DeResult differential_evolution(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<std::pair<double, double>>& bounds,
                                const DeConfig& config) {
  const std::size_t dim = bounds.size();
  if (dim == 0) throw ContractViolation("differential evolution needs at least one variable");
  for (const auto& [lo, hi] : bounds) {
    if (!(hi >= lo)) throw ContractViolation("differential evolution bounds must satisfy lo <= hi");
  }
  const std::size_t np = std::max<std::size_t>(config.population ? config.population : 10 * dim, 4);
  Rng rng = make_rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, np - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);

  DeResult result;
  auto evaluate = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
  std::vector<double> value(np);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      pop[i][d] = bounds[d].first + (bounds[d].second - bounds[d].first) * uniform01(rng);
    }
    value[i] = evaluate(pop[i]);
  }

  std::vector<double> trial(dim);
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      const double f = config.f_min + (config.f_max - config.f_min) * uniform01(rng);
      const std::size_t forced = pick_dim(rng);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || uniform01(rng) < config.crossover) {
          double v = pop[a][d] + f * (pop[b][d] - pop[c][d]);
          const auto [lo, hi] = bounds[d];
          // bounce back between the base vector and the violated bound
          if (v < lo) v = lo + uniform01(rng) * (pop[a][d] - lo);
          if (v > hi) v = hi - uniform01(rng) * (hi - pop[a][d]);
          trial[d] = v;
        } else {
          trial[d] = pop[i][d];
        }
      }
      const double tv = evaluate(trial);
      if (tv >= value[i]) {
        pop[i] = trial;
        value[i] = tv;
      }
    }
    result.generations = gen + 1;
    const auto [mn, mx] = std::minmax_element(value.begin(), value.end());
    if (std::isfinite(*mn) && *mx - *mn <= config.tolerance * (1.0 + std::abs(*mx))) break;
  }

  const auto best = static_cast<std::size_t>(
      std::max_element(value.begin(), value.end()) - value.begin());
  if (!std::isfinite(value[best])) {
    throw EstimationFailure("objective was non-finite at every evaluated point (" +
                            std::to_string(result.evaluations) + " evaluations)");
  }
  result.x = pop[best];
  result.value = value[best];
  return result;
}

}  // namespace rigp
