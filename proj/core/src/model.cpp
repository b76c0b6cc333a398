#include "rigp/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rigp/error.hpp"

namespace rigp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_size(const State& state, const StateLayout& layout) {
  if (static_cast<std::size_t>(state.size()) != layout.size()) {
    std::ostringstream os;
    os << "state has " << state.size() << " entries, layout expects " << layout.size();
    throw ContractViolation(os.str());
  }
}

void require_positive(const State& state) {
  if (!(state.minCoeff() > 0.0)) {
    throw DomainError("log-posterior gradient is defined only for strictly positive states");
  }
}

}  // namespace

bool in_bin(const Box& bin, const Point& p, const Domain& domain) {
  const Box& s = domain.bounds();
  for (int a = 0; a < domain.dim(); ++a) {
    if (p[a] < bin.lo[a]) return false;
    if (p[a] >= bin.hi[a] && !(p[a] == bin.hi[a] && bin.hi[a] == s.hi[a])) return false;
  }
  return true;
}

double Dataset::total_count() const {
  double c = static_cast<double>(events.size());
  for (const auto& b : bins) c += b.count;
  return c;
}

void Dataset::validate() const {
  const int dim = domain.dim();
  if (events.empty() && bins.empty()) {
    throw ContractViolation("dataset has neither events nor bins");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!domain.contains(events[i])) {
      std::ostringstream os;
      os << "event " << i << " lies outside " << domain.describe();
      throw DomainError(os.str());
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!domain.contains(grid[i])) throw DomainError("prediction point outside the domain");
  }
  for (std::size_t j = 0; j < bins.size(); ++j) {
    const Bin& b = bins[j];
    if (!(b.count >= 0.0)) throw ContractViolation("bin counts must be nonnegative");
    if (!(b.box.measure(dim) > 0.0)) throw ContractViolation("bins must have positive measure");
    if (!domain.contains(b.box)) {
      std::ostringstream os;
      os << "bin " << j << " lies outside " << domain.describe();
      throw DomainError(os.str());
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (bins[k].box.overlaps(b.box, dim)) {
        std::ostringstream os;
        os << "bins " << k << " and " << j << " overlap";
        throw ContractViolation(os.str());
      }
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (in_bin(b.box, events[i], domain)) {
        std::ostringstream os;
        os << "event " << i << " falls inside bin " << j << "; binned regions carry counts only";
        throw ContractViolation(os.str());
      }
    }
  }
}

StateLayout StateLayout::from(const Dataset& data) {
  data.validate();
  const int dim = data.domain.dim();
  StateLayout layout;
  layout.n_grid = data.grid.size();
  layout.n_obs = data.events.size();

  Region rest = Region::of(data.domain.bounds());
  for (const auto& b : data.bins) rest.terms.push_back({b.box, -1.0});
  const double rest_measure = rest.measure(dim);
  const bool keep_rest = rest_measure > 1e-12 * data.domain.measure() || !data.events.empty();
  layout.residual_slot = keep_rest;
  if (keep_rest) {
    layout.regions.push_back(std::move(rest));
    layout.counts.push_back(0.0);
    layout.measures.push_back(rest_measure);
  }
  for (const auto& b : data.bins) {
    layout.regions.push_back(Region::of(b.box));
    layout.counts.push_back(b.count);
    layout.measures.push_back(b.box.measure(dim));
  }
  return layout;
}

std::vector<Point> StateLayout::points(const Dataset& data) {
  std::vector<Point> pts = data.grid;
  pts.insert(pts.end(), data.events.begin(), data.events.end());
  return pts;
}

double StateLayout::total_integral(const Eigen::VectorXd& state) const {
  return state.tail(static_cast<Eigen::Index>(n_integrals())).sum();
}

State initial_state(const Dataset& data, const StateLayout& layout) {
  const double rate = std::max(data.total_count(), 1.0) / data.domain.measure();
  State s(static_cast<Eigen::Index>(layout.size()));
  s.head(static_cast<Eigen::Index>(layout.n_values())).setConstant(rate);
  for (std::size_t j = 0; j < layout.n_integrals(); ++j) {
    s(static_cast<Eigen::Index>(layout.integral_begin() + j)) = rate * layout.measures[j];
  }
  return s;
}

double log_likelihood(const State& state, const StateLayout& layout) {
  require_size(state, layout);
  if (!(state.minCoeff() > 0.0)) return kNegInf;
  double ll = 0.0;
  for (std::size_t i = 0; i < layout.n_obs; ++i) {
    ll += std::log(state(static_cast<Eigen::Index>(layout.obs_begin() + i)));
  }
  for (std::size_t j = 0; j < layout.n_integrals(); ++j) {
    const double lam = state(static_cast<Eigen::Index>(layout.integral_begin() + j));
    ll -= lam;
    if (layout.counts[j] > 0.0) ll += layout.counts[j] * std::log(lam);
  }
  return ll;
}

Eigen::VectorXd log_likelihood_gradient(const State& state, const StateLayout& layout) {
  require_size(state, layout);
  require_positive(state);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(state.size());
  for (std::size_t i = 0; i < layout.n_obs; ++i) {
    const auto k = static_cast<Eigen::Index>(layout.obs_begin() + i);
    g(k) = 1.0 / state(k);
  }
  for (std::size_t j = 0; j < layout.n_integrals(); ++j) {
    const auto k = static_cast<Eigen::Index>(layout.integral_begin() + j);
    g(k) = layout.counts[j] / state(k) - 1.0;
  }
  return g;
}

double log_prior(const State& state, const AugmentedCovariance& cov) {
  if (state.size() != cov.size()) throw ContractViolation("state does not match covariance");
  const auto n = static_cast<double>(state.size());
  return -0.5 * cov.quadratic_form(state) - 0.5 * cov.log_det() - 0.5 * n * kLog2Pi;
}

double log_prior(const State& state, const BmPrior& prior) {
  if (prior.bundle == nullptr) throw ContractViolation("Brownian prior without a bundle");
  if (state.size() != prior.bundle->size()) {
    throw ContractViolation("state does not match precision bundle");
  }
  const auto n = static_cast<double>(state.size());
  return -0.5 * prior.theta * prior.bundle->quadratic_form(state) +
         0.5 * (prior.bundle->log_det_precision() + n * std::log(prior.theta)) -
         0.5 * n * kLog2Pi;
}

std::pair<double, Eigen::VectorXd> log_posterior_and_gradient(const State& state,
                                                              const StateLayout& layout,
                                                              const AugmentedCovariance& cov) {
  Eigen::VectorXd g = log_likelihood_gradient(state, layout);
  g -= cov.solve(state);
  return {log_prior(state, cov) + log_likelihood(state, layout), std::move(g)};
}

std::pair<double, Eigen::VectorXd> log_posterior_and_gradient(const State& state,
                                                              const StateLayout& layout,
                                                              const BmPrior& prior) {
  Eigen::VectorXd g = log_likelihood_gradient(state, layout);
  g -= prior.theta * prior.bundle->precision_times(state);
  return {log_prior(state, prior) + log_likelihood(state, layout), std::move(g)};
}

}  // namespace rigp
