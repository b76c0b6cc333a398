#include "rigp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rigp/error.hpp"

namespace rigp {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// Every supported kernel is scale * prod_a g_a(x_a, y_a), where g_a is either
// exp(-r_a (x-y)^2 / 2) or min(x, y).
struct Factors {
  double scale = 1.0;
  bool brownian = false;
  std::array<double, kMaxDim> r{1.0, 1.0};
};

Factors factors_of(const KernelSpec& spec) {
  return std::visit(
      [](const auto& k) -> Factors {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SquaredExponential>) {
          return Factors{k.amplitude, false, {k.inv_length_sq, k.inv_length_sq}};
        } else if constexpr (std::is_same_v<K, ProductSE>) {
          return Factors{k.amplitude[0] * k.amplitude[1], false, k.inv_length_sq};
        } else {
          return Factors{1.0 / k.precision, true, {0.0, 0.0}};
        }
      },
      spec);
}

// erf(hi) - erf(lo) without cancellation in the tails.
double erf_diff(double lo, double hi) {
  if (lo >= 0.0) return std::erfc(lo) - std::erfc(hi);
  if (hi <= 0.0) return std::erfc(-hi) - std::erfc(-lo);
  return std::erf(hi) - std::erf(lo);
}

double se_eval(double r, double d) { return std::exp(-0.5 * r * d * d); }

double se_single(double r, double s, double a, double b) {
  const double kappa = std::sqrt(0.5 * r);
  return std::sqrt(M_PI / (2.0 * r)) * erf_diff(kappa * (a - s), kappa * (b - s));
}

double se_double(double r, double a, double b, double c, double d) {
  const double kappa = std::sqrt(0.5 * r);
  auto h = [kappa](double v) {
    v = std::abs(v);
    return std::exp(-kappa * kappa * v * v) / (kappa * kSqrtPi) - v * std::erfc(kappa * v);
  };
  const double overlap = 2.0 * std::max(0.0, std::min(b, d) - std::max(a, c));
  const double tails = h(b - c) - h(a - c) - h(b - d) + h(a - d);
  return std::sqrt(M_PI / (2.0 * r)) * (overlap + tails);
}

// Antiderivative of min(s, u) in u from 0 to t (s, t >= 0).
double min_h1(double s, double t) { return t <= s ? 0.5 * t * t : s * t - 0.5 * s * s; }

// Integral of min(s, t) over [0,x] x [0,c].
double min_k(double x, double c) {
  if (x > c) std::swap(x, c);
  return c * x * x / 2.0 - x * x * x / 6.0;
}

// min(s,t) = L + min(s-L, t-L) for s,t >= L; shifting to the smallest
// coordinate keeps large offsets from cancelling.
double bm_single(double s, double a, double b) {
  const double base = std::min(a, s);
  return base * (b - a) + (min_h1(s - base, b - base) - min_h1(s - base, a - base));
}

double bm_double(double a, double b, double c, double d) {
  const double base = std::min(a, c);
  a -= base;
  b -= base;
  c -= base;
  d -= base;
  const double core = min_k(b, d) - min_k(a, d) - min_k(b, c) + min_k(a, c);
  return base * (b - a) * (d - c) + core;
}

void require_positive(const Point& p, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (!(p[a] > 0.0)) {
      std::ostringstream os;
      os << "Brownian kernels need strictly positive coordinates, got " << p[a]
         << " on axis " << a << " (use a domain offset)";
      throw DomainError(os.str());
    }
  }
}

void require_inside(const Domain& domain, const Box& region) {
  if (!domain.contains(region)) throw DomainError("integration region lies outside the domain");
  for (int a = 0; a < domain.dim(); ++a) {
    if (region.hi[a] < region.lo[a]) throw ContractViolation("integration region has hi < lo");
  }
}

}  // namespace

std::string kernel_name(const KernelSpec& spec) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SquaredExponential>) return "se";
        if constexpr (std::is_same_v<K, BrownianMotion>) return "bm";
        if constexpr (std::is_same_v<K, BrownianSheet>) return "bs";
        return "product_se";
      },
      spec);
}

bool is_brownian(const KernelSpec& spec) {
  return std::holds_alternative<BrownianMotion>(spec) ||
         std::holds_alternative<BrownianSheet>(spec);
}

void validate(const KernelSpec& spec, const Domain& domain) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ContractViolation(std::string("kernel hyperparameter ") + what +
                              " must be positive and finite");
    }
  };
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SquaredExponential>) {
          positive(k.amplitude, "amplitude");
          positive(k.inv_length_sq, "inv_length_sq");
        } else if constexpr (std::is_same_v<K, ProductSE>) {
          for (int a = 0; a < domain.dim(); ++a) {
            positive(k.amplitude[a], "amplitude");
            positive(k.inv_length_sq[a], "inv_length_sq");
          }
        } else {
          positive(k.precision, "precision");
        }
        if constexpr (std::is_same_v<K, BrownianMotion>) {
          if (domain.dim() != 1) throw ContractViolation("Brownian motion needs a 1D domain");
        }
        if constexpr (std::is_same_v<K, BrownianSheet>) {
          if (domain.dim() != 2) throw ContractViolation("Brownian sheet needs a 2D domain");
        }
      },
      spec);
  if (is_brownian(spec)) {
    Point lo = domain.to_kernel(domain.bounds().lo);
    for (int a = 0; a < domain.dim(); ++a) {
      if (lo[a] < 0.0) throw DomainError("Brownian kernels need a domain anchored at >= 0");
    }
  }
}

KernelSpec with_precision(const KernelSpec& spec, double precision) {
  if (std::holds_alternative<BrownianMotion>(spec)) return BrownianMotion{precision};
  if (std::holds_alternative<BrownianSheet>(spec)) return BrownianSheet{precision};
  return spec;
}

double kernel_eval(const KernelSpec& spec, const Domain& domain, const Point& x, const Point& y) {
  const Factors f = factors_of(spec);
  const Point kx = domain.to_kernel(x);
  const Point ky = domain.to_kernel(y);
  double v = f.scale;
  if (f.brownian) {
    require_positive(kx, domain.dim());
    require_positive(ky, domain.dim());
    for (int a = 0; a < domain.dim(); ++a) v *= std::min(kx[a], ky[a]);
  } else {
    for (int a = 0; a < domain.dim(); ++a) v *= se_eval(f.r[a], kx[a] - ky[a]);
  }
  return v;
}

double kernel_single_integral(const KernelSpec& spec, const Domain& domain, const Point& s,
                              const Box& region) {
  require_inside(domain, region);
  const Factors f = factors_of(spec);
  const Point ks = domain.to_kernel(s);
  const Box kb = domain.to_kernel(region);
  if (f.brownian) require_positive(ks, domain.dim());
  double v = f.scale;
  for (int a = 0; a < domain.dim(); ++a) {
    v *= f.brownian ? bm_single(ks[a], kb.lo[a], kb.hi[a])
                    : se_single(f.r[a], ks[a], kb.lo[a], kb.hi[a]);
  }
  return v;
}

double kernel_single_integral(const KernelSpec& spec, const Domain& domain, const Point& s,
                              const Region& region) {
  double v = 0.0;
  for (const auto& t : region.terms) v += t.weight * kernel_single_integral(spec, domain, s, t.box);
  return v;
}

double kernel_double_integral(const KernelSpec& spec, const Domain& domain, const Box& region_a,
                              const Box& region_b) {
  require_inside(domain, region_a);
  require_inside(domain, region_b);
  const Factors f = factors_of(spec);
  const Box ka = domain.to_kernel(region_a);
  const Box kb = domain.to_kernel(region_b);
  double v = f.scale;
  for (int a = 0; a < domain.dim(); ++a) {
    v *= f.brownian ? bm_double(ka.lo[a], ka.hi[a], kb.lo[a], kb.hi[a])
                    : se_double(f.r[a], ka.lo[a], ka.hi[a], kb.lo[a], kb.hi[a]);
  }
  return v;
}

double kernel_double_integral(const KernelSpec& spec, const Domain& domain,
                              const Region& region_a, const Region& region_b) {
  double v = 0.0;
  for (const auto& ta : region_a.terms) {
    for (const auto& tb : region_b.terms) {
      v += ta.weight * tb.weight * kernel_double_integral(spec, domain, ta.box, tb.box);
    }
  }
  return v;
}

AugmentedCovariance::AugmentedCovariance(Eigen::MatrixXd v, std::size_t n_points)
    : v_(std::move(v)), n_points_(n_points) {
  if (v_.rows() != v_.cols()) throw ContractViolation("covariance must be square");
  if (n_points_ > static_cast<std::size_t>(v_.rows())) {
    throw ContractViolation("more points than covariance rows");
  }
  jitter_ = jittered_cholesky(v_, l_);
}

Eigen::VectorXd AugmentedCovariance::solve(const Eigen::VectorXd& x) const {
  if (x.size() != v_.rows()) throw ContractViolation("dimension mismatch in covariance solve");
  Eigen::VectorXd y = l_.triangularView<Eigen::Lower>().solve(x);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(y);
  return y;
}

double AugmentedCovariance::quadratic_form(const Eigen::VectorXd& x) const {
  if (x.size() != v_.rows()) throw ContractViolation("dimension mismatch in quadratic form");
  return l_.triangularView<Eigen::Lower>().solve(x).squaredNorm();
}

double AugmentedCovariance::log_det() const {
  return 2.0 * l_.diagonal().array().log().sum();
}

double jittered_cholesky(const Eigen::MatrixXd& v, Eigen::MatrixXd& lower) {
  const Eigen::Index n = v.rows();
  const double mean_diag = n > 0 ? std::max(v.diagonal().mean(), 1e-300) : 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() == Eigen::Success) {
    lower = llt.matrixL();
    return 0.0;
  }
  for (double rel = 1e-12; rel <= 1.0000001e-6; rel *= 10.0) {
    const double jitter = rel * mean_diag;
    Eigen::MatrixXd vj = v;
    vj.diagonal().array() += jitter;
    llt.compute(vj);
    if (llt.info() == Eigen::Success) {
      lower = llt.matrixL();
      return jitter;
    }
  }
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v, Eigen::EigenvaluesOnly).eigenvalues()(0);
  std::ostringstream os;
  os << "Cholesky failed after jitter 1e-6 (relative); smallest eigenvalue " << min_eig;
  throw IllConditionedCovariance(os.str(), min_eig);
}

void require_distinct(const Domain& domain, const std::vector<Point>& points) {
  const double tol = 1e-9 * domain.extent();
  const int dim = domain.dim();
  auto dist = [dim](const Point& p, const Point& q) {
    double m = 0.0;
    for (int a = 0; a < dim; ++a) m = std::max(m, std::abs(p[a] - q[a]));
    return m;
  };
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t l = k + 1; l < order.size(); ++l) {
      const Point& p = points[order[k]];
      const Point& q = points[order[l]];
      if (q[0] - p[0] > tol) break;
      if (dist(p, q) <= tol) {
        std::ostringstream os;
        os << "points " << order[k] << " and " << order[l] << " coincide (separation <= " << tol
           << ")";
        throw ContractViolation(os.str());
      }
    }
  }
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Domain& domain,
                              const std::vector<Point>& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel_eval(spec, domain, points[i], points[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::MatrixXd augmented_matrix(const KernelSpec& spec, const Domain& domain,
                                 const std::vector<Point>& points,
                                 const std::vector<Region>& regions) {
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto r = static_cast<Eigen::Index>(regions.size());
  Eigen::MatrixXd v(m + r, m + r);
  v.topLeftCorner(m, m) = kernel_matrix(spec, domain, points);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      v(i, m + j) = kernel_single_integral(spec, domain, points[i], regions[j]);
      v(m + j, i) = v(i, m + j);
    }
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      v(m + i, m + j) = kernel_double_integral(spec, domain, regions[i], regions[j]);
      v(m + j, m + i) = v(m + i, m + j);
    }
  }
  return v;
}

AugmentedCovariance build_augmented_covariance(const KernelSpec& spec, const Domain& domain,
                                               const std::vector<Point>& points,
                                               const std::vector<Region>& regions) {
  validate(spec, domain);
  if (points.empty()) throw ContractViolation("at least one point is required");
  require_distinct(domain, points);
  return AugmentedCovariance(augmented_matrix(spec, domain, points, regions), points.size());
}

}  // namespace rigp
