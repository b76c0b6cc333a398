#include "rigp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rigp/error.hpp"

namespace rigp {

namespace {

using Kind = IntensitySpec::Kind;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractViolation("bad number '" + item + "' in intensity specification");
    }
  }
  return out;
}

void check_knots(const std::vector<double>& knots) {
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1])) throw ContractViolation("intensity knots must increase");
  }
}

double table_value(const IntensitySpec& s, double x) {
  const auto& t = s.knots;
  if (x <= t.front()) return s.values.front();
  if (x >= t.back()) return s.values.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  const double w = (x - t[k]) / (t[k + 1] - t[k]);
  return (1.0 - w) * s.values[k] + w * s.values[k + 1];
}

// Integral over [a, b] of the 1D kinds (unscaled).
double integral_1d(const IntensitySpec& s, double a, double b) {
  switch (s.kind) {
    case Kind::Lambda1: {
      const double expo = 30.0 * (std::exp(-a / 15.0) - std::exp(-b / 15.0));
      const double bump =
          5.0 * std::sqrt(std::numbers::pi) * (std::erf((b - 25.0) / 10.0) - std::erf((a - 25.0) / 10.0));
      return expo + bump;
    }
    case Kind::Lambda2:
      return 10.0 * (b - a);
    case Kind::Constant:
      return s.rate * (b - a);
    case Kind::Table: {
      // piecewise linear: integrate exactly between breakpoints
      std::vector<double> xs{a};
      for (double t : s.knots) {
        if (t > a && t < b) xs.push_back(t);
      }
      xs.push_back(b);
      double acc = 0.0;
      for (std::size_t k = 1; k < xs.size(); ++k) {
        acc += 0.5 * (table_value(s, xs[k - 1]) + table_value(s, xs[k])) * (xs[k] - xs[k - 1]);
      }
      return acc;
    }
    case Kind::PiecewiseConstant: {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double lo = std::max(a, s.knots[k]);
        const double hi = std::min(b, s.knots[k + 1]);
        if (hi > lo) acc += s.values[k] * (hi - lo);
      }
      return acc;
    }
    default:
      throw ContractViolation("not a one-dimensional intensity kind");
  }
}

}  // namespace

IntensitySpec IntensitySpec::lambda1(double scale) {
  IntensitySpec s;
  s.kind = Kind::Lambda1;
  s.scale = scale;
  return s;
}

IntensitySpec IntensitySpec::lambda2(double scale) {
  IntensitySpec s;
  s.kind = Kind::Lambda2;
  s.scale = scale;
  return s;
}

IntensitySpec IntensitySpec::constant(double rate) {
  if (!(rate >= 0.0)) throw ContractViolation("constant intensity must be nonnegative");
  IntensitySpec s;
  s.kind = Kind::Constant;
  s.rate = rate;
  return s;
}

IntensitySpec IntensitySpec::table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw ContractViolation("table intensity needs matching knots and values (at least 2)");
  }
  check_knots(knots);
  if (*std::min_element(values.begin(), values.end()) < 0.0) {
    throw ContractViolation("intensity values must be nonnegative");
  }
  IntensitySpec s;
  s.kind = Kind::Table;
  s.knots = std::move(knots);
  s.values = std::move(values);
  return s;
}

IntensitySpec IntensitySpec::piecewise(std::vector<double> edges, std::vector<double> levels) {
  if (levels.empty() || edges.size() != levels.size() + 1) {
    throw ContractViolation("piecewise intensity needs one more edge than levels");
  }
  check_knots(edges);
  if (*std::min_element(levels.begin(), levels.end()) < 0.0) {
    throw ContractViolation("intensity values must be nonnegative");
  }
  IntensitySpec s;
  s.kind = Kind::PiecewiseConstant;
  s.knots = std::move(edges);
  s.values = std::move(levels);
  return s;
}

IntensitySpec IntensitySpec::product(IntensitySpec x, IntensitySpec y) {
  IntensitySpec s;
  s.kind = Kind::Product2D;
  s.parts = {std::move(x), std::move(y)};
  return s;
}

IntensitySpec IntensitySpec::sum(std::vector<IntensitySpec> parts) {
  if (parts.empty()) throw ContractViolation("sum intensity needs at least one part");
  IntensitySpec s;
  s.kind = Kind::Sum;
  s.parts = std::move(parts);
  return s;
}

IntensitySpec IntensitySpec::parse(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (const auto star = body.rfind('*'); star != std::string::npos) {
    scale = parse_list(body.substr(star + 1)).at(0);
    body = body.substr(0, star);
  }
  const auto colon = body.find(':');
  const std::string name = body.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : body.substr(colon + 1);
  IntensitySpec s;
  if (name == "lambda1") {
    s = lambda1(args.empty() ? 1.0 : parse_list(args).at(0));
  } else if (name == "lambda2") {
    s = lambda2(args.empty() ? 1.0 : parse_list(args).at(0));
  } else if (name == "constant") {
    if (args.empty()) throw ContractViolation("constant intensity needs a rate, e.g. constant:10");
    s = constant(parse_list(args).at(0));
  } else if (name == "table" || name == "piecewise") {
    const auto slash = args.find('/');
    if (slash == std::string::npos) {
      throw ContractViolation(name + " intensity needs knots/values, e.g. " + name + ":0,1,2/3,4,5");
    }
    auto k = parse_list(args.substr(0, slash));
    auto v = parse_list(args.substr(slash + 1));
    s = name == "table" ? table(std::move(k), std::move(v)) : piecewise(std::move(k), std::move(v));
  } else {
    throw ContractViolation("unknown intensity '" + name + "'");
  }
  s.scale *= scale;
  return s;
}

std::string IntensitySpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Lambda1: os << "lambda1"; break;
    case Kind::Lambda2: os << "lambda2"; break;
    case Kind::Constant: os << "constant:" << rate; break;
    case Kind::Table: os << "table"; break;
    case Kind::PiecewiseConstant: os << "piecewise"; break;
    case Kind::Product2D: os << "product(" << parts[0].describe() << "," << parts[1].describe() << ")"; break;
    case Kind::Sum: {
      os << "sum(";
      for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? "," : "") << parts[k].describe();
      os << ")";
      break;
    }
  }
  if (scale != 1.0) os << "*" << scale;
  return os.str();
}

double eval_intensity(const IntensitySpec& s, const Point& p) {
  const double x = p[0];
  double v = 0.0;
  switch (s.kind) {
    case Kind::Lambda1: {
      const double z = (x - 25.0) / 10.0;
      v = 2.0 * std::exp(-x / 15.0) + std::exp(-z * z);
      break;
    }
    case Kind::Lambda2: v = 10.0; break;
    case Kind::Constant: v = s.rate; break;
    case Kind::Table: v = table_value(s, x); break;
    case Kind::PiecewiseConstant: {
      const auto& e = s.knots;
      if (x < e.front() || x > e.back()) {
        v = 0.0;
      } else {
        auto k = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x) - e.begin());
        v = s.values[std::min(k, s.values.size()) - 1];
      }
      break;
    }
    case Kind::Product2D:
      v = eval_intensity(s.parts[0], point1(p[0])) * eval_intensity(s.parts[1], point1(p[1]));
      break;
    case Kind::Sum:
      for (const auto& part : s.parts) v += eval_intensity(part, p);
      break;
  }
  return s.scale * v;
}

std::vector<double> eval_intensity(const IntensitySpec& spec, const Domain& domain,
                                   const std::vector<Point>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!domain.contains(p)) throw DomainError("intensity evaluated outside " + domain.describe());
    out.push_back(eval_intensity(spec, p));
  }
  return out;
}

double intensity_upper_bound(const IntensitySpec& s, const Domain& domain) {
  const Box& b = domain.bounds();
  switch (s.kind) {
    case Kind::Lambda1: {
      double mx = 0.0;
      const double lo = b.lo[0], hi = b.hi[0];
      const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / 1e-3));
      for (std::size_t k = 0; k <= steps; ++k) {
        const double x = std::min(hi, lo + 1e-3 * static_cast<double>(k));
        mx = std::max(mx, eval_intensity(s, point1(x)));
      }
      return 1.01 * mx;
    }
    case Kind::Lambda2:
    case Kind::Constant:
      return eval_intensity(s, b.lo);
    case Kind::Table:
    case Kind::PiecewiseConstant:
      return s.scale * *std::max_element(s.values.begin(), s.values.end());
    case Kind::Product2D: {
      // each factor is a 1D function of its first argument, so scan it over
      // the matching side of the rectangle
      auto axis_bound = [&](const IntensitySpec& part, int axis) {
        return intensity_upper_bound(part, Domain::rectangle({b.lo[axis], b.hi[axis]}, {0.0, 1.0}));
      };
      return s.scale * axis_bound(s.parts[0], 0) * axis_bound(s.parts[1], 1);
    }
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& part : s.parts) acc += intensity_upper_bound(part, domain);
      return s.scale * acc;
    }
  }
  return 0.0;
}

double intensity_integral(const IntensitySpec& s, const Box& region, int dim) {
  switch (s.kind) {
    case Kind::Product2D:
      return s.scale * integral_1d(s.parts[0], region.lo[0], region.hi[0]) *
             integral_1d(s.parts[1], region.lo[1], region.hi[1]);
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& part : s.parts) acc += intensity_integral(part, region, dim);
      return s.scale * acc;
    }
    default: {
      const double base = integral_1d(s, region.lo[0], region.hi[0]);
      const double other = dim == 2 ? region.hi[1] - region.lo[1] : 1.0;
      return s.scale * base * other;
    }
  }
}

std::vector<Point> simulate_thinning(const IntensitySpec& spec, const Domain& domain, Rng& rng) {
  const double bound = intensity_upper_bound(spec, domain);
  std::vector<Point> events;
  if (!(bound > 0.0)) return events;
  const Box& b = domain.bounds();
  const auto n = std::poisson_distribution<long long>(bound * domain.measure())(rng);
  for (long long k = 0; k < n; ++k) {
    Point p{};
    for (int a = 0; a < domain.dim(); ++a) p[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * uniform01(rng);
    if (uniform01(rng) * bound < eval_intensity(spec, p)) events.push_back(p);
  }
  if (domain.dim() == 1) {
    std::sort(events.begin(), events.end(),
              [](const Point& x, const Point& y) { return x[0] < y[0]; });
  }
  return events;
}

BinnedEvents bin_events(const std::vector<Point>& events, const std::vector<Box>& bins,
                        const Domain& domain) {
  const int dim = domain.dim();
  for (std::size_t j = 0; j < bins.size(); ++j) {
    if (!domain.contains(bins[j])) throw DomainError("bin lies outside " + domain.describe());
    for (std::size_t k = 0; k < j; ++k) {
      if (bins[k].overlaps(bins[j], dim)) {
        std::ostringstream os;
        os << "bins " << k << " and " << j << " overlap";
        throw ContractViolation(os.str());
      }
    }
  }
  BinnedEvents out;
  for (const auto& box : bins) out.bins.push_back(Bin{box, 0.0});
  for (const auto& e : events) {
    bool binned = false;
    for (auto& bin : out.bins) {
      if (in_bin(bin.box, e, domain)) {
        bin.count += 1.0;
        binned = true;
        break;
      }
    }
    if (!binned) out.kept.push_back(e);
  }
  return out;
}

std::vector<Box> tail_bins(const Domain& domain, double start, double width) {
  if (domain.dim() != 1) throw ContractViolation("tail binning is defined for 1D domains");
  if (!(width > 0.0)) throw ContractViolation("bin width must be positive");
  const double lo = domain.bounds().lo[0];
  const double hi = domain.bounds().hi[0];
  if (start < lo || start >= hi) throw DomainError("tail start lies outside the domain");
  std::vector<Box> bins;
  for (std::size_t k = 0;; ++k) {
    const double a = start + width * static_cast<double>(k);
    if (a >= hi - 1e-12 * (hi - lo)) break;
    const double b = std::min(hi, start + width * static_cast<double>(k + 1));
    bins.push_back(Box::interval(a, b));
  }
  return bins;
}

}  // namespace rigp
