#pragma once

#include <string>
#include <vector>

#include "rigp/domain.hpp"
#include "rigp/model.hpp"
#include "rigp/rng.hpp"

namespace rigp {

/// Deterministic ground-truth intensity. All kinds accept a multiplicative
/// `scale`; 1D kinds are functions of the first coordinate.
struct IntensitySpec {
  enum class Kind {
    Lambda1,            // 2 exp(-s/15) + exp(-((s-25)/10)^2)
    Lambda2,            // 10
    Constant,           // rate
    Table,              // linear interpolation of (knots, values), flat outside
    PiecewiseConstant,  // values[k] on [knots[k], knots[k+1])
    Product2D,          // parts[0](x) * parts[1](y)
    Sum,                // sum of parts
  };

  Kind kind = Kind::Constant;
  double scale = 1.0;
  double rate = 0.0;
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<IntensitySpec> parts;

  static IntensitySpec lambda1(double scale = 1.0);
  static IntensitySpec lambda2(double scale = 1.0);
  static IntensitySpec constant(double rate);
  static IntensitySpec table(std::vector<double> knots, std::vector<double> values);
  static IntensitySpec piecewise(std::vector<double> edges, std::vector<double> levels);
  static IntensitySpec product(IntensitySpec x, IntensitySpec y);
  static IntensitySpec sum(std::vector<IntensitySpec> parts);

  /// Parses "lambda1", "lambda2:3", "constant:10", "table:0,1,2/5,6,7",
  /// "piecewise:0,1,2/3,4". A trailing "*k" multiplies by k.
  static IntensitySpec parse(const std::string& text);
  std::string describe() const;
};

double eval_intensity(const IntensitySpec& spec, const Point& p);
/// Pointwise evaluation; throws DomainError for points outside the domain.
std::vector<double> eval_intensity(const IntensitySpec& spec, const Domain& domain,
                                   const std::vector<Point>& points);

/// Upper bound on the domain; smooth kinds use a 1e-3 grid scan plus 1%.
double intensity_upper_bound(const IntensitySpec& spec, const Domain& domain);
/// Exact integral over a box inside the domain.
double intensity_integral(const IntensitySpec& spec, const Box& region, int dim);

/// Lewis-Shedler thinning of a homogeneous process at the upper bound.
/// 1D output is sorted.
std::vector<Point> simulate_thinning(const IntensitySpec& spec, const Domain& domain, Rng& rng);

struct BinnedEvents {
  std::vector<Point> kept;
  std::vector<Bin> bins;
};

/// Moves events that fall in a bin (half-open) into its count.
BinnedEvents bin_events(const std::vector<Point>& events, const std::vector<Box>& bins,
                        const Domain& domain);

/// Consecutive width-`width` bins from `start` to the end of a 1D domain; the
/// last bin is truncated at the boundary.
std::vector<Box> tail_bins(const Domain& domain, double start, double width);

}  // namespace rigp
