#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rigp {

inline constexpr int kMaxDim = 2;

/// A location in a 1D or 2D domain. For 1D domains only `[0]` is meaningful
/// and the trailing coordinate stays zero.
using Point = std::array<double, kMaxDim>;

inline Point point1(double t) { return Point{t, 0.0}; }
inline Point point2(double x, double y) { return Point{x, y}; }

/// Axis-aligned box [lo, hi] in `dim` dimensions.
struct Box {
  Point lo{};
  Point hi{};

  static Box interval(double a, double b) { return Box{point1(a), point1(b)}; }
  static Box rect(double x0, double x1, double y0, double y1) {
    return Box{point2(x0, y0), point2(x1, y1)};
  }

  double measure(int dim) const;
  bool contains(const Point& p, int dim) const;
  bool contains(const Box& other, int dim) const;
  /// Interior overlap (shared faces do not count).
  bool overlaps(const Box& other, int dim) const;
  Box shifted(const Point& offset, int dim) const;
};

/// Signed combination of boxes. Integrals are linear in the region, so a
/// complement such as "S minus all bins" is representable exactly as
/// {+S, -B1, ..., -BJ} without requiring it to be a box.
struct Region {
  struct Term {
    Box box;
    double weight = 1.0;
  };
  std::vector<Term> terms;

  static Region of(const Box& b) { return Region{{Term{b, 1.0}}}; }

  double measure(int dim) const;
  Region shifted(const Point& offset, int dim) const;
};

/// Observation window S. Kernels are evaluated in "kernel coordinates",
/// i.e. raw coordinates plus `offset`; Brownian kernels need those to be
/// strictly positive.
class Domain {
 public:
  static Domain interval(double length, double offset = 0.0);
  static Domain rectangle(std::pair<double, double> x_range,
                          std::pair<double, double> y_range, Point offset = {});

  int dim() const noexcept { return dim_; }
  const Box& bounds() const noexcept { return bounds_; }
  const Point& offset() const noexcept { return offset_; }
  double measure() const { return bounds_.measure(dim_); }
  /// Longest side; used to scale separation tolerances.
  double extent() const;

  bool contains(const Point& p) const { return bounds_.contains(p, dim_); }
  bool contains(const Box& b) const { return bounds_.contains(b, dim_); }

  Point to_kernel(const Point& p) const;
  Box to_kernel(const Box& b) const { return b.shifted(offset_, dim_); }
  Region to_kernel(const Region& r) const { return r.shifted(offset_, dim_); }

  std::string describe() const;

 private:
  Domain(Box bounds, Point offset, int dim) : bounds_(bounds), offset_(offset), dim_(dim) {}

  Box bounds_;
  Point offset_;
  int dim_;
};

/// Equispaced interior midpoints: `n` per axis, n^dim points in total.
std::vector<Point> midpoint_grid(const Domain& domain, std::size_t n);

}  // namespace rigp
