#include "rigp/domain.hpp"

#include <algorithm>
#include <sstream>

#include "rigp/error.hpp"

namespace rigp {

double Box::measure(int dim) const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= std::max(0.0, hi[a] - lo[a]);
  return m;
}

bool Box::contains(const Point& p, int dim) const {
  for (int a = 0; a < dim; ++a) {
    if (p[a] < lo[a] || p[a] > hi[a]) return false;
  }
  return true;
}

bool Box::contains(const Box& other, int dim) const {
  for (int a = 0; a < dim; ++a) {
    if (other.lo[a] < lo[a] || other.hi[a] > hi[a]) return false;
  }
  return true;
}

bool Box::overlaps(const Box& other, int dim) const {
  for (int a = 0; a < dim; ++a) {
    if (std::min(hi[a], other.hi[a]) <= std::max(lo[a], other.lo[a])) return false;
  }
  return true;
}

Box Box::shifted(const Point& offset, int dim) const {
  Box b = *this;
  for (int a = 0; a < dim; ++a) {
    b.lo[a] += offset[a];
    b.hi[a] += offset[a];
  }
  return b;
}

double Region::measure(int dim) const {
  double m = 0.0;
  for (const auto& t : terms) m += t.weight * t.box.measure(dim);
  return m;
}

Region Region::shifted(const Point& offset, int dim) const {
  Region r = *this;
  for (auto& t : r.terms) t.box = t.box.shifted(offset, dim);
  return r;
}

Domain Domain::interval(double length, double offset) {
  if (!(length > 0.0)) throw DomainError("interval length must be positive");
  return Domain(Box::interval(0.0, length), point1(offset), 1);
}

Domain Domain::rectangle(std::pair<double, double> x_range,
                         std::pair<double, double> y_range, Point offset) {
  if (!(x_range.second > x_range.first) || !(y_range.second > y_range.first)) {
    throw DomainError("rectangle sides must have positive length");
  }
  return Domain(Box::rect(x_range.first, x_range.second, y_range.first, y_range.second),
                offset, 2);
}

double Domain::extent() const {
  double e = 0.0;
  for (int a = 0; a < dim_; ++a) e = std::max(e, bounds_.hi[a] - bounds_.lo[a]);
  return e;
}

Point Domain::to_kernel(const Point& p) const {
  Point q = p;
  for (int a = 0; a < dim_; ++a) q[a] += offset_[a];
  return q;
}

std::string Domain::describe() const {
  std::ostringstream os;
  if (dim_ == 1) {
    os << "[" << bounds_.lo[0] << ", " << bounds_.hi[0] << "]";
  } else {
    os << "[" << bounds_.lo[0] << ", " << bounds_.hi[0] << "]x[" << bounds_.lo[1] << ", "
       << bounds_.hi[1] << "]";
  }
  return os.str();
}

std::vector<Point> midpoint_grid(const Domain& domain, std::size_t n) {
  if (n == 0) throw ContractViolation("grid size must be at least 1");
  const Box& b = domain.bounds();
  std::vector<Point> grid;
  auto coord = [&](int axis, std::size_t k) {
    const double h = (b.hi[axis] - b.lo[axis]) / static_cast<double>(n);
    return b.lo[axis] + (static_cast<double>(k) + 0.5) * h;
  };
  if (domain.dim() == 1) {
    grid.reserve(n);
    for (std::size_t k = 0; k < n; ++k) grid.push_back(point1(coord(0, k)));
  } else {
    grid.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) grid.push_back(point2(coord(0, i), coord(1, j)));
    }
  }
  return grid;
}

}  // namespace rigp
