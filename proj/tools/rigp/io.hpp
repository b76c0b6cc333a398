#pragma once

#include <string>
#include <vector>

#include "rigp/domain.hpp"
#include "rigp/model.hpp"
#include "rigp/rng.hpp"

namespace rigp::cli {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from RIGP_LOG_LEVEL (error|warn|info|debug), default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

/// A domain plus the origin subtracted from raw 1D coordinates on input and
/// added back on output.
struct DomainSpec {
  Domain domain;
  double origin = 0.0;

  Point to_internal(Point raw) const;
  Point to_external(Point p) const;
};

/// "T" -> [0,T]; "a:b" -> [a,b] stored as [0,b-a] with origin a;
/// "a:b,c:d" -> rectangle. `offset` is the kernel-coordinate translation.
DomainSpec parse_domain(const std::string& text, const std::vector<double>& offset = {});

/// Event CSV with header `t` (1D) or `x,y` (2D). Exact duplicates are nudged
/// by up to 1e-9 |S| and reported through the logger.
std::vector<Point> read_events(const std::string& path, const DomainSpec& domain, Rng& rng);
/// Bin CSV with header `start,end,count` or `x0,x1,y0,y1,count`.
std::vector<Bin> read_bins(const std::string& path, const DomainSpec& domain);
/// Point CSV in the event format, without duplicate handling.
std::vector<Point> read_points(const std::string& path, const DomainSpec& domain);

Dataset ingest(const std::string& events_path, const std::string& bins_path,
               const DomainSpec& domain, std::size_t grid, Rng& rng);

void write_events(const std::string& path, const std::vector<Point>& events,
                  const DomainSpec& domain);
void write_bins(const std::string& path, const std::vector<Bin>& bins, const DomainSpec& domain);

std::string format_point(const Point& p, int dim);

}  // namespace rigp::cli
