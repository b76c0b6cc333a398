#include "io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "rigp/error.hpp"

namespace rigp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

double parse_number(const std::string& text, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ContractViolation(where(path, line) + "cannot parse number '" + text + "'");
  }
}

struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;
};

Table read_table(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open " + path);
  std::string line;
  std::size_t no = 0;
  Table t;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (!seen_header) {
      if (cells != header) {
        std::string want;
        for (std::size_t k = 0; k < header.size(); ++k) want += (k ? "," : "") + header[k];
        throw ContractViolation(where(path, no) + "expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw ContractViolation(where(path, no) + "expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, path, no));
    t.rows.push_back(std::move(row));
    t.lines.push_back(no);
  }
  if (!seen_header) throw ContractViolation(path + ": empty file (header missing)");
  return t;
}

std::vector<Point> read_point_table(const std::string& path, const DomainSpec& spec,
                                    const char* what) {
  const int dim = spec.domain.dim();
  const Table t = read_table(path, dim == 1 ? std::vector<std::string>{"t"}
                                            : std::vector<std::string>{"x", "y"});
  std::vector<Point> pts;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    Point raw{};
    for (int a = 0; a < dim; ++a) raw[a] = t.rows[i][static_cast<std::size_t>(a)];
    const Point p = spec.to_internal(raw);
    if (!spec.domain.contains(p)) {
      std::ostringstream os;
      os << where(path, t.lines[i]) << what << " " << format_point(raw, dim)
         << " lies outside the domain";
      throw DomainError(os.str());
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

LogLevel log_level() {
  const char* env = std::getenv("RIGP_LOG_LEVEL");
  if (env == nullptr) return LogLevel::Warn;
  const std::string v = env;
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

Point DomainSpec::to_internal(Point raw) const {
  raw[0] -= origin;
  return raw;
}

Point DomainSpec::to_external(Point p) const {
  p[0] += origin;
  return p;
}

DomainSpec parse_domain(const std::string& text, const std::vector<double>& offset) {
  if (text.empty()) throw ContractViolation("a domain is required (e.g. --domain 0:50)");
  auto range = [&](const std::string& part) -> std::pair<double, double> {
    const auto bits = split(part, ':');
    if (bits.size() == 1) return {0.0, parse_number(bits[0], "--domain", 0)};
    if (bits.size() == 2) {
      return {parse_number(bits[0], "--domain", 0), parse_number(bits[1], "--domain", 0)};
    }
    throw ContractViolation("bad domain range '" + part + "' (expected a:b)");
  };
  const auto axes = split(text, ',');
  Point off{};
  for (std::size_t a = 0; a < std::min<std::size_t>(offset.size(), kMaxDim); ++a) off[a] = offset[a];
  if (axes.size() == 1) {
    const auto [lo, hi] = range(axes[0]);
    return DomainSpec{Domain::interval(hi - lo, off[0]), lo};
  }
  if (axes.size() == 2) {
    return DomainSpec{Domain::rectangle(range(axes[0]), range(axes[1]), off), 0.0};
  }
  throw ContractViolation("domain must have one or two axes");
}

std::vector<Point> read_events(const std::string& path, const DomainSpec& spec, Rng& rng) {
  std::vector<Point> events = read_point_table(path, spec, "event");
  std::map<Point, std::size_t> seen;
  const double nudge = 1e-9 * spec.domain.measure();
  const Box& b = spec.domain.bounds();
  std::size_t moved = 0;
  for (auto& e : events) {
    if (seen[e]++ == 0) continue;
    for (int a = 0; a < spec.domain.dim(); ++a) {
      double v = e[a] + nudge * (2.0 * uniform01(rng) - 1.0);
      if (v < b.lo[a] || v > b.hi[a]) v = 2.0 * e[a] - v;
      e[a] = v;
    }
    ++moved;
  }
  if (moved > 0) {
    log(LogLevel::Warn, path + ": perturbed " + std::to_string(moved) +
                            " duplicate event(s) by up to " + std::to_string(nudge));
  }
  return events;
}

std::vector<Bin> read_bins(const std::string& path, const DomainSpec& spec) {
  const int dim = spec.domain.dim();
  const Table t = read_table(path, dim == 1
                                       ? std::vector<std::string>{"start", "end", "count"}
                                       : std::vector<std::string>{"x0", "x1", "y0", "y1", "count"});
  std::vector<Bin> bins;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    Bin bin;
    if (dim == 1) {
      bin.box = Box::interval(r[0] - spec.origin, r[1] - spec.origin);
      bin.count = r[2];
    } else {
      bin.box = Box::rect(r[0], r[1], r[2], r[3]);
      bin.count = r[4];
    }
    const std::string at = where(path, t.lines[i]);
    if (!(bin.count >= 0.0) || bin.count != std::floor(bin.count)) {
      throw ContractViolation(at + "count must be a nonnegative integer");
    }
    if (!(bin.box.measure(dim) > 0.0)) throw ContractViolation(at + "bin has zero width");
    if (!spec.domain.contains(bin.box)) throw DomainError(at + "bin lies outside the domain");
    for (std::size_t k = 0; k < bins.size(); ++k) {
      if (bins[k].box.overlaps(bin.box, dim)) {
        throw ContractViolation(at + "bin overlaps the bin on line " +
                                std::to_string(t.lines[k]));
      }
    }
    bins.push_back(bin);
  }
  return bins;
}

std::vector<Point> read_points(const std::string& path, const DomainSpec& spec) {
  return read_point_table(path, spec, "point");
}

Dataset ingest(const std::string& events_path, const std::string& bins_path,
               const DomainSpec& spec, std::size_t grid, Rng& rng) {
  Dataset data(spec.domain);
  if (!events_path.empty()) data.events = read_events(events_path, spec, rng);
  if (!bins_path.empty()) data.bins = read_bins(bins_path, spec);
  if (grid > 0) data.grid = midpoint_grid(spec.domain, grid);
  data.validate();
  return data;
}

std::string format_point(const Point& p, int dim) {
  std::ostringstream os;
  os << std::setprecision(17) << p[0];
  if (dim == 2) os << ',' << p[1];
  return os.str();
}

void write_events(const std::string& path, const std::vector<Point>& events,
                  const DomainSpec& spec) {
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot write " + path);
  const int dim = spec.domain.dim();
  out << (dim == 1 ? "t" : "x,y") << "\n";
  for (const auto& e : events) out << format_point(spec.to_external(e), dim) << "\n";
}

void write_bins(const std::string& path, const std::vector<Bin>& bins, const DomainSpec& spec) {
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot write " + path);
  const int dim = spec.domain.dim();
  out << (dim == 1 ? "start,end,count" : "x0,x1,y0,y1,count") << "\n";
  out << std::setprecision(17);
  for (const auto& b : bins) {
    if (dim == 1) {
      out << b.box.lo[0] + spec.origin << ',' << b.box.hi[0] + spec.origin;
    } else {
      out << b.box.lo[0] << ',' << b.box.hi[0] << ',' << b.box.lo[1] << ',' << b.box.hi[1];
    }
    out << ',' << static_cast<long long>(b.count) << "\n";
  }
}

}  // namespace rigp::cli
