#include "monopoa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace monopoa {

namespace {

void check_nonnegative(const std::vector<double>& coords) {
  for (double v : coords) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("Point coordinates must be finite and nonnegative");
    }
  }
}

void check_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  check_nonnegative(coords_);
}

Point::Point(std::initializer_list<double> coords) : coords_(coords) {
  check_nonnegative(coords_);
}

Point Point::zeros(std::size_t n) { return Point(std::vector<double>(n, 0.0)); }

Point Point::filled(std::size_t n, double value) {
  return Point(std::vector<double>(n, value));
}

Point Point::scaled(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("scale factor must be finite and nonnegative");
  }
  std::vector<double> out(coords_.size());
  std::transform(coords_.begin(), coords_.end(), out.begin(),
                 [r](double v) { return r * v; });
  Point p;
  p.coords_ = std::move(out);
  return p;
}

bool Point::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return v == 0.0; });
}

double Point::sum() const { return std::accumulate(coords_.begin(), coords_.end(), 0.0); }

double Point::max_coord() const {
  return coords_.empty() ? 0.0 : *std::max_element(coords_.begin(), coords_.end());
}

double Point::norm2() const {
  double s = 0.0;
  for (double v : coords_) s += v * v;
  return std::sqrt(s);
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) os << ", ";
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

bool lexicographic_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.values().begin(), a.values().end(),
                                      b.values().begin(), b.values().end());
}

Box::Box(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  check_same_dimension(lo.size(), hi.size());
  if (!dominates(lo, hi)) throw std::invalid_argument("Box requires lo <= hi");
}

Box Box::from_origin(Point hi) {
  auto n = hi.size();
  return Box(Point::zeros(n), std::move(hi));
}

bool Box::contains(const Point& x) const { return dominates(lo, x) && dominates(x, hi); }

Point Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return Point(std::move(c));
}

bool dominates(std::span<const double> x, std::span<const double> y) {
  check_same_dimension(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] <= y[i])) return false;
  }
  return true;
}

bool strictly_dominates(std::span<const double> x, std::span<const double> y) {
  check_same_dimension(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] < y[i])) return false;
  }
  return true;
}

bool dominates(const Point& x, const Point& y) { return dominates(x.coords(), y.coords()); }

bool strictly_dominates(const Point& x, const Point& y) {
  return strictly_dominates(x.coords(), y.coords());
}

VertexSet prune_dominated(const VertexSet& vertices) {
  if (vertices.empty()) return {};
  const auto n = vertices.front().size();
  for (const auto& v : vertices) check_same_dimension(n, v.size());

  // A dominator of y (other than y) is lexicographically greater than y, so
  // after a descending sort only earlier kept points need checking.
  VertexSet sorted = vertices;
  std::sort(sorted.begin(), sorted.end(),
            [](const Point& a, const Point& b) { return lexicographic_less(b, a); });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  VertexSet kept;
  kept.reserve(sorted.size());
  for (const auto& y : sorted) {
    bool dominated = std::any_of(kept.begin(), kept.end(),
                                 [&](const Point& x) { return dominates(y, x); });
    if (!dominated) kept.push_back(y);
  }
  return kept;
}

bool in_polyblock(const Point& x, const VertexSet& vertices) {
  return std::any_of(vertices.begin(), vertices.end(),
                     [&](const Point& v) { return dominates(x, v); });
}

}  // namespace monopoa
