#ifndef MONOPOA_GEOMETRY_HPP
#define MONOPOA_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monopoa {

/// Thrown when two vectors that must share a dimension do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * A point of the nonnegative orthant.
 *
 * Construction rejects negative and non-finite coordinates, so every Point in
 * the program satisfies x >= 0.
 */
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  static Point zeros(std::size_t n);
  static Point filled(std::size_t n, double value);

  [[nodiscard]] std::size_t size() const { return coords_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }
  [[nodiscard]] std::span<const double> coords() const { return coords_; }
  [[nodiscard]] const std::vector<double>& values() const { return coords_; }

  /// r * x for r >= 0.
  [[nodiscard]] Point scaled(double r) const;

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] double sum() const;
  [[nodiscard]] double max_coord() const;
  [[nodiscard]] double norm2() const;

  [[nodiscard]] std::string to_string() const;

  bool operator==(const Point& other) const = default;

 private:
  std::vector<double> coords_;
};

/// Strict lexicographic order on coordinates; used for deterministic tie-breaking.
[[nodiscard]] bool lexicographic_less(const Point& a, const Point& b);

/// Closed axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  Box(Point lo_, Point hi_);
  /// The box [0, hi].
  static Box from_origin(Point hi);

  [[nodiscard]] std::size_t dimension() const { return lo.size(); }
  [[nodiscard]] bool contains(const Point& x) const;
  [[nodiscard]] Point center() const;
};

/// Finite vertex collection generating the polyblock P_V = union of [0, v].
using VertexSet = std::vector<Point>;

/// x <= y componentwise.
[[nodiscard]] bool dominates(const Point& x, const Point& y);
/// x < y in every coordinate.
[[nodiscard]] bool strictly_dominates(const Point& x, const Point& y);

// Span overloads for raw coordinate vectors (not necessarily nonnegative).
[[nodiscard]] bool dominates(std::span<const double> x, std::span<const double> y);
[[nodiscard]] bool strictly_dominates(std::span<const double> x, std::span<const double> y);

/// Maximal elements of V under <=, exact duplicates collapsed. The
/// rectangular hull is unchanged. Output is sorted lexicographically
/// descending.
[[nodiscard]] VertexSet prune_dominated(const VertexSet& vertices);

/// True when x lies in the rectangular hull P_V.
[[nodiscard]] bool in_polyblock(const Point& x, const VertexSet& vertices);

}  // namespace monopoa

#endif  // MONOPOA_GEOMETRY_HPP
