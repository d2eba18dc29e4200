#ifndef MONOPOA_POA_HPP
#define MONOPOA_POA_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "monopoa/geometry.hpp"
#include "monopoa/problem.hpp"
#include "monopoa/projection.hpp"

namespace monopoa {

struct PoaConfig {
  double eps = 1e-3;
  std::size_t v_max = 10000;
  std::size_t max_iters = 10000;
  double origin_shift_alpha = 0.0;  // 0 disables
  /// Coordinates of x_hat at or below axis_tol * b_i are left out of the cut,
  /// as exact zeros are. Guards against vertices creeping towards an axis.
  double axis_tol = 1e-6;
  /// Optional per-iteration trace: "t |V| f(x_hat) f_best" lines.
  std::ostream* trace = nullptr;

  void validate() const;
};

enum class Termination { Converged, IterLimit, VertexStarvation, ProjectionError };

[[nodiscard]] std::string to_string(Termination t);
[[nodiscard]] Termination termination_from_string(const std::string& s);

struct PoaResult {
  std::optional<Point> best_point;
  double best_value = -kInfinity;
  double upper_bound = kInfinity;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t projection_calls = 0;
  std::size_t constraint_evals = 0;
  std::size_t model_evals = 0;
  std::size_t unbounded_clamps = 0;
  std::size_t max_vertices = 0;
  Termination termination = Termination::IterLimit;
  std::string error;
};

using HFilter = std::function<bool(const Point&)>;

struct RefineSplit {
  std::vector<std::size_t> kept;  // indices into the input set
  VertexSet added;
};

/**
 * One refinement of an antichain V at projection z. Every s with
 * s_i > z_i on all cut coordinates is removed and spawns
 * s - (s_i - z_i) e_i per cut coordinate i; spawned points inside another
 * removed vertex's box, failing `in_h`, or dominated are dropped.
 * `cut` defaults to every coordinate.
 */
[[nodiscard]] RefineSplit refine_split(const VertexSet& v, const Point& z, const HFilter& in_h,
                                       const std::vector<bool>& cut = {});
[[nodiscard]] VertexSet refine_vertices(const VertexSet& v, const Point& z, const HFilter& in_h = {},
                                        const std::vector<bool>& cut = {});

/// Vertices with f(v) + eps >= f_best.
[[nodiscard]] VertexSet reduce_vertices(const VertexSet& v, const ScalarFn& f, double f_best, double eps);

/**
 * Shifted problem: f'(x) = f(x - a), g'(x) = g(max(x - a, 0)),
 * H' = a + H (plus min_i x_i >= a), b' = b + a.
 */
[[nodiscard]] MonotoneProblem origin_shift(const MonotoneProblem& problem, double alpha);
[[nodiscard]] Point unshift(const Point& y, double alpha);

/// Polyblock outer approximation.
[[nodiscard]] PoaResult solve(const MonotoneProblem& problem, const ProjectionOracle& proj, const PoaConfig& cfg);

/// Shifts the problem by cfg.origin_shift_alpha when positive, builds the
/// oracle with `make_oracle`, solves and maps the result back.
[[nodiscard]] PoaResult solve_shifted(const MonotoneProblem& problem,
                                      const std::function<ProjectionOracle(const MonotoneProblem&)>& make_oracle,
                                      const PoaConfig& cfg);

}  // namespace monopoa

#endif  // MONOPOA_POA_HPP
