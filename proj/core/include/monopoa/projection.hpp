#ifndef MONOPOA_PROJECTION_HPP
#define MONOPOA_PROJECTION_HPP

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "monopoa/geometry.hpp"
#include "monopoa/problem.hpp"

namespace monopoa {

namespace neural {
class HmRiModel;
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// g'(0) > 0: not even the origin is feasible.
class EmptyRayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All radial inverses are 0 along the ray (compactness violated).
class UnboundedNormalSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BisectionOutcome {
  Point point;
  std::size_t evaluations = 0;  // individual constraint evaluations
  std::size_t iterations = 0;
};

/**
 * Bisection on r in [0, 1] for the largest r with max_i(g_i(r x) - u_i) <= 0.
 * Runs ceil(log2(1/tol)) halvings; when no probe was infeasible, x itself is
 * checked and returned unchanged if it lies in G.
 */
[[nodiscard]] BisectionOutcome bisection_project(const Point& x, std::span<const ConstraintFn> constraints,
                                                 std::span<const double> thresholds, double tol);

/// Number of halvings bisection_project performs.
[[nodiscard]] std::size_t bisection_iterations(double tol);

/// inf{r > 0 : x^T Q x / r^2 + c^T x / r <= y} in closed form; may be +inf.
[[nodiscard]] double quad_radial_inverse(const Eigen::MatrixXd& q, const Eigen::VectorXd& c,
                                         std::span<const double> x, double y);

struct NumericRiOptions {
  double tol = 1e-10;
  double r_max = 1e6;
  double r_min = 1e-9;
};

/// Bracketing by doubling/halving from r = 1, then bisection to `tol`.
[[nodiscard]] double numeric_radial_inverse(const ScalarFn& g, std::span<const double> x, double y,
                                            const NumericRiOptions& opt = {});
[[nodiscard]] double numeric_radial_inverse(const ConstraintFn& g, std::span<const double> x, double y,
                                            const NumericRiOptions& opt = {});

/// x / max_i rho_i, clamped along the ray into [0, bound] when a bound is
/// given. Any +inf gives the origin; max rho == 0 throws
/// UnboundedNormalSetError.
[[nodiscard]] Point project_via_radial_inverses(const Point& x, std::span<const double> rhos,
                                                const Point* bound = nullptr);

/// Largest r with r x <= bound (+inf for x = 0).
[[nodiscard]] double ray_clamp_factor(const Point& x, const Point& bound);

struct BisectionStrategy {
  std::vector<ConstraintFn> constraints;
  std::vector<double> thresholds;
  double tol = 1e-4;
};

struct ClosedFormStrategy {
  std::vector<QuadraticConstraint> constraints;
  std::vector<double> thresholds;
};

struct NumericRiStrategy {
  std::vector<ConstraintFn> constraints;
  std::vector<double> thresholds;
  NumericRiOptions options;
};

struct LearnedRiStrategy {
  std::shared_ptr<const neural::HmRiModel> model;
  std::vector<std::vector<double>> z;  // per constraint
  std::vector<double> thresholds;
};

using ProjectionStrategy = std::variant<BisectionStrategy, ClosedFormStrategy, NumericRiStrategy, LearnedRiStrategy>;

struct ProjectionCounters {
  std::uint64_t projection_calls = 0;
  std::uint64_t constraint_evals = 0;  // constraint-eval equivalents
  std::uint64_t model_evals = 0;
  std::uint64_t unbounded_clamps = 0;
};

/**
 * x -> pi_G(x) with call accounting. Counters are atomic so one oracle can
 * serve concurrent solvers; the strategy itself is immutable.
 */
class ProjectionOracle {
 public:
  explicit ProjectionOracle(ProjectionStrategy strategy, std::optional<Point> bound = std::nullopt);

  [[nodiscard]] Point project(const Point& x) const;
  [[nodiscard]] std::size_t constraint_count() const;
  [[nodiscard]] const ProjectionStrategy& strategy() const { return strategy_; }
  [[nodiscard]] ProjectionCounters counters() const;
  void reset_counters();
  /// Counts an unbounded-normal-set clamp performed by the caller.
  void note_unbounded_clamp() const;

 private:
  struct AtomicCounters {
    std::atomic<std::uint64_t> calls{0};
    std::atomic<std::uint64_t> constraint_evals{0};
    std::atomic<std::uint64_t> model_evals{0};
    std::atomic<std::uint64_t> clamps{0};
  };

  ProjectionStrategy strategy_;
  std::optional<Point> bound_;
  std::unique_ptr<AtomicCounters> counters_;
};

[[nodiscard]] inline Point project(const ProjectionOracle& oracle, const Point& x) { return oracle.project(x); }

/// Exact bisection oracle over a problem's upper constraints.
[[nodiscard]] ProjectionOracle make_bisection_oracle(const MonotoneProblem& problem, double tol = 1e-4);
/// Closed-form oracle; every upper constraint must be quadratic.
[[nodiscard]] ProjectionOracle make_closed_form_oracle(const MonotoneProblem& problem);

}  // namespace monopoa

#endif  // MONOPOA_PROJECTION_HPP
