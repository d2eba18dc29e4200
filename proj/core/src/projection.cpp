#include "monopoa/projection.hpp"

#include <algorithm>
#include <cmath>

#include "monopoa/hmri.hpp"

namespace monopoa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// max_i(g_i(v) - u_i), evaluating every constraint.
double residual(std::span<const ConstraintFn> constraints, std::span<const double> thresholds,
                std::span<const double> v) {
  double worst = -kInfinity;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    worst = std::max(worst, eval_constraint(constraints[i], v) - thresholds[i]);
  }
  return worst;
}

std::vector<double> scaled(std::span<const double> x, double r) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = r * x[i];
  return out;
}

void check_sizes(std::size_t constraints, std::size_t thresholds) {
  if (constraints != thresholds) throw std::invalid_argument("one threshold per constraint is required");
}

}  // namespace

std::size_t bisection_iterations(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tol must be > 0");
  return static_cast<std::size_t>(std::ceil(std::log2(1.0 / tol) - 1e-12));
}

BisectionOutcome bisection_project(const Point& x, std::span<const ConstraintFn> constraints,
                                   std::span<const double> thresholds, double tol) {
  check_sizes(constraints.size(), thresholds.size());
  const std::size_t iters = bisection_iterations(tol);
  const std::size_t m = constraints.size();
  BisectionOutcome out{x, 0, 0};
  double r_lo = 0.0, r_hi = 1.0, r = 0.5;
  for (std::size_t k = 0; k < iters; ++k) {
    const auto probe = scaled(x.coords(), r);
    out.evaluations += m;
    if (residual(constraints, thresholds, probe) <= 0.0) {
      r_lo = r;
    } else {
      r_hi = r;
    }
    r = 0.5 * (r_lo + r_hi);
    ++out.iterations;
  }
  if (r_hi == 1.0) {
    out.evaluations += m;
    if (residual(constraints, thresholds, x.coords()) <= 0.0) return out;
  }
  if (r_lo == 0.0) {
    const auto origin = std::vector<double>(x.size(), 0.0);
    out.evaluations += m;
    if (residual(constraints, thresholds, origin) > 0.0) {
      throw EmptyRayError("empty projection ray: the origin violates a constraint");
    }
  }
  out.point = x.scaled(r_lo);
  return out;
}

double quad_radial_inverse(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, std::span<const double> x,
                           double y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (q.rows() != n || q.cols() != n || c.size() != n) throw DimensionMismatch("quad_radial_inverse: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
  const double a = v.dot(q * v);
  const double b = c.dot(v);
  if (a == 0.0 && b == 0.0) return y >= 0.0 ? 0.0 : kInfinity;
  if (y <= 0.0) return kInfinity;
  // Positive root of y r^2 - b r - a = 0; this form avoids cancellation as a -> 0.
  return (b + std::sqrt(b * b + 4.0 * a * y)) / (2.0 * y);
}

double numeric_radial_inverse(const ScalarFn& g, std::span<const double> x, double y,
                              const NumericRiOptions& opt) {
  if (!(opt.tol > 0.0) || !(opt.r_min > 0.0) || !(opt.r_max > opt.r_min)) {
    throw std::invalid_argument("numeric_radial_inverse: bad options");
  }
  auto feasible = [&](double r) {
    const double v = g(scaled(x, 1.0 / r));
    if (!std::isfinite(v)) throw std::domain_error("numeric_radial_inverse: non-finite constraint value");
    return v <= y;
  };
  double lo, hi;  // feasible(hi) and !feasible(lo)
  if (feasible(1.0)) {
    hi = 1.0;
    lo = 0.5;
    while (feasible(lo)) {
      hi = lo;
      if (lo < opt.r_min) return 0.0;
      lo *= 0.5;
    }
  } else {
    lo = 1.0;
    hi = 2.0;
    while (!feasible(hi)) {
      lo = hi;
      if (hi > opt.r_max) return kInfinity;
      hi *= 2.0;
    }
  }
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double numeric_radial_inverse(const ConstraintFn& g, std::span<const double> x, double y,
                              const NumericRiOptions& opt) {
  return numeric_radial_inverse([&g](std::span<const double> v) { return eval_constraint(g, v); }, x, y, opt);
}

double ray_clamp_factor(const Point& x, const Point& bound) {
  if (x.size() != bound.size()) throw DimensionMismatch("ray_clamp_factor: dimension mismatch");
  double r = kInfinity;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) r = std::min(r, bound[i] / x[i]);
  }
  return r;
}

Point project_via_radial_inverses(const Point& x, std::span<const double> rhos, const Point* bound) {
  if (x.is_zero()) return x;
  double worst = 0.0;
  for (double rho : rhos) {
    if (std::isnan(rho)) throw std::domain_error("radial inverse is NaN");
    if (rho == kInfinity) return Point::zeros(x.size());
    worst = std::max(worst, rho);
  }
  if (!(worst > 0.0)) throw UnboundedNormalSetError("unbounded normal set: every radial inverse is 0");
  double r = 1.0 / worst;
  if (bound) r = std::min(r, ray_clamp_factor(x, *bound));
  return x.scaled(r);
}

ProjectionOracle::ProjectionOracle(ProjectionStrategy strategy, std::optional<Point> bound)
    : strategy_(std::move(strategy)), bound_(std::move(bound)), counters_(std::make_unique<AtomicCounters>()) {
  std::visit(Overloaded{
                 [](const BisectionStrategy& s) {
                   check_sizes(s.constraints.size(), s.thresholds.size());
                   (void)bisection_iterations(s.tol);
                 },
                 [](const ClosedFormStrategy& s) { check_sizes(s.constraints.size(), s.thresholds.size()); },
                 [](const NumericRiStrategy& s) { check_sizes(s.constraints.size(), s.thresholds.size()); },
                 [](const LearnedRiStrategy& s) {
                   if (!s.model) throw std::invalid_argument("learned oracle without a model");
                   check_sizes(s.z.size(), s.thresholds.size());
                 },
             },
             strategy_);
}

std::size_t ProjectionOracle::constraint_count() const {
  return std::visit([](const auto& s) { return s.thresholds.size(); }, strategy_);
}

Point ProjectionOracle::project(const Point& x) const {
  counters_->calls.fetch_add(1, std::memory_order_relaxed);
  const Point* bound = bound_ ? &*bound_ : nullptr;
  return std::visit(
      Overloaded{
          [&](const BisectionStrategy& s) {
            auto out = bisection_project(x, s.constraints, s.thresholds, s.tol);
            counters_->constraint_evals.fetch_add(out.evaluations, std::memory_order_relaxed);
            return out.point;
          },
          [&](const ClosedFormStrategy& s) {
            std::vector<double> rhos(s.constraints.size());
            for (std::size_t i = 0; i < rhos.size(); ++i) {
              rhos[i] = quad_radial_inverse(s.constraints[i].q, s.constraints[i].c, x.coords(), s.thresholds[i]);
            }
            counters_->constraint_evals.fetch_add(rhos.size(), std::memory_order_relaxed);
            return project_via_radial_inverses(x, rhos, bound);
          },
          [&](const NumericRiStrategy& s) {
            std::vector<double> rhos(s.constraints.size());
            std::uint64_t evals = 0;
            for (std::size_t i = 0; i < rhos.size(); ++i) {
              const auto& g = s.constraints[i];
              rhos[i] = numeric_radial_inverse(
                  [&](std::span<const double> v) {
                    ++evals;
                    return eval_constraint(g, v);
                  },
                  x.coords(), s.thresholds[i], s.options);
            }
            counters_->constraint_evals.fetch_add(evals, std::memory_order_relaxed);
            return project_via_radial_inverses(x, rhos, bound);
          },
          [&](const LearnedRiStrategy& s) {
            std::vector<double> rhos(s.thresholds.size());
            for (std::size_t i = 0; i < rhos.size(); ++i) {
              rhos[i] = s.model->value(x.coords(), s.thresholds[i], s.z[i]);
            }
            counters_->model_evals.fetch_add(rhos.size(), std::memory_order_relaxed);
            return project_via_radial_inverses(x, rhos, bound);
          },
      },
      strategy_);
}

ProjectionCounters ProjectionOracle::counters() const {
  return {counters_->calls.load(), counters_->constraint_evals.load(), counters_->model_evals.load(),
          counters_->clamps.load()};
}

void ProjectionOracle::reset_counters() {
  counters_->calls = 0;
  counters_->constraint_evals = 0;
  counters_->model_evals = 0;
  counters_->clamps = 0;
}

void ProjectionOracle::note_unbounded_clamp() const { counters_->clamps.fetch_add(1, std::memory_order_relaxed); }

ProjectionOracle make_bisection_oracle(const MonotoneProblem& problem, double tol) {
  return ProjectionOracle(BisectionStrategy{problem.upper, problem.upper_thresholds, tol}, problem.bound);
}

ProjectionOracle make_closed_form_oracle(const MonotoneProblem& problem) {
  ClosedFormStrategy s;
  for (const auto& g : problem.upper) {
    const auto* q = std::get_if<QuadraticConstraint>(&g);
    if (!q) throw std::invalid_argument("closed-form projection needs quadratic constraints");
    s.constraints.push_back(*q);
  }
  s.thresholds = problem.upper_thresholds;
  return ProjectionOracle(std::move(s), problem.bound);
}

}  // namespace monopoa
