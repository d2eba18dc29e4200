// Fixtures shared by unit and acceptance tests.
#ifndef MONOPOA_TESTS_SUPPORT_HPP
#define MONOPOA_TESTS_SUPPORT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "monopoa/mlp.hpp"
#include "monopoa/poa.hpp"
#include "monopoa/problem.hpp"

namespace monopoa::testing {

inline double sum_objective(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

/// max x1 + x2  s.t.  x1^2 + x2^2 <= 1,  b = (1, 1).
inline MonotoneProblem circle_problem() {
  MonotoneProblem p;
  p.n = 2;
  p.objective = sum_objective;
  p.upper.emplace_back(QuadraticConstraint{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)});
  p.upper_thresholds = {1.0};
  p.bound = Point::filled(2, 1.0);
  return p;
}

/// max x1 + 2 x2  s.t.  x1 + x2 <= 1,  b = (1, 1).
inline MonotoneProblem linear_problem() {
  MonotoneProblem p;
  p.n = 2;
  p.objective = [](std::span<const double> x) { return x[0] + 2.0 * x[1]; };
  p.upper.emplace_back(QuadraticConstraint{Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(2)});
  p.upper_thresholds = {1.0};
  p.bound = Point::filled(2, 1.0);
  return p;
}

inline QuadraticConstraint random_quadratic(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuadraticConstraint g{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < g.q.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.q.cols(); ++j) g.q(i, j) = u(rng);
    g.c(i) = u(rng);
  }
  return g;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

/// Two-layer block sum_j alpha_j relu(w_j . x + b_j).
inline neural::Mlp two_layer(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::RowVectorXd& alpha) {
  neural::DenseLayer l1{w, b};
  neural::DenseLayer l2{alpha, Eigen::VectorXd::Zero(1)};
  return neural::Mlp({l1, l2}, false);
}

/// Nonnegative weights everywhere: monotone by construction.
inline neural::Mlp planted_monotone(std::mt19937_64& rng, std::size_t in, std::size_t width) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd w(width, in);
  Eigen::VectorXd b(width);
  Eigen::RowVectorXd a(width);
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = u(rng);
    b(j) = u(rng) - 0.5;
    a(j) = u(rng);
  }
  return two_layer(w, b, a);
}

/// relu(x1) - 2 relu(x1 - 0.5): slope -1 for x1 > 0.5.
inline neural::Mlp planted_violation() {
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 1, 0;
  Eigen::VectorXd b(2);
  b << 0, -0.5;
  Eigen::RowVectorXd a(2);
  a << 1, -2;
  return two_layer(w, b, a);
}

/**
 * Slope -1 only on the strip 1 <= x1 + x2 <= 1.005, so the violating region is
 * 0.005 wide along each axis. The tau = 0.01 margins (0.02 for |w|_1 = 2)
 * make it empty.
 */
inline neural::Mlp planted_sliver() {
  Eigen::MatrixXd w(3, 2);
  w << 1, 1, 1, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 0, -1.0, -1.005;
  Eigen::RowVectorXd a(3);
  a << 1, -2, 2;
  return two_layer(w, b, a);
}

struct GridResult {
  double best = -std::numeric_limits<double>::infinity();
  double slack = 0.0;  // bound on opt - best
};

/// Best objective over the feasible points of a k x k grid on [0, b] (n = 2),
/// with a Lipschitz slack for the gap to the true optimum.
inline GridResult grid_oracle(const MonotoneProblem& p, std::size_t k, double lipschitz) {
  GridResult g;
  const double h0 = p.bound[0] / static_cast<double>(k - 1);
  const double h1 = p.bound[1] / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::vector<double> x{static_cast<double>(i) * h0, static_cast<double>(j) * h1};
      if (p.in_g(x)) g.best = std::max(g.best, p.f(x));
    }
  }
  g.slack = lipschitz * std::max(h0, h1);
  return g;
}

/// max |df/dx|_1 over [0, 1]^n of x^T Q x * scale.
inline double quadratic_lipschitz(const Eigen::MatrixXd& q, double scale) {
  return scale * (q + q.transpose()).sum();
}

}  // namespace monopoa::testing

#endif  // MONOPOA_TESTS_SUPPORT_HPP
