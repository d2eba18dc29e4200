#ifndef MONOPOA_PROBLEM_HPP
#define MONOPOA_PROBLEM_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "monopoa/geometry.hpp"

namespace monopoa {

namespace neural {
class ConstraintNet;
}

using ScalarFn = std::function<double(std::span<const double>)>;

/// x^T Q x + c^T x with Q, c entrywise nonnegative.
struct QuadraticConstraint {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
};

/// prod_i (x^T Q_i x + c_i) with every Q_i, c_i nonnegative.
struct MultiplicativeConstraint {
  std::vector<Eigen::MatrixXd> q;
  std::vector<double> c;
};

/// Noise-limited stepped capacity model.
struct CapacityParams {
  double gamma = 2.0;     // path-loss exponent
  double d0 = 0.01;       // distance offset
  double noise = 1.0;     // N0
  double quantum = 0.5;   // capacity step q
};

using Position = std::array<double, 2>;

/// Capacity of one user. With `negated` the constraint is the canonical
/// increasing form -C(1 - y, s) of a power vector y = 1 - p.
struct SteppedCapacityConstraint {
  std::vector<Position> towers;
  Position user{};
  CapacityParams params;
  bool negated = false;
};

/// Direct surrogate g_theta(x, z) of a constraint.
struct LearnedConstraint {
  std::shared_ptr<const neural::ConstraintNet> model;
  std::vector<double> z;
};

struct CustomConstraint {
  ScalarFn fn;
  std::string name;
};

using ConstraintFn = std::variant<QuadraticConstraint, MultiplicativeConstraint,
                                  SteppedCapacityConstraint, LearnedConstraint, CustomConstraint>;

[[nodiscard]] double eval_constraint(const ConstraintFn& g, std::span<const double> x);
[[nodiscard]] inline double eval_constraint(const ConstraintFn& g, const Point& x) {
  return eval_constraint(g, x.coords());
}

/// C(p, s) = q * floor(log2(1 + sum_i p_i gain_i(s) / N0) / q),
/// gain_i(s) = (|tower_i - s| + d0)^-gamma. Negative powers count as zero.
[[nodiscard]] double capacity(std::span<const double> power, const std::vector<Position>& towers,
                              const Position& user, const CapacityParams& params);

/**
 * max f(x)  s.t.  g_i(x) <= u_i,  h_j(x) >= l_j,  x in [0, b].
 *
 * f, g_i and h_j are increasing on the nonnegative orthant.
 */
struct MonotoneProblem {
  std::size_t n = 0;
  ScalarFn objective;
  std::vector<ConstraintFn> upper;
  std::vector<double> upper_thresholds;
  std::vector<ConstraintFn> lower;
  std::vector<double> lower_thresholds;
  Point bound;

  [[nodiscard]] double f(std::span<const double> x) const { return objective(x); }
  [[nodiscard]] double f(const Point& x) const { return objective(x.coords()); }
  /// max_i (g_i(x) - u_i); -inf when there are no upper constraints.
  [[nodiscard]] double upper_residual(std::span<const double> x) const;
  [[nodiscard]] bool in_g(std::span<const double> x, double slack = 0.0) const;
  [[nodiscard]] bool in_h(std::span<const double> x) const;
  [[nodiscard]] bool in_g(const Point& x, double slack = 0.0) const { return in_g(x.coords(), slack); }
  [[nodiscard]] bool in_h(const Point& x) const { return in_h(x.coords()); }
  /// sum_i max(g_i(x) - u_i, 0).
  [[nodiscard]] double violation(std::span<const double> x) const;

  void validate() const;
};

enum class Family { Quadratic, Multiplicative, PowerG2, PowerG35 };

[[nodiscard]] std::string to_string(Family family);
[[nodiscard]] Family family_from_string(const std::string& name);
[[nodiscard]] CapacityParams default_capacity_params(Family family);

struct QuadraticInstance {
  std::size_t n = 0;
  std::size_t m_g = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd q0;
  double objective_scale = 1.0;
  std::vector<QuadraticConstraint> constraints;
  std::vector<double> thresholds;
  /// One witness per constraint; constraint j is tight at witnesses[j].
  std::vector<std::vector<double>> witnesses;
};

struct MultiplicativeInstance {
  std::size_t n = 0;
  std::size_t m_g = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd q0;
  double objective_scale = 1.0;
  std::vector<MultiplicativeConstraint> constraints;
  std::vector<double> thresholds;
  std::vector<std::vector<double>> witnesses;
};

/// Transmit-power instance: min sum p s.t. C(p, s_j) >= c_j, p in [0,1]^n.
struct PowerInstance {
  Family family = Family::PowerG2;
  std::size_t n = 0;  // towers
  std::size_t m_g = 0;  // users
  std::uint64_t seed = 0;
  CapacityParams params;
  std::vector<Position> towers;
  std::vector<Position> users;
  std::vector<double> targets;
  /// Power vector meeting every target.
  std::vector<double> witness;
};

using Instance = std::variant<QuadraticInstance, MultiplicativeInstance, PowerInstance>;

[[nodiscard]] Family family_of(const Instance& instance);
[[nodiscard]] std::uint64_t seed_of(const Instance& instance);
[[nodiscard]] std::size_t constraint_count(const Instance& instance);
[[nodiscard]] MonotoneProblem to_problem(const Instance& instance);

/// Canonical form in y = 1 - p: max sum y s.t. -C(1 - y, s_j) <= -c_j.
[[nodiscard]] MonotoneProblem to_canonical_power_problem(const PowerInstance& instance);
/// p = 1 - y, clamped into [0, 1].
[[nodiscard]] std::vector<double> power_from_canonical(std::span<const double> y);

/// Default objective scaling 1/n for the quadratic and multiplicative families.
[[nodiscard]] std::pair<MonotoneProblem, QuadraticInstance> generate_quadratic(
    std::size_t n, std::size_t m_g, std::uint64_t seed);
[[nodiscard]] std::pair<MonotoneProblem, MultiplicativeInstance> generate_multiplicative(
    std::size_t n, std::size_t m_g, std::size_t k, std::uint64_t seed);
[[nodiscard]] std::pair<MonotoneProblem, PowerInstance> generate_power(
    std::size_t n, std::size_t m_g, std::uint64_t seed, const CapacityParams& params,
    Family family = Family::PowerG2);

/// Dispatches on `family`; `k` is used by the multiplicative family only.
[[nodiscard]] Instance generate_instance(Family family, std::size_t n, std::size_t m_g,
                                         std::size_t k, std::uint64_t seed);

// Per-constraint parameter vectors z. Layout: every Q row-major, then the c
// entries (quadratic, multiplicative); tower coordinates then user coordinates
// (power).
[[nodiscard]] std::vector<double> constraint_parameters(const QuadraticConstraint& g);
[[nodiscard]] std::vector<double> constraint_parameters(const MultiplicativeConstraint& g);
[[nodiscard]] std::vector<double> constraint_parameters(const SteppedCapacityConstraint& g);
/// z of constraint j of an instance.
[[nodiscard]] std::vector<double> constraint_parameters(const Instance& instance, std::size_t j);
/// The whole instance flattened: constraint parameter vectors in order, then
/// thresholds (power: targets).
[[nodiscard]] std::vector<double> instance_parameters(const Instance& instance);

[[nodiscard]] std::size_t parameter_dimension(Family family, std::size_t n, std::size_t k);

/// Rebuilds a constraint of `family` from its z vector.
[[nodiscard]] ConstraintFn constraint_from_parameters(Family family, std::size_t n, std::size_t k,
                                                      std::span<const double> z,
                                                      const CapacityParams& params);

/// A record (x, y, z) with g_z(x) = y.
struct ConstraintSample {
  std::vector<double> x;
  double y = 0.0;
  std::vector<double> z;
};

/// `count` records from the instance's own constraints (constraint index drawn
/// uniformly), x uniform in [0, b].
[[nodiscard]] std::vector<ConstraintSample> sample_constraint_data(const Instance& instance,
                                                                   std::size_t count,
                                                                   std::uint64_t seed);

/**
 * Fresh constraints of one family, for training conditional surrogates. Each
 * draw samples new parameters z exactly as the instance generator does, and a
 * point x uniform in [0, 1]^n.
 */
class ConstraintFamilySampler {
 public:
  ConstraintFamilySampler(Family family, std::size_t n, std::size_t k);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t k() const { return k_; }
  [[nodiscard]] std::size_t z_dim() const;

  [[nodiscard]] ConstraintSample draw(std::mt19937_64& rng) const;
  [[nodiscard]] std::vector<ConstraintSample> draw_many(std::size_t count, std::mt19937_64& rng) const;
  /// Parameters of a fresh random constraint.
  [[nodiscard]] std::vector<double> draw_parameters(std::mt19937_64& rng) const;
  /// Entrywise range of z over the family.
  [[nodiscard]] std::pair<std::vector<double>, std::vector<double>> parameter_range() const;

 private:
  Family family_;
  std::size_t n_;
  std::size_t k_;
  CapacityParams params_;
};

}  // namespace monopoa

#endif  // MONOPOA_PROBLEM_HPP
