#include "monopoa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "monopoa/hmri.hpp"

namespace monopoa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double quadratic_form(const Eigen::MatrixXd& q, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (q.rows() != n || q.cols() != n) throw DimensionMismatch("quadratic form dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) row += q(i, j) * x[static_cast<std::size_t>(j)];
    s += x[static_cast<std::size_t>(i)] * row;
  }
  return s;
}

double dot(const Eigen::VectorXd& c, std::span<const double> x) {
  if (c.size() != static_cast<Eigen::Index>(x.size())) throw DimensionMismatch("linear term dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += c(static_cast<Eigen::Index>(i)) * x[i];
  return s;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, std::size_t n) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = uniform(rng, 0.0, 1.0);
  }
  return m;
}

std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Position uniform_position(std::mt19937_64& rng) {
  return {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
}

QuadraticConstraint random_quadratic(std::mt19937_64& rng, std::size_t n) {
  QuadraticConstraint g;
  g.q = uniform_matrix(rng, n);
  g.c = to_eigen(uniform_vector(rng, n, 0.0, 1.0));
  return g;
}

MultiplicativeConstraint random_multiplicative(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  MultiplicativeConstraint g;
  for (std::size_t i = 0; i < k; ++i) {
    g.q.push_back(uniform_matrix(rng, n));
    g.c.push_back(uniform(rng, 0.0, 1.0));
  }
  return g;
}

ScalarFn scaled_quadratic_objective(Eigen::MatrixXd q0, double scale) {
  return [q0 = std::move(q0), scale](std::span<const double> x) {
    return scale * quadratic_form(q0, x);
  };
}

void append_row_major(std::vector<double>& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
}

Eigen::MatrixXd read_row_major(std::span<const double> z, std::size_t& off, std::size_t n) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = z[off++];
  }
  return m;
}

}  // namespace

double capacity(std::span<const double> power, const std::vector<Position>& towers,
                const Position& user, const CapacityParams& params) {
  if (power.size() != towers.size()) throw DimensionMismatch("capacity: one power per tower");
  double received = 0.0;
  for (std::size_t i = 0; i < towers.size(); ++i) {
    const double p = std::max(power[i], 0.0);
    if (p == 0.0) continue;
    const double dist = std::hypot(towers[i][0] - user[0], towers[i][1] - user[1]);
    received += p * std::pow(dist + params.d0, -params.gamma);
  }
  const double rate = std::log2(1.0 + received / params.noise);
  return params.quantum * std::floor(rate / params.quantum);
}

double eval_constraint(const ConstraintFn& g, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const QuadraticConstraint& c) { return quadratic_form(c.q, x) + dot(c.c, x); },
          [&](const MultiplicativeConstraint& c) {
            double prod = 1.0;
            for (std::size_t i = 0; i < c.q.size(); ++i) prod *= quadratic_form(c.q[i], x) + c.c[i];
            return prod;
          },
          [&](const SteppedCapacityConstraint& c) {
            if (!c.negated) return capacity(x, c.towers, c.user, c.params);
            std::vector<double> p(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) p[i] = 1.0 - x[i];
            return -capacity(p, c.towers, c.user, c.params);
          },
          [&](const LearnedConstraint& c) {
            if (!c.model) throw std::invalid_argument("learned constraint without a model");
            return c.model->value(x, c.z);
          },
          [&](const CustomConstraint& c) { return c.fn(x); },
      },
      g);
}

double MonotoneProblem::upper_residual(std::span<const double> x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < upper.size(); ++i) {
    worst = std::max(worst, eval_constraint(upper[i], x) - upper_thresholds[i]);
  }
  return worst;
}

bool MonotoneProblem::in_g(std::span<const double> x, double slack) const {
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (eval_constraint(upper[i], x) > upper_thresholds[i] + slack) return false;
  }
  return true;
}

bool MonotoneProblem::in_h(std::span<const double> x) const {
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (eval_constraint(lower[j], x) < lower_thresholds[j]) return false;
  }
  return true;
}

double MonotoneProblem::violation(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    total += std::max(eval_constraint(upper[i], x) - upper_thresholds[i], 0.0);
  }
  return total;
}

void MonotoneProblem::validate() const {
  if (!objective) throw std::invalid_argument("problem has no objective");
  if (bound.size() != n) throw DimensionMismatch("problem bound has the wrong dimension");
  if (upper.size() != upper_thresholds.size() || lower.size() != lower_thresholds.size()) {
    throw std::invalid_argument("one threshold per constraint is required");
  }
}

std::string to_string(Family family) {
  switch (family) {
    case Family::Quadratic: return "quadratic";
    case Family::Multiplicative: return "multiplicative";
    case Family::PowerG2: return "power_g2";
    case Family::PowerG35: return "power_g35";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "quadratic") return Family::Quadratic;
  if (name == "multiplicative") return Family::Multiplicative;
  if (name == "power_g2" || name == "power") return Family::PowerG2;
  if (name == "power_g35") return Family::PowerG35;
  throw std::invalid_argument("unknown problem family '" + name + "'");
}

CapacityParams default_capacity_params(Family family) {
  CapacityParams p;
  if (family == Family::PowerG35) p.gamma = 3.5;
  return p;
}

Family family_of(const Instance& instance) {
  return std::visit(Overloaded{[](const QuadraticInstance&) { return Family::Quadratic; },
                               [](const MultiplicativeInstance&) { return Family::Multiplicative; },
                               [](const PowerInstance& p) { return p.family; }},
                    instance);
}

std::uint64_t seed_of(const Instance& instance) {
  return std::visit([](const auto& inst) { return inst.seed; }, instance);
}

std::size_t constraint_count(const Instance& instance) {
  return std::visit([](const auto& inst) { return inst.m_g; }, instance);
}

MonotoneProblem to_problem(const Instance& instance) {
  return std::visit(
      Overloaded{
          [](const QuadraticInstance& inst) {
            MonotoneProblem p;
            p.n = inst.n;
            p.objective = scaled_quadratic_objective(inst.q0, inst.objective_scale);
            for (const auto& g : inst.constraints) p.upper.emplace_back(g);
            p.upper_thresholds = inst.thresholds;
            p.bound = Point::filled(inst.n, 1.0);
            return p;
          },
          [](const MultiplicativeInstance& inst) {
            MonotoneProblem p;
            p.n = inst.n;
            p.objective = scaled_quadratic_objective(inst.q0, inst.objective_scale);
            for (const auto& g : inst.constraints) p.upper.emplace_back(g);
            p.upper_thresholds = inst.thresholds;
            p.bound = Point::filled(inst.n, 1.0);
            return p;
          },
          [](const PowerInstance& inst) { return to_canonical_power_problem(inst); },
      },
      instance);
}

MonotoneProblem to_canonical_power_problem(const PowerInstance& instance) {
  MonotoneProblem p;
  p.n = instance.n;
  p.objective = [](std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v;
    return s;
  };
  for (std::size_t j = 0; j < instance.m_g; ++j) {
    p.upper.emplace_back(
        SteppedCapacityConstraint{instance.towers, instance.users[j], instance.params, true});
    p.upper_thresholds.push_back(-instance.targets[j]);
  }
  p.bound = Point::filled(instance.n, 1.0);
  return p;
}

std::vector<double> power_from_canonical(std::span<const double> y) {
  std::vector<double> p(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::clamp(1.0 - y[i], 0.0, 1.0);
  return p;
}

std::pair<MonotoneProblem, QuadraticInstance> generate_quadratic(std::size_t n, std::size_t m_g,
                                                                 std::uint64_t seed) {
  if (n == 0 || m_g == 0) throw std::invalid_argument("generate_quadratic needs n >= 1 and m_g >= 1");
  std::mt19937_64 rng(seed);
  QuadraticInstance inst;
  inst.n = n;
  inst.m_g = m_g;
  inst.seed = seed;
  inst.q0 = uniform_matrix(rng, n);
  inst.objective_scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < m_g; ++j) {
    auto g = random_quadratic(rng, n);
    auto w = uniform_vector(rng, n, 0.0, 0.5);
    inst.thresholds.push_back(eval_constraint(ConstraintFn{g}, w));
    inst.constraints.push_back(std::move(g));
    inst.witnesses.push_back(std::move(w));
  }
  return {to_problem(Instance{inst}), inst};
}

std::pair<MonotoneProblem, MultiplicativeInstance> generate_multiplicative(std::size_t n,
                                                                           std::size_t m_g,
                                                                           std::size_t k,
                                                                           std::uint64_t seed) {
  if (n == 0 || m_g == 0 || k == 0) {
    throw std::invalid_argument("generate_multiplicative needs n, m_g, k >= 1");
  }
  std::mt19937_64 rng(seed);
  MultiplicativeInstance inst;
  inst.n = n;
  inst.m_g = m_g;
  inst.k = k;
  inst.seed = seed;
  inst.q0 = uniform_matrix(rng, n);
  inst.objective_scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < m_g; ++j) {
    auto g = random_multiplicative(rng, n, k);
    auto w = uniform_vector(rng, n, 0.0, 0.5);
    inst.thresholds.push_back(eval_constraint(ConstraintFn{g}, w));
    inst.constraints.push_back(std::move(g));
    inst.witnesses.push_back(std::move(w));
  }
  return {to_problem(Instance{inst}), inst};
}

std::pair<MonotoneProblem, PowerInstance> generate_power(std::size_t n, std::size_t m_g,
                                                         std::uint64_t seed,
                                                         const CapacityParams& params,
                                                         Family family) {
  if (n == 0 || m_g == 0) throw std::invalid_argument("generate_power needs n >= 1 and m_g >= 1");
  if (family != Family::PowerG2 && family != Family::PowerG35) {
    throw std::invalid_argument("generate_power needs a power family tag");
  }
  std::mt19937_64 rng(seed);
  PowerInstance inst;
  inst.family = family;
  inst.n = n;
  inst.m_g = m_g;
  inst.seed = seed;
  inst.params = params;
  for (std::size_t i = 0; i < n; ++i) inst.towers.push_back(uniform_position(rng));
  for (std::size_t j = 0; j < m_g; ++j) inst.users.push_back(uniform_position(rng));
  inst.witness = uniform_vector(rng, n, 0.5, 1.0);
  for (std::size_t j = 0; j < m_g; ++j) {
    inst.targets.push_back(capacity(inst.witness, inst.towers, inst.users[j], params));
  }
  return {to_canonical_power_problem(inst), inst};
}

Instance generate_instance(Family family, std::size_t n, std::size_t m_g, std::size_t k,
                           std::uint64_t seed) {
  switch (family) {
    case Family::Quadratic: return generate_quadratic(n, m_g, seed).second;
    case Family::Multiplicative: return generate_multiplicative(n, m_g, k, seed).second;
    case Family::PowerG2:
    case Family::PowerG35:
      return generate_power(n, m_g, seed, default_capacity_params(family), family).second;
  }
  throw std::invalid_argument("unknown family");
}

std::vector<double> constraint_parameters(const QuadraticConstraint& g) {
  std::vector<double> z;
  append_row_major(z, g.q);
  for (Eigen::Index i = 0; i < g.c.size(); ++i) z.push_back(g.c(i));
  return z;
}

std::vector<double> constraint_parameters(const MultiplicativeConstraint& g) {
  std::vector<double> z;
  for (const auto& q : g.q) append_row_major(z, q);
  z.insert(z.end(), g.c.begin(), g.c.end());
  return z;
}

std::vector<double> constraint_parameters(const SteppedCapacityConstraint& g) {
  std::vector<double> z;
  for (const auto& t : g.towers) z.insert(z.end(), t.begin(), t.end());
  z.insert(z.end(), g.user.begin(), g.user.end());
  return z;
}

std::vector<double> constraint_parameters(const Instance& instance, std::size_t j) {
  if (j >= constraint_count(instance)) throw std::out_of_range("constraint index out of range");
  return std::visit(
      Overloaded{
          [j](const QuadraticInstance& inst) { return constraint_parameters(inst.constraints[j]); },
          [j](const MultiplicativeInstance& inst) {
            return constraint_parameters(inst.constraints[j]);
          },
          [j](const PowerInstance& inst) {
            return constraint_parameters(
                SteppedCapacityConstraint{inst.towers, inst.users[j], inst.params, true});
          },
      },
      instance);
}

std::vector<double> instance_parameters(const Instance& instance) {
  std::vector<double> out;
  const auto m = constraint_count(instance);
  for (std::size_t j = 0; j < m; ++j) {
    auto z = constraint_parameters(instance, j);
    out.insert(out.end(), z.begin(), z.end());
  }
  std::visit(Overloaded{[&](const PowerInstance& inst) {
                          out.insert(out.end(), inst.targets.begin(), inst.targets.end());
                        },
                        [&](const auto& inst) {
                          out.insert(out.end(), inst.thresholds.begin(), inst.thresholds.end());
                        }},
             instance);
  return out;
}

std::size_t parameter_dimension(Family family, std::size_t n, std::size_t k) {
  switch (family) {
    case Family::Quadratic: return n * n + n;
    case Family::Multiplicative: return k * (n * n + 1);
    case Family::PowerG2:
    case Family::PowerG35: return 2 * n + 2;
  }
  return 0;
}

ConstraintFn constraint_from_parameters(Family family, std::size_t n, std::size_t k,
                                        std::span<const double> z, const CapacityParams& params) {
  if (z.size() != parameter_dimension(family, n, k)) {
    throw DimensionMismatch("parameter vector has the wrong length for the family");
  }
  std::size_t off = 0;
  switch (family) {
    case Family::Quadratic: {
      QuadraticConstraint g;
      g.q = read_row_major(z, off, n);
      g.c.resize(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < g.c.size(); ++i) g.c(i) = z[off++];
      return g;
    }
    case Family::Multiplicative: {
      MultiplicativeConstraint g;
      for (std::size_t i = 0; i < k; ++i) g.q.push_back(read_row_major(z, off, n));
      for (std::size_t i = 0; i < k; ++i) g.c.push_back(z[off++]);
      return g;
    }
    case Family::PowerG2:
    case Family::PowerG35: {
      SteppedCapacityConstraint g;
      g.params = params;
      g.negated = true;
      for (std::size_t i = 0; i < n; ++i) {
        g.towers.push_back({z[off], z[off + 1]});
        off += 2;
      }
      g.user = {z[off], z[off + 1]};
      return g;
    }
  }
  throw std::invalid_argument("unknown family");
}

std::vector<ConstraintSample> sample_constraint_data(const Instance& instance, std::size_t count,
                                                     std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample_constraint_data needs count >= 1");
  const auto problem = to_problem(instance);
  const auto m = constraint_count(instance);
  std::vector<std::vector<double>> params(m);
  for (std::size_t j = 0; j < m; ++j) params[j] = constraint_parameters(instance, j);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<ConstraintSample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const auto j = pick(rng);
    ConstraintSample rec;
    rec.x.resize(problem.n);
    for (std::size_t i = 0; i < problem.n; ++i) rec.x[i] = uniform(rng, 0.0, problem.bound[i]);
    rec.y = eval_constraint(problem.upper[j], rec.x);
    rec.z = params[j];
    out.push_back(std::move(rec));
  }
  return out;
}

ConstraintFamilySampler::ConstraintFamilySampler(Family family, std::size_t n, std::size_t k)
    : family_(family), n_(n), k_(k), params_(default_capacity_params(family)) {
  if (n == 0) throw std::invalid_argument("sampler needs n >= 1");
  if (family == Family::Multiplicative && k == 0) throw std::invalid_argument("sampler needs k >= 1");
}

std::size_t ConstraintFamilySampler::z_dim() const { return parameter_dimension(family_, n_, k_); }

std::vector<double> ConstraintFamilySampler::draw_parameters(std::mt19937_64& rng) const {
  switch (family_) {
    case Family::Quadratic: return constraint_parameters(random_quadratic(rng, n_));
    case Family::Multiplicative: return constraint_parameters(random_multiplicative(rng, n_, k_));
    case Family::PowerG2:
    case Family::PowerG35: {
      SteppedCapacityConstraint g;
      for (std::size_t i = 0; i < n_; ++i) g.towers.push_back(uniform_position(rng));
      g.user = uniform_position(rng);
      return constraint_parameters(g);
    }
  }
  throw std::invalid_argument("unknown family");
}

ConstraintSample ConstraintFamilySampler::draw(std::mt19937_64& rng) const {
  ConstraintSample rec;
  rec.z = draw_parameters(rng);
  rec.x = uniform_vector(rng, n_, 0.0, 1.0);
  rec.y = eval_constraint(constraint_from_parameters(family_, n_, k_, rec.z, params_), rec.x);
  return rec;
}

std::vector<ConstraintSample> ConstraintFamilySampler::draw_many(std::size_t count,
                                                                 std::mt19937_64& rng) const {
  std::vector<ConstraintSample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(draw(rng));
  return out;
}

std::pair<std::vector<double>, std::vector<double>> ConstraintFamilySampler::parameter_range() const {
  const auto d = z_dim();
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

}  // namespace monopoa
