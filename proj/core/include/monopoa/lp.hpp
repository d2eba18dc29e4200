#ifndef MONOPOA_LP_HPP
#define MONOPOA_LP_HPP

#include <Eigen/Dense>

#include <cstddef>

namespace monopoa::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  Eigen::VectorXd x;
  std::size_t pivots = 0;
};

/**
 * maximize c^T x  s.t.  A x <= b,  x >= 0.
 *
 * Dense two-phase tableau simplex with Bland's rule. `max_pivots` bounds the
 * total pivot count over both phases.
 */
[[nodiscard]] Result maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c, std::size_t max_pivots = 5000);

}  // namespace monopoa::lp

#endif  // MONOPOA_LP_HPP
