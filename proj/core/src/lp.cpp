#include "monopoa/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace monopoa::lp {

namespace {

constexpr double kTol = 1e-9;

// Row 0 of `t` is the objective row (z - c^T x = 0 form, so negative entries
// mark improving columns); column `rhs` holds right-hand sides.
class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows) {}

  Eigen::MatrixXd& t() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  [[nodiscard]] Eigen::Index rhs() const { return t_.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r - 1)] = c;
  }

  // Runs Bland's rule over columns [0, allowed). Returns Optimal, Unbounded
  // or IterationLimit.
  Status run(Eigen::Index allowed, std::size_t& pivots, std::size_t max_pivots) {
    while (true) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(0, j) < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::Optimal;
      if (pivots >= max_pivots) return Status::IterationLimit;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 1; i < t_.rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= kTol) continue;
        const double ratio = t_(i, rhs()) / a;
        if (ratio < best - kTol ||
            (ratio <= best + kTol && leave >= 0 &&
             basis_[static_cast<std::size_t>(i - 1)] < basis_[static_cast<std::size_t>(leave - 1)])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
      ++pivots;
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Result maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                std::size_t max_pivots) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp::maximize: dimension mismatch");

  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) art_rows.push_back(i);
  }
  const auto n_art = static_cast<Eigen::Index>(art_rows.size());
  // Columns: x (n), slacks (m), artificials (n_art), rhs.
  Tableau tab(m, n + m + n_art);
  auto& t = tab.t();
  const Eigen::Index rhs = tab.rhs();
  Eigen::Index next_art = n + m;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.block(i + 1, 0, 1, n) = sign * a.row(i);
    t(i + 1, n + i) = sign;
    t(i + 1, rhs) = sign * b(i);
    if (b(i) < 0.0) {
      t(i + 1, next_art) = 1.0;
      tab.basis()[static_cast<std::size_t>(i)] = next_art++;
    } else {
      tab.basis()[static_cast<std::size_t>(i)] = n + i;
    }
  }

  Result res;
  std::size_t pivots = 0;
  if (n_art > 0) {
    // Phase one: maximise -sum(artificials).
    t.row(0).setZero();
    for (Eigen::Index k = 0; k < n_art; ++k) t(0, n + m + k) = 1.0;
    for (Eigen::Index i : art_rows) t.row(0) -= t.row(i + 1);
    const Status st = tab.run(n + m + n_art, pivots, max_pivots);
    res.pivots = pivots;
    if (st == Status::IterationLimit) return res;
    if (t(0, rhs) < -kTol * (1.0 + b.cwiseAbs().maxCoeff())) {
      res.status = Status::Infeasible;
      return res;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (Eigen::Index i = 1; i <= m; ++i) {
      if (tab.basis()[static_cast<std::size_t>(i - 1)] < n + m) continue;
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (std::abs(t(i, j)) > kTol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase two over the non-artificial columns.
  t.row(0).setZero();
  t.block(0, 0, 1, n) = -c.transpose();
  for (Eigen::Index i = 1; i <= m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i - 1)];
    if (bj < n && c(bj) != 0.0) t.row(0) += c(bj) * t.row(i);
  }
  const Status st = tab.run(n + m, pivots, max_pivots);
  res.pivots = pivots;
  res.status = st;
  if (st != Status::Optimal) return res;
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 1; i <= m; ++i) {
    const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i - 1)];
    if (bj < n) res.x(bj) = t(i, rhs);
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace monopoa::lp
