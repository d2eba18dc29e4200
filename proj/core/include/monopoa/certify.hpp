#ifndef MONOPOA_CERTIFY_HPP
#define MONOPOA_CERTIFY_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "monopoa/hmri.hpp"
#include "monopoa/mlp.hpp"

namespace monopoa::certify {

struct CertifyConfig {
  std::vector<double> lo;  // input domain box
  std::vector<double> hi;
  /// Direction per input: +1 increasing, -1 decreasing, 0 free. Empty means
  /// all +1.
  std::vector<int> signs;
  double delta = 0.0;  // smallest permitted signed gradient
  double tau = 0.0;    // regions thinner than this (per neuron margin tau*|w_j|_1) are exempt
  std::size_t max_width = 20;
  /// Skip subtrees whose gradient lower bound already clears delta.
  bool bound_pruning = true;
  bool stop_at_first = false;
  std::size_t max_counterexamples = 16;
  std::size_t max_pivots = 5000;

  void validate(std::size_t input_dim) const;
};

struct Counterexample {
  std::size_t block = 0;
  std::vector<int> pattern;       // 0/1 per hidden unit of the block
  std::vector<double> witness;    // block input inside the region
  std::size_t output = 0;
  std::size_t coordinate = 0;
  double gradient = 0.0;          // signed: sign_i * dout/din_i
};

/**
 * Region accounting: every pattern lands in exactly one of checked (region
 * feasible, gradient evaluated and either clean or a counterexample),
 * skipped_by_tau (violating but too thin), infeasible (empty or without
 * interior), bounded (in a subtree whose gradient bound cleared delta), so
 * the four add to 2^width per block when enumeration runs to completion.
 * `unknown` counts LPs that hit the pivot cap; those regions were treated as
 * feasible.
 */
struct CertReport {
  bool certified = true;
  std::vector<Counterexample> counterexamples;
  std::uint64_t regions_checked = 0;
  std::uint64_t regions_skipped_by_tau = 0;
  std::uint64_t regions_infeasible = 0;
  std::uint64_t regions_bounded = 0;
  std::uint64_t regions_unknown = 0;
  std::uint64_t lp_solves = 0;
  std::size_t blocks = 0;
  /// Smallest signed gradient per input of the first block found on
  /// evaluated regions (bounds for pruned subtrees); +inf when nothing seen.
  std::vector<double> margins;
  bool complete = true;  // false when stopped at the first counterexample

  [[nodiscard]] std::uint64_t regions_total() const {
    return regions_checked + regions_skipped_by_tau + regions_infeasible + regions_bounded;
  }
  void merge(const CertReport& other);
};

enum class RegionStatus { Feasible, Infeasible, Unknown };

struct RegionResult {
  RegionStatus status = RegionStatus::Infeasible;
  std::vector<double> witness;  // maximally interior point when feasible
  double slack = 0.0;
};

/**
 * Is {x in [lo, hi] : w_j.x + b_j >= m_j for active j, <= -m_j otherwise}
 * nonempty with interior? `pattern[j]` is 1 (active), 0 (inactive) or -1
 * (unconstrained). Solves the max-slack LP; a pivot-cap hit returns Unknown.
 */
[[nodiscard]] RegionResult region_feasible(const std::vector<int>& pattern, const Eigen::MatrixXd& w,
                                           const Eigen::VectorXd& b, const std::vector<double>& lo,
                                           const std::vector<double>& hi,
                                           const std::vector<double>& margins,
                                           std::size_t max_pivots = 5000);

/// Block must be exactly two layers (one hidden rectifier).
[[nodiscard]] CertReport certify_two_layer(const neural::Mlp& block, const CertifyConfig& cfg);

/// Boxes of every layer's rectified output under [lo, hi] inputs.
[[nodiscard]] std::vector<std::pair<std::vector<double>, std::vector<double>>> propagate_intervals(
    const neural::Mlp& net, const std::vector<double>& lo, const std::vector<double>& hi);

/// Each consecutive layer pair is certified over its propagated input box;
/// cfg.signs applies to the first block, later blocks use +1.
[[nodiscard]] CertReport certify_deep(const neural::Mlp& net, const CertifyConfig& cfg);

/// Every monotone tower of a model, over the tower's own domain and signs.
[[nodiscard]] CertReport certify_model(const neural::TrainableModel& model, double delta, double tau,
                                       std::size_t max_width = 20, bool stop_at_first = false);

}  // namespace monopoa::certify

#endif  // MONOPOA_CERTIFY_HPP
