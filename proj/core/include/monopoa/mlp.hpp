#ifndef MONOPOA_MLP_HPP
#define MONOPOA_MLP_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace monopoa::neural {

/// One affine map. `bias` is empty for bias-free layers.
struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

/// How to draw initial weights.
enum class InitScheme {
  He,             // N(0, 2/fan_in), biases U(-0.1, 0.1)
  SignStructured  // |N(0, 1/fan_in)| oriented by the first-layer input signs
};

/**
 * Feed-forward rectifier network.
 *
 * Layers are applied in order with a rectifier between consecutive layers and,
 * when `final_rectifier` is set, after the last one too. Rectifier derivatives
 * use the right-derivative convention: a unit is active iff its pre-activation
 * is >= 0.
 *
 * A bias-free network is positively homogeneous: net(a x) = a net(x) for a > 0.
 */
class Mlp {
 public:
  /// Per-layer intermediates of a batched forward pass (columns are samples).
  struct Trace {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  };

  Mlp() = default;
  Mlp(std::vector<DenseLayer> layers, bool final_rectifier);

  /// `widths` = {input, hidden..., output}. `input_signs` orients the first
  /// layer for SignStructured init (+1, -1, or 0 for unconstrained inputs).
  static Mlp random(const std::vector<std::size_t>& widths, bool bias_free,
                    bool final_rectifier, std::mt19937_64& rng,
                    InitScheme scheme = InitScheme::He,
                    std::span<const int> input_signs = {});

  [[nodiscard]] std::size_t input_dim() const;
  [[nodiscard]] std::size_t output_dim() const;
  [[nodiscard]] std::size_t depth() const { return layers_.size(); }
  [[nodiscard]] bool bias_free() const;
  [[nodiscard]] bool final_rectifier() const { return final_rectifier_; }
  [[nodiscard]] const std::vector<DenseLayer>& layers() const { return layers_; }
  [[nodiscard]] std::vector<DenseLayer>& mutable_layers() { return layers_; }

  [[nodiscard]] Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] Eigen::VectorXd forward(std::span<const double> x) const;
  [[nodiscard]] Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs, Trace& trace) const;

  /// Accumulates dL/dtheta into `param_grad` given dL/doutput; returns dL/dinput.
  Eigen::MatrixXd backward(const Trace& trace, const Eigen::MatrixXd& grad_output,
                           Eigen::Ref<Eigen::VectorXd> param_grad) const;

  /// Exact input Jacobian (output x input) of the affine piece containing x.
  [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Gradient of a scalar-output network.
  [[nodiscard]] Eigen::VectorXd input_gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  [[nodiscard]] std::size_t parameter_count() const;
  void copy_parameters_to(Eigen::Ref<Eigen::VectorXd> out) const;
  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& params);
  [[nodiscard]] bool parameters_finite() const;

  bool operator==(const Mlp& other) const;

 private:
  void validate() const;

  std::vector<DenseLayer> layers_;
  bool final_rectifier_ = false;
};

/**
 * Monotone regulariser over sample points (columns of `points`):
 *
 *   R = -c * mean_p sum_k sum_{j : s_j != 0} min(s_j * dnet_k/dx_j (p), eta)
 *
 * Parameter gradients hold each point's activation pattern fixed. Returns R
 * and adds dR/dtheta to `param_grad`.
 */
double monotone_penalty(const Mlp& net, const Eigen::MatrixXd& points,
                        std::span<const int> signs, double eta, double c,
                        Eigen::Ref<Eigen::VectorXd> param_grad);

/// A sub-network that should be monotone on a box, with per-input direction
/// (+1 increasing, -1 decreasing, 0 unconstrained).
struct MonotoneTower {
  const Mlp* net = nullptr;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> signs;
  std::string name;
  /// Start of this tower's block in the owning model's parameter vector.
  std::size_t param_offset = 0;
};

/// Layers [2k, 2k+1] of `net` as a stand-alone network without a final
/// rectifier (the k-th two-layer block).
[[nodiscard]] Mlp block_of(const Mlp& net, std::size_t k);

/// Offset of layer `l`'s parameters in the network's parameter vector.
[[nodiscard]] std::size_t layer_parameter_offset(const Mlp& net, std::size_t l);

/**
 * Block-wise form of monotone_penalty: every two-layer block of `tower.net`
 * is penalised at its own inputs (the forward activations of `points`), with
 * `tower.signs` on the first block and +1 on later ones. Activations feeding
 * later blocks are treated as constants. Gradients go to
 * param_grad[tower.param_offset ...].
 */
double block_monotone_penalty(const MonotoneTower& tower, const Eigen::MatrixXd& points,
                              double eta, double c, Eigen::Ref<Eigen::VectorXd> param_grad);

}  // namespace monopoa::neural

#endif  // MONOPOA_MLP_HPP
