#include "monopoa/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace monopoa::neural {

namespace {

Eigen::MatrixXd rectify(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

Eigen::MatrixXd active_mask(const Eigen::MatrixXd& pre) {
  return (pre.array() >= 0.0).cast<double>().matrix();
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers, bool final_rectifier)
    : layers_(std::move(layers)), final_rectifier_(final_rectifier) {
  validate();
}

void Mlp::validate() const {
  if (layers_.empty()) throw std::invalid_argument("Mlp needs at least one layer");
  const bool first_bias_free = layers_.front().bias.size() == 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0) {
      throw std::invalid_argument("Mlp layer with empty weight matrix");
    }
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
      throw std::invalid_argument("Mlp layer widths do not chain");
    }
    const bool bias_free = layer.bias.size() == 0;
    if (bias_free != first_bias_free) {
      throw std::invalid_argument("Mlp layers must be uniformly biased or bias-free");
    }
    if (!bias_free && layer.bias.size() != layer.weight.rows()) {
      throw std::invalid_argument("Mlp bias size does not match layer width");
    }
  }
}

Mlp Mlp::random(const std::vector<std::size_t>& widths, bool bias_free, bool final_rectifier,
                std::mt19937_64& rng, InitScheme scheme, std::span<const int> input_signs) {
  if (widths.size() < 2) throw std::invalid_argument("Mlp::random needs input and output widths");
  if (!input_signs.empty() && input_signs.size() != widths.front()) {
    throw std::invalid_argument("input_signs size must match the input width");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> bias_dist(-0.1, 0.1);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto fan_in = static_cast<double>(widths[l]);
    DenseLayer layer;
    layer.weight.resize(static_cast<Eigen::Index>(widths[l + 1]), static_cast<Eigen::Index>(widths[l]));
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        double w = normal(rng);
        if (scheme == InitScheme::He) {
          w *= std::sqrt(2.0 / fan_in);
        } else {
          int sign = 1;
          if (l == 0 && !input_signs.empty()) sign = input_signs[static_cast<std::size_t>(c)];
          w = sign == 0 ? w * std::sqrt(1.0 / fan_in) : sign * std::abs(w) * 1.25 / fan_in;
        }
        layer.weight(r, c) = w;
      }
    }
    if (!bias_free) {
      layer.bias.resize(layer.weight.rows());
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = bias_dist(rng);
    }
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers), final_rectifier);
}

std::size_t Mlp::input_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t Mlp::output_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

bool Mlp::bias_free() const { return layers_.empty() || layers_.front().bias.size() == 0; }

Eigen::VectorXd Mlp::forward(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  }
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd pre = layers_[l].weight * a;
    if (layers_[l].bias.size()) pre += layers_[l].bias;
    const bool rect = l + 1 < layers_.size() || final_rectifier_;
    a = rect ? Eigen::VectorXd(pre.cwiseMax(0.0)) : pre;
  }
  return a;
}

Eigen::VectorXd Mlp::forward(std::span<const double> x) const {
  return forward(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  Trace unused;
  return forward_batch(inputs, unused);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs, Trace& trace) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw std::invalid_argument("Mlp::forward_batch: input dimension mismatch");
  }
  trace.inputs.clear();
  trace.pre.clear();
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    trace.inputs.push_back(a);
    Eigen::MatrixXd pre = layers_[l].weight * a;
    if (layers_[l].bias.size()) pre.colwise() += layers_[l].bias;
    trace.pre.push_back(pre);
    const bool rect = l + 1 < layers_.size() || final_rectifier_;
    a = rect ? rectify(pre) : pre;
  }
  return a;
}

Eigen::MatrixXd Mlp::backward(const Trace& trace, const Eigen::MatrixXd& grad_output,
                              Eigen::Ref<Eigen::VectorXd> param_grad) const {
  if (static_cast<std::size_t>(param_grad.size()) != parameter_count()) {
    throw std::invalid_argument("Mlp::backward: gradient buffer has wrong size");
  }
  // Parameter offsets, layer by layer: weight (column-major) then bias.
  std::vector<Eigen::Index> offsets(layers_.size());
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offsets[l] = off;
    off += layers_[l].weight.size() + layers_[l].bias.size();
  }

  Eigen::MatrixXd delta = grad_output;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    const bool rect = li + 1 < layers_.size() || final_rectifier_;
    if (rect) delta = delta.cwiseProduct(active_mask(trace.pre[li]));
    Eigen::Map<Eigen::MatrixXd> gw(param_grad.data() + offsets[li], layer.weight.rows(),
                                   layer.weight.cols());
    gw.noalias() += delta * trace.inputs[li].transpose();
    if (layer.bias.size()) {
      Eigen::Map<Eigen::VectorXd> gb(param_grad.data() + offsets[li] + layer.weight.size(),
                                     layer.bias.size());
      gb += delta.rowwise().sum();
    }
    delta = layer.weight.transpose() * delta;
  }
  return delta;
}

Eigen::MatrixXd Mlp::jacobian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) {
    throw std::invalid_argument("Mlp::jacobian: input dimension mismatch");
  }
  Eigen::VectorXd a = x;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(x.size(), x.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd pre = layers_[l].weight * a;
    if (layers_[l].bias.size()) pre += layers_[l].bias;
    jac = layers_[l].weight * jac;
    const bool rect = l + 1 < layers_.size() || final_rectifier_;
    if (rect) {
      for (Eigen::Index r = 0; r < pre.size(); ++r) {
        if (pre(r) < 0.0) jac.row(r).setZero();
      }
      a = pre.cwiseMax(0.0);
    } else {
      a = pre;
    }
  }
  return jac;
}

Eigen::VectorXd Mlp::input_gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (output_dim() != 1) throw std::invalid_argument("input_gradient needs a scalar-output network");
  return jacobian(x).row(0).transpose();
}

std::size_t Mlp::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return count;
}

void Mlp::copy_parameters_to(Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<std::size_t>(out.size()) != parameter_count()) {
    throw std::invalid_argument("Mlp::copy_parameters_to: wrong buffer size");
  }
  Eigen::Index off = 0;
  for (const auto& layer : layers_) {
    out.segment(off, layer.weight.size()) =
        Eigen::Map<const Eigen::VectorXd>(layer.weight.data(), layer.weight.size());
    off += layer.weight.size();
    if (layer.bias.size()) {
      out.segment(off, layer.bias.size()) = layer.bias;
      off += layer.bias.size();
    }
  }
}

void Mlp::set_parameters(const Eigen::Ref<const Eigen::VectorXd>& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) {
    throw std::invalid_argument("Mlp::set_parameters: wrong parameter count");
  }
  Eigen::Index off = 0;
  for (auto& layer : layers_) {
    Eigen::Map<Eigen::VectorXd>(layer.weight.data(), layer.weight.size()) =
        params.segment(off, layer.weight.size());
    off += layer.weight.size();
    if (layer.bias.size()) {
      layer.bias = params.segment(off, layer.bias.size());
      off += layer.bias.size();
    }
  }
}

bool Mlp::parameters_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool Mlp::operator==(const Mlp& other) const {
  if (final_rectifier_ != other.final_rectifier_ || layers_.size() != other.layers_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l];
    const auto& b = other.layers_[l];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.bias.size() != b.bias.size()) {
      return false;
    }
    if (a.weight != b.weight || a.bias != b.bias) return false;
  }
  return true;
}

double monotone_penalty(const Mlp& net, const Eigen::MatrixXd& points, std::span<const int> signs,
                        double eta, double c, Eigen::Ref<Eigen::VectorXd> param_grad) {
  const auto in = static_cast<Eigen::Index>(net.input_dim());
  if (points.rows() != in || static_cast<Eigen::Index>(signs.size()) != in) {
    throw std::invalid_argument("monotone_penalty: dimension mismatch");
  }
  if (points.cols() == 0 || c == 0.0) return 0.0;

  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < in; ++j) {
    if (signs[static_cast<std::size_t>(j)] != 0) cols.push_back(j);
  }
  if (cols.empty()) return 0.0;
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Eigen::VectorXd col_sign(nc);
  for (Eigen::Index q = 0; q < nc; ++q) col_sign(q) = signs[static_cast<std::size_t>(cols[q])];

  const auto& layers = net.layers();
  const std::size_t depth = layers.size();
  std::vector<Eigen::Index> offsets(depth);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < depth; ++l) {
    offsets[l] = off;
    off += layers[l].weight.size() + layers[l].bias.size();
  }

  const double scale = c / static_cast<double>(points.cols());
  double total = 0.0;
  std::vector<Eigen::VectorXd> masks(depth);
  // prefix[l] = D_l W_l ... D_1 W_1 restricted to constrained input columns;
  // prefix[0] is the column selection itself.
  std::vector<Eigen::MatrixXd> prefix(depth + 1);

  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    Eigen::VectorXd a = points.col(p);
    prefix[0] = Eigen::MatrixXd::Zero(in, nc);
    for (Eigen::Index q = 0; q < nc; ++q) prefix[0](cols[q], q) = 1.0;
    for (std::size_t l = 0; l < depth; ++l) {
      Eigen::VectorXd pre = layers[l].weight * a;
      if (layers[l].bias.size()) pre += layers[l].bias;
      const bool rect = l + 1 < depth || net.final_rectifier();
      masks[l] = rect ? Eigen::VectorXd((pre.array() >= 0.0).cast<double>())
                      : Eigen::VectorXd::Ones(pre.size());
      a = rect ? Eigen::VectorXd(pre.cwiseMax(0.0)) : pre;
      prefix[l + 1] = masks[l].asDiagonal() * (layers[l].weight * prefix[l]);
    }
    const Eigen::MatrixXd& jac = prefix[depth];  // out x nc

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(jac.rows(), nc);
    for (Eigen::Index k = 0; k < jac.rows(); ++k) {
      for (Eigen::Index q = 0; q < nc; ++q) {
        const double v = col_sign(q) * jac(k, q);
        if (v < eta) {
          total -= scale * v;
          g(k, q) = -scale * col_sign(q);
        } else {
          total -= scale * eta;
        }
      }
    }
    // Backward through the fixed pattern: gbar_l = D_l W_{l+1}^T gbar_{l+1}.
    Eigen::MatrixXd gbar = masks[depth - 1].asDiagonal() * g;
    for (std::size_t li = depth; li-- > 0;) {
      Eigen::Map<Eigen::MatrixXd> gw(param_grad.data() + offsets[li], layers[li].weight.rows(),
                                     layers[li].weight.cols());
      gw.noalias() += gbar * prefix[li].transpose();
      if (li > 0) gbar = masks[li - 1].asDiagonal() * (layers[li].weight.transpose() * gbar);
    }
  }
  return total;
}

}  // namespace monopoa::neural

namespace monopoa::neural {

Mlp block_of(const Mlp& net, std::size_t k) {
  const auto& layers = net.layers();
  if (2 * k + 1 >= layers.size()) throw std::out_of_range("block index out of range");
  return Mlp({layers[2 * k], layers[2 * k + 1]}, false);
}

std::size_t layer_parameter_offset(const Mlp& net, std::size_t l) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < l && i < net.layers().size(); ++i) {
    off += static_cast<std::size_t>(net.layers()[i].weight.size() + net.layers()[i].bias.size());
  }
  return off;
}

double block_monotone_penalty(const MonotoneTower& tower, const Eigen::MatrixXd& points,
                              double eta, double c, Eigen::Ref<Eigen::VectorXd> param_grad) {
  const Mlp& net = *tower.net;
  if (net.depth() % 2 != 0) throw std::invalid_argument("block penalty needs an even layer count");
  Mlp::Trace trace;
  (void)net.forward_batch(points, trace);
  double total = 0.0;
  for (std::size_t k = 0; 2 * k < net.depth(); ++k) {
    const Mlp block = block_of(net, k);
    std::vector<int> signs = tower.signs;
    if (k > 0) signs.assign(block.input_dim(), 1);
    const auto off = tower.param_offset + layer_parameter_offset(net, 2 * k);
    const auto len = static_cast<Eigen::Index>(block.parameter_count());
    total += monotone_penalty(block, trace.inputs[2 * k], signs, eta, c,
                              param_grad.segment(static_cast<Eigen::Index>(off), len));
  }
  return total;
}

}  // namespace monopoa::neural
