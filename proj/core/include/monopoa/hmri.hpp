#ifndef MONOPOA_HMRI_HPP
#define MONOPOA_HMRI_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "monopoa/mlp.hpp"

namespace monopoa::neural {

/// Value transform applied to constraint values before normalisation.
enum class ValueTransform { Identity, Log };

/// Normalisation of constraint values and parameter vectors z into [0, 1].
struct InputScaling {
  std::size_t n = 0;
  std::vector<double> x_hi;  // domain of x is [0, x_hi]
  std::vector<double> z_lo;
  std::vector<double> z_hi;
  double t_lo = 0.0;  // range of transform(y) over the training distribution
  double t_hi = 1.0;
  ValueTransform transform = ValueTransform::Identity;

  [[nodiscard]] double transform_value(double y) const;
  [[nodiscard]] double inverse_transform(double t) const;
  [[nodiscard]] double normalize_value(double y) const;
  [[nodiscard]] double denormalize_value(double v) const;
  [[nodiscard]] double normalize_z(std::size_t i, double z) const;
  [[nodiscard]] std::size_t z_dim() const { return z_lo.size(); }

  bool operator==(const InputScaling&) const = default;
};

/// One training record. For radial-inverse models `target` is the desired
/// phi(x, y); constraint models regress onto y and ignore it.
struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;
  std::vector<double> z;
  double target = 1.0;
};

struct LossConfig {
  double beta = 1.0;  // weight of the one-sided overshoot term
};

/// Interface the trainer and certifier see.
class TrainableModel {
 public:
  virtual ~TrainableModel() = default;

  [[nodiscard]] virtual std::size_t parameter_count() const = 0;
  [[nodiscard]] virtual Eigen::VectorXd parameters() const = 0;
  virtual void set_parameters(const Eigen::VectorXd& params) = 0;

  /// Mean of E^2 + beta (E^+)^2 over the batch; adds its gradient to `grad`.
  virtual double data_loss(const std::vector<LabeledSample>& batch, const LossConfig& cfg,
                           Eigen::Ref<Eigen::VectorXd> grad) const = 0;
  /// Model prediction compared against the loss target (phi for radial
  /// inverses, the normalised constraint value for constraint models).
  [[nodiscard]] virtual double prediction(const LabeledSample& s) const = 0;
  [[nodiscard]] virtual double loss_target(const LabeledSample& s) const = 0;

  /// Towers that are regularised and certified; empty for unconstrained models.
  [[nodiscard]] virtual std::vector<MonotoneTower> monotone_towers() const = 0;
};

enum class RiVariant { HmRi, HRi, MRi, Ri };

[[nodiscard]] std::string to_string(RiVariant v);
[[nodiscard]] RiVariant variant_from_string(const std::string& name);
/// psi bias-free with inputs [x, |x|_1 z]: phi(a x, y) = a phi(x, y).
[[nodiscard]] bool is_homogeneous(RiVariant v);
/// Towers trained with the monotone regulariser and certified.
[[nodiscard]] bool is_monotone(RiVariant v);
/// Variants without architectural homogeneity learn it from augmented data.
[[nodiscard]] bool uses_augmentation(RiVariant v);

struct ModelShape {
  std::size_t width = 16;
  std::size_t blocks = 2;  // two-layer blocks per tower
  InitScheme init = InitScheme::SignStructured;
};

/**
 * Two-tower radial-inverse surrogate
 *
 *   phi(x, y) = tanh(sigma(y, z))^T psi(x, z).
 *
 * sigma takes [normalised y, normalised z] and ends with a rectifier, psi
 * takes [x, z] (or [x, |x|_1 z] for homogeneous variants) and ends with a
 * rectifier. sigma decreasing in y and psi increasing in x give phi
 * increasing in x and decreasing in y.
 */
class HmRiModel final : public TrainableModel {
 public:
  HmRiModel() = default;
  HmRiModel(RiVariant variant, InputScaling scaling, Mlp sigma, Mlp psi);

  [[nodiscard]] RiVariant variant() const { return variant_; }
  [[nodiscard]] const InputScaling& scaling() const { return scaling_; }
  [[nodiscard]] const Mlp& sigma() const { return sigma_; }
  [[nodiscard]] const Mlp& psi() const { return psi_; }
  [[nodiscard]] std::size_t n() const { return scaling_.n; }
  [[nodiscard]] std::size_t z_dim() const { return scaling_.z_dim(); }

  [[nodiscard]] Eigen::VectorXd sigma_input(double y, std::span<const double> z) const;
  [[nodiscard]] Eigen::VectorXd psi_input(std::span<const double> x, std::span<const double> z) const;

  /// phi(x, y; z), the learned radial inverse.
  [[nodiscard]] double value(std::span<const double> x, double y, std::span<const double> z) const;

  [[nodiscard]] std::size_t parameter_count() const override;
  [[nodiscard]] Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  double data_loss(const std::vector<LabeledSample>& batch, const LossConfig& cfg,
                   Eigen::Ref<Eigen::VectorXd> grad) const override;
  [[nodiscard]] double prediction(const LabeledSample& s) const override;
  [[nodiscard]] double loss_target(const LabeledSample& s) const override { return s.target; }
  [[nodiscard]] std::vector<MonotoneTower> monotone_towers() const override;

  /// Both towers with their certification domains and signs, regardless of
  /// the variant's monotone flag.
  [[nodiscard]] std::vector<MonotoneTower> towers() const;

  bool operator==(const HmRiModel& other) const;

 private:
  RiVariant variant_ = RiVariant::HmRi;
  InputScaling scaling_;
  Mlp sigma_;
  Mlp psi_;
};

/// Direct surrogate g(x, z) of a constraint, increasing in x (M-Net).
class ConstraintNet final : public TrainableModel {
 public:
  ConstraintNet() = default;
  ConstraintNet(InputScaling scaling, Mlp net, bool monotone);

  [[nodiscard]] const InputScaling& scaling() const { return scaling_; }
  [[nodiscard]] const Mlp& net() const { return net_; }
  [[nodiscard]] bool monotone() const { return monotone_; }

  [[nodiscard]] Eigen::VectorXd input(std::span<const double> x, std::span<const double> z) const;
  /// Surrogate of g_z(x) in the original units.
  [[nodiscard]] double value(std::span<const double> x, std::span<const double> z) const;

  [[nodiscard]] std::size_t parameter_count() const override { return net_.parameter_count(); }
  [[nodiscard]] Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  double data_loss(const std::vector<LabeledSample>& batch, const LossConfig& cfg,
                   Eigen::Ref<Eigen::VectorXd> grad) const override;
  [[nodiscard]] double prediction(const LabeledSample& s) const override;
  [[nodiscard]] double loss_target(const LabeledSample& s) const override;
  [[nodiscard]] std::vector<MonotoneTower> monotone_towers() const override;
  [[nodiscard]] MonotoneTower tower() const;

  bool operator==(const ConstraintNet& other) const;

 private:
  InputScaling scaling_;
  Mlp net_;
  bool monotone_ = true;
};

/// Fits value and z ranges from sample records.
[[nodiscard]] InputScaling fit_scaling(const std::vector<LabeledSample>& samples,
                                       std::vector<double> x_hi, std::vector<double> z_lo,
                                       std::vector<double> z_hi, ValueTransform transform);

[[nodiscard]] HmRiModel build_variant(RiVariant kind, const InputScaling& scaling,
                                      const ModelShape& shape, std::uint64_t seed);
[[nodiscard]] ConstraintNet build_constraint_net(const InputScaling& scaling, const ModelShape& shape,
                                                 bool monotone, std::uint64_t seed);

/// For each record, one copy with x scaled by alpha ~ U[0.5, 2.5] and target
/// alpha * target. Output is the originals followed by the scaled copies.
[[nodiscard]] std::vector<LabeledSample> augment_homogeneity(const std::vector<LabeledSample>& data,
                                                             std::mt19937_64& rng);

/// Block-wise monotone regulariser over all monotone towers of `model`, with
/// `count` points drawn uniformly from each tower's domain box.
double monotone_regularizer(const TrainableModel& model, std::size_t count, double eta, double c,
                            std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> grad);

/// Full objective: data loss plus regulariser at fixed points `reg_points`
/// (one matrix per monotone tower). Used by gradient checks.
double total_loss(const TrainableModel& model, const std::vector<LabeledSample>& batch,
                  const LossConfig& cfg, const std::vector<Eigen::MatrixXd>& reg_points,
                  double eta, double c, Eigen::Ref<Eigen::VectorXd> grad);

}  // namespace monopoa::neural

#endif  // MONOPOA_HMRI_HPP
