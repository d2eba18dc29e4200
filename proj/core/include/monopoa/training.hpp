#ifndef MONOPOA_TRAINING_HPP
#define MONOPOA_TRAINING_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "monopoa/hmri.hpp"

namespace monopoa::neural {

struct TrainConfig {
  double learning_rate = 2e-4;
  std::size_t batch_size = 512;
  std::size_t iterations_initial = 4000;
  std::size_t iterations_per_reset = 1000;
  std::size_t max_resets = 40;
  double beta = 1.0;
  double c_init = 0.05;
  double c_factor = 1.2;
  double c_max = 0.2;
  double eta = 0.0;
  double delta = -0.1;  // certification lower bound on gradients
  double tau = 0.01;    // certification minimum region size
  std::size_t regularizer_points = 512;
  std::uint64_t seed = 0;
  /// Record the loss every `log_every` steps (0 disables).
  std::size_t log_every = 100;

  void validate() const;
};

/// Adaptive-moment optimiser with the usual 0.9 / 0.999 / 1e-8 constants.
class Adam {
 public:
  Adam(std::size_t dim, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);
  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);
  [[nodiscard]] std::size_t steps() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  Eigen::VectorXd m_, v_;
  std::size_t t_ = 0;
};

/// Where training batches come from.
class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual std::vector<LabeledSample> next_batch(std::size_t size, std::mt19937_64& rng) = 0;
};

/// A fixed record set, reshuffled every pass.
class FixedData final : public DataSource {
 public:
  explicit FixedData(std::vector<LabeledSample> records);
  std::vector<LabeledSample> next_batch(std::size_t size, std::mt19937_64& rng) override;
  [[nodiscard]] const std::vector<LabeledSample>& records() const { return records_; }

 private:
  std::vector<LabeledSample> records_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// Fresh records on every call.
class StreamData final : public DataSource {
 public:
  using Generator = std::function<std::vector<LabeledSample>(std::size_t, std::mt19937_64&)>;
  explicit StreamData(Generator gen) : gen_(std::move(gen)) {}
  std::vector<LabeledSample> next_batch(std::size_t size, std::mt19937_64& rng) override {
    return gen_(size, rng);
  }

 private:
  Generator gen_;
};

/// Returns true when the model passes certification.
using Certifier = std::function<bool(const TrainableModel&)>;

struct TrainReport {
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool certified = false;
  bool certification_attempted = false;
  double final_c = 0.0;
  std::vector<double> loss_history;
};

/**
 * Adam on data loss plus c times the block-wise monotone regulariser. With a
 * certifier and a model that has monotone towers: after the initial phase,
 * certify; on failure raise c (capped) and run `iterations_per_reset` more
 * steps, until certified or `max_resets` is reached. Throws on a non-finite
 * loss.
 */
TrainReport train(TrainableModel& model, DataSource& data, const TrainConfig& cfg,
                  const Certifier& certifier = {});

/// Mean squared error of predictions against loss targets.
[[nodiscard]] double mean_squared_error(const TrainableModel& model,
                                        const std::vector<LabeledSample>& data);

}  // namespace monopoa::neural

#endif  // MONOPOA_TRAINING_HPP
