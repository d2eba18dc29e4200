#include "monopoa/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace monopoa::neural {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (c_factor < 1.0) throw std::invalid_argument("c_factor must be >= 1");
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
}

Adam::Adam(std::size_t dim, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      b1_(beta1),
      b2_(beta2),
      eps_(epsilon),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))) {}

void Adam::step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * grad;
  v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

FixedData::FixedData(std::vector<LabeledSample> records) : records_(std::move(records)) {
  if (records_.empty()) throw std::invalid_argument("FixedData needs at least one record");
  order_.resize(records_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  cursor_ = order_.size();
}

std::vector<LabeledSample> FixedData::next_batch(std::size_t size, std::mt19937_64& rng) {
  std::vector<LabeledSample> batch;
  batch.reserve(size);
  while (batch.size() < size) {
    if (cursor_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng);
      cursor_ = 0;
    }
    batch.push_back(records_[order_[cursor_++]]);
    // A batch never repeats a record within one pass over a small set.
    if (batch.size() == records_.size()) break;
  }
  return batch;
}

namespace {

void run_steps(TrainableModel& model, DataSource& data, const TrainConfig& cfg, double c,
               std::size_t steps, Adam& adam, std::mt19937_64& rng, TrainReport& report) {
  const LossConfig loss_cfg{cfg.beta};
  Eigen::VectorXd params = model.parameters();
  Eigen::VectorXd grad(params.size());
  for (std::size_t s = 0; s < steps; ++s) {
    const auto batch = data.next_batch(cfg.batch_size, rng);
    grad.setZero();
    double loss = model.data_loss(batch, loss_cfg, grad);
    loss += monotone_regularizer(model, cfg.regularizer_points, cfg.eta, c, rng, grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
      std::ostringstream os;
      os << "training diverged at step " << report.iterations << " (loss " << loss << ")";
      throw std::runtime_error(os.str());
    }
    adam.step(params, grad);
    model.set_parameters(params);
    ++report.iterations;
    if (cfg.log_every && report.iterations % cfg.log_every == 0) report.loss_history.push_back(loss);
  }
}

}  // namespace

TrainReport train(TrainableModel& model, DataSource& data, const TrainConfig& cfg,
                  const Certifier& certifier) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  Adam adam(model.parameter_count(), cfg.learning_rate);
  TrainReport report;
  const bool monotone = !model.monotone_towers().empty();
  double c = monotone ? cfg.c_init : 0.0;

  run_steps(model, data, cfg, c, cfg.iterations_initial, adam, rng, report);
  if (monotone && certifier) {
    report.certification_attempted = true;
    report.certified = certifier(model);
    while (!report.certified && report.restarts < cfg.max_resets) {
      c = std::min(c * cfg.c_factor, cfg.c_max);
      ++report.restarts;
      run_steps(model, data, cfg, c, cfg.iterations_per_reset, adam, rng, report);
      report.certified = certifier(model);
    }
  }
  report.final_c = c;
  return report;
}

double mean_squared_error(const TrainableModel& model, const std::vector<LabeledSample>& data) {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : data) {
    const double e = model.prediction(r) - model.loss_target(r);
    s += e * e;
  }
  return s / static_cast<double>(data.size());
}

}  // namespace monopoa::neural
