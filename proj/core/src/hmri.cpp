#include "monopoa/hmri.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace monopoa::neural {

namespace {

constexpr double kLogFloor = 1e-300;

// dL/dprediction for the asymmetric loss, already divided by the batch size.
double loss_term(double e, double beta, double inv_b, double& dloss) {
  const double pos = std::max(e, 0.0);
  dloss = inv_b * (2.0 * e + 2.0 * beta * pos);
  return e * e + beta * pos * pos;
}

std::vector<int> sigma_signs(std::size_t z_dim) {
  std::vector<int> s(1 + z_dim, 0);
  s[0] = -1;
  return s;
}

std::vector<int> psi_signs(std::size_t n, std::size_t z_dim, bool homogeneous) {
  std::vector<int> s(n + z_dim, homogeneous ? 1 : 0);
  std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n), 1);
  return s;
}

std::vector<std::size_t> tower_widths(std::size_t in, const ModelShape& shape, std::size_t out) {
  if (shape.blocks == 0 || shape.width == 0) throw std::invalid_argument("model shape needs blocks and width");
  std::vector<std::size_t> w{in};
  for (std::size_t l = 0; l + 1 < 2 * shape.blocks; ++l) w.push_back(shape.width);
  w.push_back(out);
  return w;
}

}  // namespace

double InputScaling::transform_value(double y) const {
  return transform == ValueTransform::Log ? std::log(std::max(y, kLogFloor)) : y;
}

double InputScaling::inverse_transform(double t) const {
  return transform == ValueTransform::Log ? std::exp(t) : t;
}

double InputScaling::normalize_value(double y) const {
  return (transform_value(y) - t_lo) / (t_hi - t_lo);
}

double InputScaling::denormalize_value(double v) const {
  return inverse_transform(t_lo + v * (t_hi - t_lo));
}

double InputScaling::normalize_z(std::size_t i, double z) const {
  const double span = z_hi[i] - z_lo[i];
  return span > 0.0 ? (z - z_lo[i]) / span : 0.0;
}

std::string to_string(RiVariant v) {
  switch (v) {
    case RiVariant::HmRi: return "HM-RI";
    case RiVariant::HRi: return "H-RI";
    case RiVariant::MRi: return "M-RI";
    case RiVariant::Ri: return "RI";
  }
  return "unknown";
}

RiVariant variant_from_string(const std::string& name) {
  if (name == "HM-RI" || name == "hm-ri") return RiVariant::HmRi;
  if (name == "H-RI" || name == "h-ri") return RiVariant::HRi;
  if (name == "M-RI" || name == "m-ri") return RiVariant::MRi;
  if (name == "RI" || name == "ri") return RiVariant::Ri;
  throw std::invalid_argument("unknown radial-inverse variant '" + name + "'");
}

bool is_homogeneous(RiVariant v) { return v == RiVariant::HmRi || v == RiVariant::HRi; }
bool is_monotone(RiVariant v) { return v == RiVariant::HmRi || v == RiVariant::MRi; }
bool uses_augmentation(RiVariant v) { return !is_homogeneous(v); }

// ---------------------------------------------------------------- HmRiModel

HmRiModel::HmRiModel(RiVariant variant, InputScaling scaling, Mlp sigma, Mlp psi)
    : variant_(variant), scaling_(std::move(scaling)), sigma_(std::move(sigma)), psi_(std::move(psi)) {
  const auto n = scaling_.n;
  const auto zd = scaling_.z_dim();
  if (scaling_.x_hi.size() != n || scaling_.z_hi.size() != zd) {
    throw std::invalid_argument("HmRiModel: inconsistent scaling");
  }
  if (sigma_.input_dim() != 1 + zd || psi_.input_dim() != n + zd) {
    throw std::invalid_argument("HmRiModel: tower input widths do not match n and z");
  }
  if (sigma_.output_dim() != psi_.output_dim()) {
    throw std::invalid_argument("HmRiModel: tower output widths differ");
  }
  if (!sigma_.final_rectifier() || !psi_.final_rectifier()) {
    throw std::invalid_argument("HmRiModel: both towers must end with a rectifier");
  }
  if (is_homogeneous(variant_) && !psi_.bias_free()) {
    throw std::invalid_argument("HmRiModel: homogeneous variants need a bias-free psi");
  }
}

Eigen::VectorXd HmRiModel::sigma_input(double y, std::span<const double> z) const {
  const auto zd = z_dim();
  if (z.size() != zd) throw std::invalid_argument("HmRiModel: z has the wrong length");
  Eigen::VectorXd in(static_cast<Eigen::Index>(1 + zd));
  in(0) = scaling_.normalize_value(y);
  for (std::size_t i = 0; i < zd; ++i) in(static_cast<Eigen::Index>(1 + i)) = scaling_.normalize_z(i, z[i]);
  return in;
}

Eigen::VectorXd HmRiModel::psi_input(std::span<const double> x, std::span<const double> z) const {
  const auto n = this->n();
  const auto zd = z_dim();
  if (x.size() != n || z.size() != zd) throw std::invalid_argument("HmRiModel: x or z has the wrong length");
  Eigen::VectorXd in(static_cast<Eigen::Index>(n + zd));
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    in(static_cast<Eigen::Index>(i)) = x[i];
    l1 += std::abs(x[i]);
  }
  const double gain = is_homogeneous(variant_) ? l1 : 1.0;
  for (std::size_t i = 0; i < zd; ++i) {
    in(static_cast<Eigen::Index>(n + i)) = gain * scaling_.normalize_z(i, z[i]);
  }
  return in;
}

double HmRiModel::value(std::span<const double> x, double y, std::span<const double> z) const {
  const Eigen::VectorXd s = sigma_.forward(sigma_input(y, z));
  const Eigen::VectorXd p = psi_.forward(psi_input(x, z));
  return s.array().tanh().matrix().dot(p);
}

double HmRiModel::prediction(const LabeledSample& s) const { return value(s.x, s.y, s.z); }

std::size_t HmRiModel::parameter_count() const {
  return sigma_.parameter_count() + psi_.parameter_count();
}

Eigen::VectorXd HmRiModel::parameters() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
  const auto ns = static_cast<Eigen::Index>(sigma_.parameter_count());
  sigma_.copy_parameters_to(p.head(ns));
  psi_.copy_parameters_to(p.tail(p.size() - ns));
  return p;
}

void HmRiModel::set_parameters(const Eigen::VectorXd& params) {
  if (params.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw std::invalid_argument("HmRiModel: parameter vector has the wrong length");
  }
  const auto ns = static_cast<Eigen::Index>(sigma_.parameter_count());
  sigma_.set_parameters(params.head(ns));
  psi_.set_parameters(params.tail(params.size() - ns));
}

double HmRiModel::data_loss(const std::vector<LabeledSample>& batch, const LossConfig& cfg,
                            Eigen::Ref<Eigen::VectorXd> grad) const {
  if (batch.empty()) throw std::invalid_argument("data_loss: empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd s_in(static_cast<Eigen::Index>(sigma_.input_dim()), b);
  Eigen::MatrixXd p_in(static_cast<Eigen::Index>(psi_.input_dim()), b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const auto& rec = batch[static_cast<std::size_t>(k)];
    s_in.col(k) = sigma_input(rec.y, rec.z);
    p_in.col(k) = psi_input(rec.x, rec.z);
  }
  Mlp::Trace st, pt;
  const Eigen::MatrixXd s_out = sigma_.forward_batch(s_in, st);
  const Eigen::MatrixXd p_out = psi_.forward_batch(p_in, pt);
  const Eigen::MatrixXd t = s_out.array().tanh().matrix();

  const double inv_b = 1.0 / static_cast<double>(b);
  double loss = 0.0;
  Eigen::MatrixXd g_s(s_out.rows(), b), g_p(p_out.rows(), b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const double phi = t.col(k).dot(p_out.col(k));
    double d = 0.0;
    loss += loss_term(phi - batch[static_cast<std::size_t>(k)].target, cfg.beta, inv_b, d);
    g_s.col(k) = d * ((1.0 - t.col(k).array().square()) * p_out.col(k).array()).matrix();
    g_p.col(k) = d * t.col(k);
  }
  const auto ns = static_cast<Eigen::Index>(sigma_.parameter_count());
  (void)sigma_.backward(st, g_s, grad.head(ns));
  (void)psi_.backward(pt, g_p, grad.segment(ns, static_cast<Eigen::Index>(psi_.parameter_count())));
  return loss * inv_b;
}

std::vector<MonotoneTower> HmRiModel::towers() const {
  const auto n = this->n();
  const auto zd = z_dim();
  MonotoneTower s{&sigma_, std::vector<double>(1 + zd, 0.0), std::vector<double>(1 + zd, 1.0),
                  sigma_signs(zd), "sigma", 0};
  double x_sum = 0.0;
  for (double v : scaling_.x_hi) x_sum += v;
  std::vector<double> p_hi = scaling_.x_hi;
  p_hi.resize(n + zd, is_homogeneous(variant_) ? x_sum : 1.0);
  MonotoneTower p{&psi_, std::vector<double>(n + zd, 0.0), std::move(p_hi),
                  psi_signs(n, zd, is_homogeneous(variant_)), "psi", sigma_.parameter_count()};
  return {s, p};
}

std::vector<MonotoneTower> HmRiModel::monotone_towers() const {
  if (!is_monotone(variant_)) return {};
  return towers();
}

bool HmRiModel::operator==(const HmRiModel& other) const {
  return variant_ == other.variant_ && scaling_ == other.scaling_ && sigma_ == other.sigma_ &&
         psi_ == other.psi_;
}

// ------------------------------------------------------------ ConstraintNet

ConstraintNet::ConstraintNet(InputScaling scaling, Mlp net, bool monotone)
    : scaling_(std::move(scaling)), net_(std::move(net)), monotone_(monotone) {
  if (scaling_.x_hi.size() != scaling_.n || scaling_.z_hi.size() != scaling_.z_dim()) {
    throw std::invalid_argument("ConstraintNet: inconsistent scaling");
  }
  if (net_.input_dim() != scaling_.n + scaling_.z_dim() || net_.output_dim() != 1) {
    throw std::invalid_argument("ConstraintNet: network must map [x, z] to a scalar");
  }
}

Eigen::VectorXd ConstraintNet::input(std::span<const double> x, std::span<const double> z) const {
  const auto n = scaling_.n;
  const auto zd = scaling_.z_dim();
  if (x.size() != n || z.size() != zd) throw std::invalid_argument("ConstraintNet: x or z has the wrong length");
  Eigen::VectorXd in(static_cast<Eigen::Index>(n + zd));
  for (std::size_t i = 0; i < n; ++i) in(static_cast<Eigen::Index>(i)) = x[i];
  for (std::size_t i = 0; i < zd; ++i) in(static_cast<Eigen::Index>(n + i)) = scaling_.normalize_z(i, z[i]);
  return in;
}

double ConstraintNet::value(std::span<const double> x, std::span<const double> z) const {
  return scaling_.denormalize_value(net_.forward(input(x, z))(0));
}

double ConstraintNet::prediction(const LabeledSample& s) const { return net_.forward(input(s.x, s.z))(0); }

double ConstraintNet::loss_target(const LabeledSample& s) const { return scaling_.normalize_value(s.y); }

Eigen::VectorXd ConstraintNet::parameters() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(net_.parameter_count()));
  net_.copy_parameters_to(p);
  return p;
}

void ConstraintNet::set_parameters(const Eigen::VectorXd& params) { net_.set_parameters(params); }

double ConstraintNet::data_loss(const std::vector<LabeledSample>& batch, const LossConfig& cfg,
                                Eigen::Ref<Eigen::VectorXd> grad) const {
  if (batch.empty()) throw std::invalid_argument("data_loss: empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd in(static_cast<Eigen::Index>(net_.input_dim()), b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const auto& rec = batch[static_cast<std::size_t>(k)];
    in.col(k) = input(rec.x, rec.z);
  }
  Mlp::Trace tr;
  const Eigen::MatrixXd out = net_.forward_batch(in, tr);
  const double inv_b = 1.0 / static_cast<double>(b);
  double loss = 0.0;
  Eigen::MatrixXd g(1, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    double d = 0.0;
    loss += loss_term(out(0, k) - loss_target(batch[static_cast<std::size_t>(k)]), cfg.beta, inv_b, d);
    g(0, k) = d;
  }
  (void)net_.backward(tr, g, grad);
  return loss * inv_b;
}

MonotoneTower ConstraintNet::tower() const {
  const auto n = scaling_.n;
  const auto zd = scaling_.z_dim();
  std::vector<double> hi = scaling_.x_hi;
  hi.resize(n + zd, 1.0);
  std::vector<int> signs(n + zd, 0);
  std::fill(signs.begin(), signs.begin() + static_cast<std::ptrdiff_t>(n), 1);
  return {&net_, std::vector<double>(n + zd, 0.0), std::move(hi), std::move(signs), "g", 0};
}

std::vector<MonotoneTower> ConstraintNet::monotone_towers() const {
  if (!monotone_) return {};
  return {tower()};
}

bool ConstraintNet::operator==(const ConstraintNet& other) const {
  return scaling_ == other.scaling_ && net_ == other.net_ && monotone_ == other.monotone_;
}

// ----------------------------------------------------------------- builders

InputScaling fit_scaling(const std::vector<LabeledSample>& samples, std::vector<double> x_hi,
                         std::vector<double> z_lo, std::vector<double> z_hi, ValueTransform transform) {
  if (samples.empty()) throw std::invalid_argument("fit_scaling: no samples");
  InputScaling s;
  s.n = x_hi.size();
  s.x_hi = std::move(x_hi);
  s.z_lo = std::move(z_lo);
  s.z_hi = std::move(z_hi);
  s.transform = transform;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : samples) {
    const double t = s.transform_value(r.y);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  s.t_lo = lo;
  s.t_hi = hi;
  return s;
}

HmRiModel build_variant(RiVariant kind, const InputScaling& scaling, const ModelShape& shape,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto n = scaling.n;
  const auto zd = scaling.z_dim();
  const bool hom = is_homogeneous(kind);
  const InitScheme init = is_monotone(kind) ? shape.init : InitScheme::He;
  const auto ss = sigma_signs(zd);
  const auto ps = psi_signs(n, zd, hom);
  Mlp sigma = Mlp::random(tower_widths(1 + zd, shape, shape.width), false, true, rng, init, ss);
  Mlp psi = Mlp::random(tower_widths(n + zd, shape, shape.width), hom, true, rng, init, ps);
  return HmRiModel(kind, scaling, std::move(sigma), std::move(psi));
}

ConstraintNet build_constraint_net(const InputScaling& scaling, const ModelShape& shape, bool monotone,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto n = scaling.n;
  const auto zd = scaling.z_dim();
  std::vector<int> signs(n + zd, 0);
  std::fill(signs.begin(), signs.begin() + static_cast<std::ptrdiff_t>(n), 1);
  const InitScheme init = monotone ? shape.init : InitScheme::He;
  Mlp net = Mlp::random(tower_widths(n + zd, shape, 1), false, false, rng, init, signs);
  return ConstraintNet(scaling, std::move(net), monotone);
}

std::vector<LabeledSample> augment_homogeneity(const std::vector<LabeledSample>& data,
                                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> alpha_dist(0.5, 2.5);
  std::vector<LabeledSample> out = data;
  out.reserve(2 * data.size());
  for (const auto& rec : data) {
    const double a = alpha_dist(rng);
    LabeledSample s = rec;
    for (auto& v : s.x) v *= a;
    s.target = a * rec.target;
    out.push_back(std::move(s));
  }
  return out;
}

double total_loss(const TrainableModel& model, const std::vector<LabeledSample>& batch,
                  const LossConfig& cfg, const std::vector<Eigen::MatrixXd>& reg_points, double eta,
                  double c, Eigen::Ref<Eigen::VectorXd> grad) {
  double loss = model.data_loss(batch, cfg, grad);
  const auto towers = model.monotone_towers();
  if (c == 0.0 || towers.empty()) return loss;
  if (reg_points.size() != towers.size()) throw std::invalid_argument("one point set per monotone tower");
  for (std::size_t t = 0; t < towers.size(); ++t) {
    loss += block_monotone_penalty(towers[t], reg_points[t], eta, c, grad);
  }
  return loss;
}

double monotone_regularizer(const TrainableModel& model, std::size_t count, double eta, double c,
                            std::mt19937_64& rng, Eigen::Ref<Eigen::VectorXd> grad) {
  if (c == 0.0 || count == 0) return 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0.0;
  for (const auto& tower : model.monotone_towers()) {
    const auto d = static_cast<Eigen::Index>(tower.lo.size());
    Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(count));
    for (Eigen::Index p = 0; p < pts.cols(); ++p) {
      for (Eigen::Index i = 0; i < d; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        pts(i, p) = tower.lo[ii] + unit(rng) * (tower.hi[ii] - tower.lo[ii]);
      }
    }
    total += block_monotone_penalty(tower, pts, eta, c, grad);
  }
  return total;
}

}  // namespace monopoa::neural
