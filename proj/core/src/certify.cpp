#include "monopoa/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "monopoa/lp.hpp"

namespace monopoa::certify {

namespace {

constexpr double kInteriorTol = 1e-10;
constexpr double kFixedWidth = 1e-12;

std::vector<int> effective_signs(const CertifyConfig& cfg, std::size_t d) {
  return cfg.signs.empty() ? std::vector<int>(d, 1) : cfg.signs;
}

class Enumerator {
 public:
  Enumerator(const neural::Mlp& block, const CertifyConfig& cfg)
      : cfg_(cfg),
        w1_(block.layers()[0].weight),
        b1_(block.layers()[0].bias.size() ? block.layers()[0].bias
                                          : Eigen::VectorXd::Zero(block.layers()[0].weight.rows())),
        w2_(block.layers()[1].weight) {
    const auto h = static_cast<std::size_t>(w1_.rows());
    const auto d = static_cast<std::size_t>(w1_.cols());
    const auto signs = effective_signs(cfg, d);
    for (std::size_t i = 0; i < d; ++i) {
      if (signs[i] != 0) {
        cols_.push_back(static_cast<Eigen::Index>(i));
        col_sign_.push_back(signs[i]);
      }
    }
    const auto o = w2_.rows();
    const auto nc = static_cast<Eigen::Index>(cols_.size());
    contrib_.resize(h);
    std::vector<double> harm(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
      auto& c = contrib_[j];
      c.resize(o, nc);
      for (Eigen::Index k = 0; k < o; ++k) {
        for (Eigen::Index q = 0; q < nc; ++q) {
          c(k, q) = col_sign_[static_cast<std::size_t>(q)] * w2_(k, static_cast<Eigen::Index>(j)) *
                    w1_(static_cast<Eigen::Index>(j), cols_[static_cast<std::size_t>(q)]);
        }
      }
      harm[j] = -c.cwiseMin(0.0).sum();
    }
    order_.resize(h);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return harm[a] > harm[b]; });

    zero_margins_.assign(h, 0.0);
    tau_margins_.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
      tau_margins_[j] = cfg.tau * w1_.row(static_cast<Eigen::Index>(j)).cwiseAbs().sum();
    }
    report_.blocks = 1;
    report_.margins.assign(d, std::numeric_limits<double>::infinity());
  }

  CertReport run() {
    const auto h = w1_.rows();
    const auto o = w2_.rows();
    const auto nc = static_cast<Eigen::Index>(cols_.size());
    pattern_.assign(static_cast<std::size_t>(h), -1);
    Eigen::MatrixXd fixed = Eigen::MatrixXd::Zero(o, nc);
    Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(o, nc);
    for (const auto& c : contrib_) neg += c.cwiseMin(0.0);
    std::vector<double> center(cfg_.lo.size());
    for (std::size_t i = 0; i < center.size(); ++i) center[i] = 0.5 * (cfg_.lo[i] + cfg_.hi[i]);
    visit(0, fixed, neg, center);
    report_.certified = report_.counterexamples.empty() && !found_;
    return report_;
  }

 private:
  [[nodiscard]] std::uint64_t subtree(std::size_t depth) const {
    return std::uint64_t{1} << (static_cast<std::size_t>(w1_.rows()) - depth);
  }

  void visit(std::size_t depth, const Eigen::MatrixXd& fixed, const Eigen::MatrixXd& neg,
             const std::vector<double>& witness) {
    if (abort_) return;
    const auto h = static_cast<std::size_t>(w1_.rows());
    if (cfg_.bound_pruning && cols_.size() > 0) {
      const Eigen::MatrixXd lb = fixed + neg;
      if (lb.minCoeff() >= cfg_.delta) {
        report_.regions_bounded += subtree(depth);
        note_margins(lb);
        return;
      }
    } else if (cols_.empty()) {
      // Nothing constrained: every region is clean.
      report_.regions_bounded += subtree(depth);
      return;
    }
    if (depth == h) {
      leaf(fixed, witness);
      return;
    }
    const std::size_t j = order_[depth];
    const auto jj = static_cast<Eigen::Index>(j);
    const double pre = w1_.row(jj).dot(Eigen::Map<const Eigen::VectorXd>(
                           witness.data(), static_cast<Eigen::Index>(witness.size()))) +
                       b1_(jj);
    const Eigen::MatrixXd child_neg = neg - contrib_[j].cwiseMin(0.0);
    for (int v : {1, 0}) {
      if (abort_) return;
      pattern_[j] = v;
      const bool inherits = (v == 1 && pre > 0.0) || (v == 0 && pre < 0.0);
      std::vector<double> child_witness = witness;
      if (!inherits) {
        const auto r = solve(zero_margins_);
        if (r.status == RegionStatus::Infeasible) {
          report_.regions_infeasible += subtree(depth + 1);
          continue;
        }
        child_witness = r.witness;
      }
      if (v == 1) {
        visit(depth + 1, fixed + contrib_[j], child_neg, child_witness);
      } else {
        visit(depth + 1, fixed, child_neg, child_witness);
      }
    }
    pattern_[j] = -1;
  }

  void leaf(const Eigen::MatrixXd& jac, const std::vector<double>& witness) {
    Eigen::Index k = 0, q = 0;
    const double worst = jac.size() ? jac.minCoeff(&k, &q) : 0.0;
    if (worst >= cfg_.delta) {
      ++report_.regions_checked;
      note_margins(jac);
      return;
    }
    std::vector<double> where = witness;
    if (cfg_.tau > 0.0) {
      const auto r = solve(tau_margins_);
      if (r.status == RegionStatus::Infeasible) {
        ++report_.regions_skipped_by_tau;
        return;
      }
      where = r.witness;
    }
    ++report_.regions_checked;
    note_margins(jac);
    found_ = true;
    if (report_.counterexamples.size() < std::max<std::size_t>(cfg_.max_counterexamples, 1)) {
      Counterexample ce;
      ce.pattern.assign(pattern_.begin(), pattern_.end());
      ce.witness = std::move(where);
      ce.output = static_cast<std::size_t>(k);
      ce.coordinate = static_cast<std::size_t>(cols_[static_cast<std::size_t>(q)]);
      ce.gradient = worst;
      report_.counterexamples.push_back(std::move(ce));
    }
    if (cfg_.stop_at_first) {
      abort_ = true;
      report_.complete = false;
    }
  }

  void note_margins(const Eigen::MatrixXd& m) {
    for (Eigen::Index q = 0; q < m.cols(); ++q) {
      auto& slot = report_.margins[static_cast<std::size_t>(cols_[static_cast<std::size_t>(q)])];
      slot = std::min(slot, m.col(q).minCoeff());
    }
  }

  RegionResult solve(const std::vector<double>& margins) {
    ++report_.lp_solves;
    auto r = region_feasible(pattern_, w1_, b1_, cfg_.lo, cfg_.hi, margins, cfg_.max_pivots);
    if (r.status == RegionStatus::Unknown) {
      ++report_.regions_unknown;
      r.status = RegionStatus::Feasible;
      if (r.witness.empty()) {
        r.witness.resize(cfg_.lo.size());
        for (std::size_t i = 0; i < r.witness.size(); ++i) r.witness[i] = 0.5 * (cfg_.lo[i] + cfg_.hi[i]);
      }
    }
    return r;
  }

  const CertifyConfig& cfg_;
  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  std::vector<Eigen::Index> cols_;
  std::vector<int> col_sign_;
  std::vector<Eigen::MatrixXd> contrib_;  // per hidden unit: signed gradient contribution
  std::vector<std::size_t> order_;
  std::vector<double> zero_margins_;
  std::vector<double> tau_margins_;
  std::vector<int> pattern_;
  CertReport report_;
  bool abort_ = false;
  bool found_ = false;
};

}  // namespace

void CertifyConfig::validate(std::size_t input_dim) const {
  if (lo.size() != input_dim || hi.size() != input_dim) {
    throw std::invalid_argument("certification domain does not match the input width");
  }
  for (std::size_t i = 0; i < input_dim; ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("certification domain needs lo <= hi");
  }
  if (!signs.empty() && signs.size() != input_dim) {
    throw std::invalid_argument("certification signs do not match the input width");
  }
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
  if (max_width > 62) throw std::invalid_argument("max_width above 62 is not supported");
}

void CertReport::merge(const CertReport& other) {
  certified = certified && other.certified;
  counterexamples.insert(counterexamples.end(), other.counterexamples.begin(), other.counterexamples.end());
  regions_checked += other.regions_checked;
  regions_skipped_by_tau += other.regions_skipped_by_tau;
  regions_infeasible += other.regions_infeasible;
  regions_bounded += other.regions_bounded;
  regions_unknown += other.regions_unknown;
  lp_solves += other.lp_solves;
  blocks += other.blocks;
  complete = complete && other.complete;
  if (margins.empty()) {
    margins = other.margins;
  } else if (margins.size() == other.margins.size()) {
    for (std::size_t i = 0; i < margins.size(); ++i) margins[i] = std::min(margins[i], other.margins[i]);
  }
}

RegionResult region_feasible(const std::vector<int>& pattern, const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& b, const std::vector<double>& lo,
                             const std::vector<double>& hi, const std::vector<double>& margins,
                             std::size_t max_pivots) {
  const auto d = static_cast<std::size_t>(w.cols());
  if (lo.size() != d || hi.size() != d || pattern.size() != static_cast<std::size_t>(w.rows()) ||
      margins.size() != pattern.size() || b.size() != w.rows()) {
    throw std::invalid_argument("region_feasible: dimension mismatch");
  }
  std::vector<Eigen::Index> free;
  for (std::size_t i = 0; i < d; ++i) {
    if (hi[i] - lo[i] > kFixedWidth) free.push_back(static_cast<Eigen::Index>(i));
  }
  const auto nf = static_cast<Eigen::Index>(free.size());

  // Rows of the max-slack LP over (x - lo)[free], s.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    if (pattern[j] < 0) continue;
    const auto jj = static_cast<Eigen::Index>(j);
    double at_lo = b(jj);
    for (std::size_t i = 0; i < d; ++i) at_lo += w(jj, static_cast<Eigen::Index>(i)) * lo[i];
    Eigen::VectorXd wf(nf);
    for (Eigen::Index q = 0; q < nf; ++q) wf(q) = w(jj, free[static_cast<std::size_t>(q)]);
    const double nrm = wf.norm();
    const double m = margins[j];
    if (nrm <= 1e-15) {
      const bool ok = pattern[j] == 1 ? at_lo >= m : (at_lo < 0.0 && at_lo <= -m);
      if (!ok) return {RegionStatus::Infeasible, {}, 0.0};
      continue;
    }
    Eigen::VectorXd row(nf + 1);
    if (pattern[j] == 1) {
      row.head(nf) = -wf;
      rhs.push_back(at_lo - m);
    } else {
      row.head(nf) = wf;
      rhs.push_back(-m - at_lo);
    }
    row(nf) = nrm;
    rows.push_back(std::move(row));
  }

  if (nf == 0) {
    return {RegionStatus::Feasible, lo, 0.0};
  }
  for (Eigen::Index q = 0; q < nf; ++q) {
    const auto i = static_cast<std::size_t>(free[static_cast<std::size_t>(q)]);
    Eigen::VectorXd up = Eigen::VectorXd::Zero(nf + 1), down = Eigen::VectorXd::Zero(nf + 1);
    up(q) = 1.0;
    up(nf) = 1.0;
    down(q) = -1.0;
    down(nf) = 1.0;
    rows.push_back(up);
    rhs.push_back(hi[i] - lo[i]);
    rows.push_back(down);
    rhs.push_back(0.0);
  }

  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), nf + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  const Eigen::VectorXd bb = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nf + 1);
  c(nf) = 1.0;

  const auto res = lp::maximize(a, bb, c, max_pivots);
  if (res.status == lp::Status::IterationLimit) return {RegionStatus::Unknown, {}, 0.0};
  if (res.status != lp::Status::Optimal || res.x(nf) <= kInteriorTol) {
    return {RegionStatus::Infeasible, {}, 0.0};
  }
  RegionResult out{RegionStatus::Feasible, lo, res.x(nf)};
  for (Eigen::Index q = 0; q < nf; ++q) {
    out.witness[static_cast<std::size_t>(free[static_cast<std::size_t>(q)])] += res.x(q);
  }
  return out;
}

CertReport certify_two_layer(const neural::Mlp& block, const CertifyConfig& cfg) {
  if (block.depth() != 2) throw std::invalid_argument("certify_two_layer needs exactly two layers");
  cfg.validate(block.input_dim());
  const auto width = static_cast<std::size_t>(block.layers()[0].weight.rows());
  if (width > cfg.max_width) {
    throw std::invalid_argument("enumeration infeasible: hidden width " + std::to_string(width) +
                                " exceeds max_width " + std::to_string(cfg.max_width));
  }
  Enumerator e(block, cfg);
  return e.run();
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> propagate_intervals(
    const neural::Mlp& net, const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.size() != net.input_dim() || hi.size() != net.input_dim()) {
    throw std::invalid_argument("propagate_intervals: domain does not match the input width");
  }
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  const auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& w = layers[k].weight;
    const Eigen::MatrixXd wp = w.cwiseMax(0.0);
    const Eigen::MatrixXd wn = w.cwiseMin(0.0);
    Eigen::VectorXd nl = wp * l + wn * u;
    Eigen::VectorXd nu = wp * u + wn * l;
    if (layers[k].bias.size()) {
      nl += layers[k].bias;
      nu += layers[k].bias;
    }
    if (k + 1 < layers.size() || net.final_rectifier()) {
      nl = nl.cwiseMax(0.0);
      nu = nu.cwiseMax(0.0);
    }
    l = nl;
    u = nu;
    out.emplace_back(std::vector<double>(l.data(), l.data() + l.size()),
                     std::vector<double>(u.data(), u.data() + u.size()));
  }
  return out;
}

CertReport certify_deep(const neural::Mlp& net, const CertifyConfig& cfg) {
  if (net.depth() == 0 || net.depth() % 2 != 0) {
    throw std::invalid_argument("certify_deep needs an even number of layers");
  }
  cfg.validate(net.input_dim());
  const auto boxes = propagate_intervals(net, cfg.lo, cfg.hi);
  CertReport total;
  total.blocks = 0;
  for (std::size_t k = 0; 2 * k < net.depth(); ++k) {
    CertifyConfig bc = cfg;
    if (k > 0) {
      bc.lo = boxes[2 * k - 1].first;
      bc.hi = boxes[2 * k - 1].second;
      bc.signs.assign(bc.lo.size(), 1);
    }
    auto r = certify_two_layer(neural::block_of(net, k), bc);
    for (auto& ce : r.counterexamples) ce.block = k;
    if (k > 0) r.margins.clear();
    total.merge(r);
    if (cfg.stop_at_first && !total.certified) break;
  }
  return total;
}

CertReport certify_model(const neural::TrainableModel& model, double delta, double tau,
                         std::size_t max_width, bool stop_at_first) {
  CertReport total;
  for (const auto& tower : model.monotone_towers()) {
    CertifyConfig cfg;
    cfg.lo = tower.lo;
    cfg.hi = tower.hi;
    cfg.signs = tower.signs;
    cfg.delta = delta;
    cfg.tau = tau;
    cfg.max_width = max_width;
    cfg.stop_at_first = stop_at_first;
    auto r = certify_deep(*tower.net, cfg);
    r.margins.clear();
    total.merge(r);
    if (stop_at_first && !total.certified) break;
  }
  return total;
}

}  // namespace monopoa::certify
