// Acceptance checks. One line per criterion: "[PASS|FAIL] <n> <title>: <detail> (<seconds> s)".
// Usage: monopoa_acceptance [--criterion N]   (no flag runs all)

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "monopoa/certify.hpp"
#include "monopoa/experiment.hpp"
#include "monopoa/instance_io.hpp"
#include "monopoa/model_io.hpp"
#include "monopoa/poa.hpp"
#include "monopoa/projection.hpp"
#include "support.hpp"

using namespace monopoa;
namespace nn = monopoa::neural;
namespace mt = monopoa::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / "monopoa_acceptance";
  fs::create_directories(d);
  return d;
}

// ---- 1 ---------------------------------------------------------------------

Outcome radial_inverse_properties() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_hom = 0.0, worst_self = 0.0, worst_num = 0.0;
  int mono_viol = 0, pairs = 0, not_inf = 0;
  for (int t = 0; t < 200; ++t) {
    const auto g = mt::random_quadratic(rng, 4);
    const ConstraintFn gf{g};
    const auto w = mt::random_point(rng, 4, 0.0, 0.5);
    const double y = eval_constraint(gf, w);
    const auto x = mt::random_point(rng, 4);
    const double rho = quad_radial_inverse(g.q, g.c, x, y);

    const double a = 0.1 + 9.9 * u(rng);
    auto ax = x;
    for (auto& v : ax) v *= a;
    worst_hom = std::max(worst_hom, std::abs(quad_radial_inverse(g.q, g.c, ax, y) - a * rho) / (a * rho));

    for (int k = 0; k < 3; ++k) {
      auto x2 = x;
      for (auto& v : x2) v += 0.5 * u(rng);
      ++pairs;
      if (quad_radial_inverse(g.q, g.c, x, y) > quad_radial_inverse(g.q, g.c, x2, y)) ++mono_viol;
    }
    for (int k = 0; k < 2; ++k) {
      const double y2 = y + 2.0 * u(rng);
      ++pairs;
      if (quad_radial_inverse(g.q, g.c, x, y) < quad_radial_inverse(g.q, g.c, x, y2)) ++mono_viol;
    }

    worst_self = std::max(worst_self, quad_radial_inverse(g.q, g.c, x, eval_constraint(gf, x)) - 1.0);
    const double g0 = eval_constraint(gf, std::vector<double>(4, 0.0));
    if (quad_radial_inverse(g.q, g.c, x, g0 - 1.0) != kInfinity) ++not_inf;
    if (numeric_radial_inverse(gf, x, g0 - 1.0) != kInfinity) ++not_inf;

    worst_num = std::max(worst_num, std::abs(numeric_radial_inverse(gf, x, y) - rho));
  }
  Outcome o;
  o.pass = worst_hom <= 1e-9 && mono_viol == 0 && worst_self <= 1e-9 && not_inf == 0 && worst_num <= 1e-8;
  o.detail = fmt("homogeneity rel err %.1e, monotonicity violations %d/%d, max rho(x,g(x))-1 %.1e, "
                 "finite rho below g(0): %d, closed vs numeric %.1e",
                 worst_hom, mono_viol, pairs, worst_self, not_inf, worst_num);
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome projection_equivalence() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  int queries = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto problem = generate_quadratic(4, 8, 2000 + i).first;
    std::vector<QuadraticConstraint> qs;
    for (const auto& g : problem.upper) qs.push_back(std::get<QuadraticConstraint>(g));
    int done = 0;
    while (done < 10) {
      const Point x(mt::random_point(rng, 4));
      if (problem.in_g(x)) continue;  // projection is only queried outside G
      std::vector<double> rhos(qs.size());
      for (std::size_t j = 0; j < qs.size(); ++j) {
        rhos[j] = quad_radial_inverse(qs[j].q, qs[j].c, x.coords(), problem.upper_thresholds[j]);
      }
      const Point a = project_via_radial_inverses(x, rhos, &problem.bound);
      const Point b = bisection_project(x, problem.upper, problem.upper_thresholds, 1e-6).point;
      double d = 0.0;
      for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
      worst = std::max(worst, d / x.norm2());
      ++done;
      ++queries;
    }
  }
  return {worst <= 1e-5, fmt("%d queries, max |closed - bisection| / |x| = %.2e", queries, worst)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome poa_exactness() {
  Outcome o;
  const auto circle = mt::circle_problem();
  const auto rc = solve(circle, make_bisection_oracle(circle, 1e-6), PoaConfig{});
  const auto linear = mt::linear_problem();
  const auto rl = solve(linear, make_bisection_oracle(linear, 1e-6), PoaConfig{});
  const double ec = std::abs(rc.best_value - std::sqrt(2.0));
  const double el = std::abs(rl.best_value - 2.0);
  o.pass = ec <= 1e-3 && el <= 1e-3;

  int ok = 0, converged = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto [p, inst] = generate_quadratic(2, 8, 3000 + i);
    const auto res = solve(p, make_closed_form_oracle(p), PoaConfig{});
    const auto grid = mt::grid_oracle(p, 200, mt::quadratic_lipschitz(inst.q0, inst.objective_scale));
    const bool within = res.best_value >= grid.best - 1e-3 && res.best_value <= grid.best + grid.slack;
    if (res.termination == Termination::Converged) ++converged;
    if (within) ++ok;
  }
  o.pass = o.pass && ok == 20;
  o.detail = fmt("circle %.6f (err %.1e), linear %.6f (err %.1e), random n=2 within band %d/20 (converged %d)",
                 rc.best_value, ec, rl.best_value, el, ok, converged);
  return o;
}

// ---- 4 ---------------------------------------------------------------------

bool near(const Point& a, const Point& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  return true;
}

bool same_set(const VertexSet& a, const VertexSet& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const Point& x) {
    return std::any_of(b.begin(), b.end(), [&](const Point& y) { return near(x, y); });
  });
}

Outcome vertex_mechanics() {
  const double s = 1.0 / std::sqrt(2.0);
  const double r = 1.0 / std::sqrt(1.5);
  const auto v1 = refine_vertices(VertexSet{Point{1.0, 1.0}}, Point{s, s});
  const auto v2 = refine_vertices(v1, Point{s * r, r});
  const bool fig = v1.size() == 2 && same_set(v1, VertexSet{Point{s, 1.0}, Point{1.0, s}}) && v2.size() == 3 &&
                   same_set(v2, VertexSet{Point{s * r, 1.0}, Point{s, r}, Point{1.0, s}});

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> grid(0, 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScalarFn f = mt::sum_objective;
  int prune_bad = 0, reduce_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    VertexSet v;
    for (int i = 0; i < 1 + t % 25; ++i) {
      std::vector<double> c(n);
      for (auto& x : c) x = grid(rng) / 5.0;
      v.emplace_back(std::move(c));
    }
    VertexSet expect;
    for (const auto& x : v) {
      const bool dom = std::any_of(v.begin(), v.end(), [&](const Point& y) { return dominates(x, y) && !(x == y); });
      if (!dom && std::find(expect.begin(), expect.end(), x) == expect.end()) expect.push_back(x);
    }
    if (!same_set(prune_dominated(v), expect)) ++prune_bad;

    const double f_best = static_cast<double>(n) * u(rng);
    VertexSet kept;
    for (const auto& x : v)
      if (f(x.coords()) + 1e-3 >= f_best) kept.push_back(x);
    if (reduce_vertices(v, f, f_best, 1e-3) != kept) ++reduce_bad;
  }
  return {fig && prune_bad == 0 && reduce_bad == 0,
          fmt("construction |V1|=%zu |V2|=%zu %s, prune mismatches %d/1000, reduce mismatches %d/1000", v1.size(),
              v2.size(), fig ? "matches" : "DIFFERS", prune_bad, reduce_bad)};
}

// ---- 5 ---------------------------------------------------------------------

certify::CertifyConfig unit_box(std::size_t n, double delta, double tau) {
  certify::CertifyConfig cfg;
  cfg.lo.assign(n, 0.0);
  cfg.hi.assign(n, 1.0);
  cfg.signs.assign(n, 1);
  cfg.delta = delta;
  cfg.tau = tau;
  cfg.max_width = 12;
  cfg.max_counterexamples = 64;
  return cfg;
}

/// Sample points with a negative partial derivative.
int audit(const nn::Mlp& net, std::size_t n, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (int s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    if (net.input_gradient(x).minCoeff() < 0.0) ++bad;
  }
  return bad;
}

Outcome certification() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);

  int planted_ok = 0, planted = 0;
  std::vector<std::pair<nn::Mlp, std::size_t>> certified;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const std::size_t width = 8 + static_cast<std::size_t>(t % 5);
    auto net = mt::planted_monotone(rng, n, width);
    ++planted;
    if (certify::certify_two_layer(net, unit_box(n, 0.0, 0.0)).certified) {
      ++planted_ok;
      certified.emplace_back(std::move(net), n);
    }
  }

  // Unit 0 active for x1 > 0.3 with a slope that outweighs every other unit.
  int viol_detected = 0, viol_nets = 0, ce_total = 0, ce_verified = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const std::size_t width = 6 + static_cast<std::size_t>(t % 7);
    nn::Mlp base = t == 0 ? mt::planted_violation() : mt::planted_monotone(rng, n, width);
    if (t > 0) {
      auto layers = base.layers();
      layers[0].weight.row(0).setZero();
      layers[0].weight(0, 0) = 1.0;
      layers[0].bias(0) = -0.3;
      double rest = 0.0;
      for (Eigen::Index j = 1; j < layers[0].weight.rows(); ++j) rest += layers[1].weight(0, j) * layers[0].weight(j, 0);
      layers[1].weight(0, 0) = -(rest + 1.0);
      base = nn::Mlp(layers, false);
    }
    const std::size_t dim = base.input_dim();
    ++viol_nets;
    const auto rep = certify::certify_two_layer(base, unit_box(dim, 0.0, 0.0));
    if (!rep.certified && !rep.counterexamples.empty()) ++viol_detected;
    for (const auto& c : rep.counterexamples) {
      ++ce_total;
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(c.witness.data(), static_cast<Eigen::Index>(dim));
      Eigen::VectorXd d = Eigen::VectorXd::Zero(x.size());
      d(static_cast<Eigen::Index>(c.coordinate)) = 1e-7;
      const double fd = (base.forward(Eigen::VectorXd(x + d))(0) - base.forward(Eigen::VectorXd(x - d))(0)) / 2e-7;
      if (fd < 0.0 && std::abs(fd - c.gradient) < 1e-5) ++ce_verified;
    }
  }

  const auto sliver = mt::planted_sliver();
  const bool sliver_strict = !certify::certify_two_layer(sliver, unit_box(2, 0.0, 0.0)).certified;
  const bool sliver_relaxed = certify::certify_two_layer(sliver, unit_box(2, 0.0, 0.01)).certified;

  // random nets with a positive drift; some certify at delta = 0, tau = 0
  for (int t = 0; t < 300 && certified.size() < 30; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
    const std::size_t width = 6 + static_cast<std::size_t>(t % 7);
    Eigen::MatrixXd w(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(w.rows());
    Eigen::RowVectorXd a(w.rows());
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(j, i) = g(rng) + 0.8;
      b(j) = 0.5 * g(rng);
      a(j) = g(rng) + 0.6;
    }
    auto net = mt::two_layer(w, b, a);
    if (certify::certify_two_layer(net, unit_box(n, 0.0, 0.0)).certified) certified.emplace_back(std::move(net), n);
  }
  int audit_bad = 0;
  for (const auto& [net, n] : certified) audit_bad += audit(net, n, 100000, rng);

  Outcome o;
  o.pass = planted_ok == planted && viol_detected == viol_nets && ce_verified == ce_total && ce_total > 0 &&
           sliver_strict && sliver_relaxed && audit_bad == 0;
  o.detail = fmt("planted monotone certified %d/%d, violations detected %d/%d, counterexamples verified %d/%d, "
                 "sliver fails at tau=0: %s, certified at tau=0.01: %s, audit violations %d over %zu nets x 1e5 points",
                 planted_ok, planted, viol_detected, viol_nets, ce_verified, ce_total, sliver_strict ? "yes" : "no",
                 sliver_relaxed ? "yes" : "no", audit_bad, certified.size());
  return o;
}

// ---- 6 ---------------------------------------------------------------------

std::vector<nn::LabeledSample> family_samples(const ConstraintFamilySampler& s, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<nn::LabeledSample> out;
  for (auto& r : s.draw_many(count, rng)) out.push_back({r.x, r.y, r.z, 1.0});
  return out;
}

std::vector<Eigen::MatrixXd> tower_points(const std::vector<nn::MonotoneTower>& towers, std::size_t count,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::MatrixXd> pts;
  for (const auto& t : towers) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.lo.size()), static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto i = static_cast<std::size_t>(r);
        m(r, c) = t.lo[i] + u(rng) * (t.hi[i] - t.lo[i]);
      }
    pts.push_back(std::move(m));
  }
  return pts;
}

/// Max abs error of analytic vs central-difference gradients of `loss`.
double fd_error(nn::TrainableModel& model, const std::function<double(Eigen::Ref<Eigen::VectorXd>)>& loss) {
  const Eigen::VectorXd theta = model.parameters();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size()), scratch = grad;
  (void)loss(grad);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += 1e-6;
    tm(i) -= 1e-6;
    model.set_parameters(tp);
    const double a = loss(scratch);
    model.set_parameters(tm);
    const double b = loss(scratch);
    worst = std::max(worst, std::abs((a - b) / 2e-6 - grad(i)));
  }
  model.set_parameters(theta);
  return worst;
}

Outcome gradient_correctness() {
  const ConstraintFamilySampler sampler(Family::Quadratic, 4, 1);
  const auto [zlo, zhi] = sampler.parameter_range();
  const auto scaling = nn::fit_scaling(family_samples(sampler, 1024, 60), std::vector<double>(4, 1.0), zlo, zhi,
                                       nn::ValueTransform::Identity);
  const nn::ModelShape shape{8, 2, nn::InitScheme::He};  // mixed signs so the regulariser is active
  const nn::LossConfig cfg{1.0};
  std::string detail;
  double worst = 0.0;
  std::uint64_t seed = 61;
  for (auto v : {nn::RiVariant::HmRi, nn::RiVariant::HRi, nn::RiVariant::MRi, nn::RiVariant::Ri}) {
    auto model = nn::build_variant(v, scaling, shape, seed++);
    std::mt19937_64 rng(seed++);
    const auto batch = nn::augment_homogeneity(family_samples(sampler, 32, seed++), rng);
    // data loss plus the regulariser on every tower (the trained objective
    // regularises only the monotone variants' towers)
    const auto towers = model.towers();
    const auto pts = tower_points(towers, 64, rng);
    const double e = fd_error(model, [&](Eigen::Ref<Eigen::VectorXd> g) {
      double l = model.data_loss(batch, cfg, g);
      const auto ts = model.towers();
      for (std::size_t t = 0; t < ts.size(); ++t) l += nn::block_monotone_penalty(ts[t], pts[t], 0.01, 0.7, g);
      return l;
    });
    const auto mpts = tower_points(model.monotone_towers(), 64, rng);
    const double e2 = fd_error(model, [&](Eigen::Ref<Eigen::VectorXd> g) {
      return nn::total_loss(model, batch, cfg, mpts, 0.01, 0.7, g);
    });
    worst = std::max({worst, e, e2});
    detail += fmt("%s %.1e, ", nn::to_string(v).c_str(), std::max(e, e2));
  }
  auto net = nn::build_constraint_net(scaling, shape, true, seed++);
  std::mt19937_64 rng(seed);
  const auto batch = family_samples(sampler, 32, seed + 1);
  const auto pts = tower_points(net.monotone_towers(), 64, rng);
  const double e = fd_error(net, [&](Eigen::Ref<Eigen::VectorXd> g) {
    return nn::total_loss(net, batch, cfg, pts, 0.01, 0.7, g);
  });
  worst = std::max(worst, e);
  detail += fmt("M-Net %.1e; max %.1e", e, worst);
  return {worst <= 1e-4, detail};
}

// ---- 7 ---------------------------------------------------------------------

bench::ModelSettings quick_model() {
  bench::ModelSettings m;
  m.shape.width = 8;
  m.train.batch_size = 128;
  m.train.iterations_initial = 300;
  m.train.learning_rate = 1e-3;
  m.certify = false;
  return m;
}

Outcome call_counts() {
  bench::ExperimentSpec spec;
  spec.instance_count = 10;
  spec.corpus_seed = 4000;
  spec.seeds = {0};
  spec.methods = {bench::Method::Oracle, bench::Method::MNet, bench::Method::HmRi};
  spec.poa.max_iters = 500;
  spec.bisection_tol = 1e-4;
  spec.model = quick_model();
  const auto records = bench::run_method(spec);
  std::map<std::string, std::pair<double, double>> per;  // evals, calls
  int aborted = 0;
  // an aborted run stops at the empty-ray check; it says nothing about per-call cost
  for (const auto& r : records) {
    if (r.aborted()) {
      ++aborted;
      continue;
    }
    auto& [ev, calls] = per[r.method];
    ev += static_cast<double>(r.constraint_evals + r.model_evals);
    calls += static_cast<double>(r.projection_calls);
  }
  const double oracle = per["ORACLE"].first / per["ORACLE"].second;
  const double mnet = per["M-Net"].first / per["M-Net"].second;
  const double ri = per["HM-RI"].first / per["HM-RI"].second;
  const bool bis_ok = oracle >= 112.0 && oracle <= 120.0 && mnet >= 112.0 && mnet <= 120.0;
  const double ratio = std::min(oracle, mnet) / ri;
  return {bis_ok && ri == 8.0 && ratio >= 10.0,
          fmt("evals per projection: ORACLE %.2f, M-Net %.2f, HM-RI %.2f (model evals); ratio %.1fx; "
              "aborted runs excluded: %d",
              oracle, mnet, ri, ratio, aborted)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome oracle_band() {
  bench::ExperimentSpec spec;
  spec.instance_count = 200;
  spec.corpus_seed = 1000;
  spec.methods = {bench::Method::Oracle};
  const auto rows = bench::report(bench::run_method(spec));
  const auto& r = rows.front();
  return {r.projected_objective >= 0.065 && r.projected_objective <= 0.105,
          fmt("ORACLE mean projected objective %.4f over %zu instances (converged %.0f%%, violation %.1e)",
              r.projected_objective, r.runs, 100.0 * r.converged_fraction, r.violation)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome learned_quality() {
  bench::ExperimentSpec spec;
  spec.instance_count = 30;
  spec.corpus_seed = 5000;
  spec.seeds = {0};
  spec.methods = {bench::Method::Oracle, bench::Method::HmRi};
  spec.model.shape.width = 16;
  spec.model.regime = bench::DataRegime::Unlimited;
  spec.model.train.learning_rate = 1e-3;
  const auto rows = bench::report(bench::run_method(spec));
  double oracle = 0.0, hm = 0.0, viol = 0.0;
  for (const auto& r : rows) {
    if (r.method == "ORACLE") oracle = r.projected_objective;
    if (r.method == "HM-RI") {
      hm = r.projected_objective;
      viol = r.violation;
    }
  }
  const double ratio = hm / oracle;
  return {ratio >= 0.6, fmt("HM-RI %.4f vs ORACLE %.4f: ratio %.3f (raw violation %.2f)", hm, oracle, ratio, viol)};
}

// ---- 10 --------------------------------------------------------------------

Outcome ablation_direction() {
  bench::ExperimentSpec spec;
  spec.family = Family::PowerG35;
  spec.seeds = {0, 1};
  spec.model.shape.width = 16;
  spec.model.train.learning_rate = 2e-4;
  spec.model.train.c_factor = 1.5;
  spec.model.train.c_max = 1.0;
  spec.model.train.max_resets = 30;
  const auto res = bench::ablation_relaxations(spec);
  const auto& relaxed = res.cell(-0.1, 0.01);
  const auto& no_tau = res.cell(-0.1, 0.0);
  const auto& strict = res.cell(0.0, 0.01);
  const auto& strict0 = res.cell(0.0, 0.0);
  const double loss_relaxed = relaxed.mean_loss();
  const double loss_strict = std::min(strict.mean_loss(), strict0.mean_loss());
  const bool delta_ok = loss_relaxed < loss_strict;
  const bool tau_ok = relaxed.mean_restarts() <= no_tau.mean_restarts();
  return {delta_ok && tau_ok,
          fmt("test loss (-0.1, 0.01) %.5f vs best delta=0 cell %.5f (%s); restarts at delta=-0.1: tau=0.01 %.1f, tau=0 %.1f (%s)",
              loss_relaxed, loss_strict, delta_ok ? "improves" : "does not improve", relaxed.mean_restarts(),
              no_tau.mean_restarts(), tau_ok ? "not increased" : "increased")};
}

// ---- 11 --------------------------------------------------------------------

Outcome determinism() {
  const auto dir = scratch_dir();
  bench::ExperimentSpec spec;
  spec.instance_count = 4;
  spec.corpus_seed = 6000;
  spec.seeds = {0};
  spec.methods = {bench::Method::Oracle, bench::Method::HmRi, bench::Method::MNet};
  spec.poa.max_iters = 400;
  spec.model = quick_model();
  spec.model.certify = true;
  spec.model.train.max_resets = 2;
  spec.model.train.iterations_per_reset = 50;

  std::vector<std::vector<bench::RunRecord>> runs;
  for (int k = 0; k < 2; ++k) {
    const auto path = dir / fmt("records_%d.jsonl", k);
    {
      bench::RecordWriter w(path);
      (void)bench::run_method(spec, [&](const bench::RunRecord& r) { w.append(r); });
    }
    runs.push_back(bench::load_records(path));
  }
  bool same = runs[0].size() == runs[1].size() && !runs[0].empty();
  for (std::size_t i = 0; same && i < runs[0].size(); ++i) {
    auto a = runs[0][i], b = runs[1][i];
    a.wall_time = b.wall_time = 0.0;
    same = a == b;
  }

  int model_ok = 0, model_total = 0;
  for (auto m : {bench::Method::HmRi, bench::Method::MRi, bench::Method::MNet}) {
    auto settings = quick_model();
    settings.train.iterations_initial = 50;
    const auto trained = bench::train_surrogate(m, Family::Quadratic, 4, 8, settings, 3);
    nn::AnyModel any;
    if (const auto* ri = dynamic_cast<const nn::HmRiModel*>(trained.model.get())) {
      any = *ri;
    } else {
      any = dynamic_cast<const nn::ConstraintNet&>(*trained.model);
    }
    const auto path = dir / "model.json";
    nn::save_model(any, path);
    const auto bytes = slurp(path);
    const auto back = nn::load_model(path);
    nn::save_model(back, path);
    const bool params_equal =
        std::visit([](const auto& x) { return x.parameters(); }, back) == trained.model->parameters();
    ++model_total;
    if (params_equal && slurp(path) == bytes) ++model_ok;
  }

  int inst_ok = 0, inst_total = 0;
  for (auto fam : {Family::Quadratic, Family::Multiplicative, Family::PowerG2, Family::PowerG35}) {
    const auto inst = generate_instance(fam, 4, 8, 3, 61);
    const auto path = dir / "instance.json";
    save_instance(inst, path);
    const auto bytes = slurp(path);
    const auto back = load_instance(path);
    save_instance(back, path);
    ++inst_total;
    if (slurp(path) == bytes && instance_parameters(back) == instance_parameters(inst)) ++inst_ok;
  }
  return {same && model_ok == model_total && inst_ok == inst_total,
          fmt("bench re-run %s (%zu records), model round trips %d/%d, instance round trips %d/%d",
              same ? "identical" : "DIFFERS", runs[0].size(), model_ok, model_total, inst_ok, inst_total)};
}

struct Criterion {
  int id;
  const char* title;
  double limit;  // seconds; 0 = none
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "radial-inverse properties", 10.0, radial_inverse_properties},
    {2, "projection equivalence", 30.0, projection_equivalence},
    {3, "POA exactness", 120.0, poa_exactness},
    {4, "vertex mechanics", 0.0, vertex_mechanics},
    {5, "certification correctness", 120.0, certification},
    {6, "gradient correctness", 60.0, gradient_correctness},
    {7, "call-count speedup", 0.0, call_counts},
    {8, "ORACLE objective band", 600.0, oracle_band},
    {9, "learned projection quality", 1800.0, learned_quality},
    {10, "relaxation ablation direction", 0.0, ablation_direction},
    {11, "determinism and serialization", 0.0, determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monopoa acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-11)");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  bool ran = false;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c.limit > 0.0 && secs > c.limit) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", c.limit);
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << o.detail
              << fmt(" (%.1f s)", secs) << std::endl;
  }
  if (!ran) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
