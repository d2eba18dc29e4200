#include "monopoa/poa.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace monopoa {

void PoaConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("PoaConfig: eps must be > 0");
  if (v_max < 1) throw std::invalid_argument("PoaConfig: v_max must be >= 1");
  if (origin_shift_alpha < 0.0) throw std::invalid_argument("PoaConfig: origin_shift_alpha must be >= 0");
  if (!(axis_tol >= 0.0 && axis_tol < 1.0)) throw std::invalid_argument("PoaConfig: axis_tol must be in [0, 1)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::IterLimit: return "IterLimit";
    case Termination::VertexStarvation: return "VertexStarvation";
    case Termination::ProjectionError: return "ProjectionError";
  }
  return "Unknown";
}

Termination termination_from_string(const std::string& s) {
  if (s == "Converged") return Termination::Converged;
  if (s == "IterLimit") return Termination::IterLimit;
  if (s == "VertexStarvation") return Termination::VertexStarvation;
  if (s == "ProjectionError") return Termination::ProjectionError;
  throw std::invalid_argument("unknown termination '" + s + "'");
}

RefineSplit refine_split(const VertexSet& v, const Point& z, const HFilter& in_h, const std::vector<bool>& cut) {
  const std::size_t n = z.size();
  std::vector<bool> mask = cut.empty() ? std::vector<bool>(n, true) : cut;
  if (mask.size() != n) throw DimensionMismatch("refine: cut mask has the wrong length");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) idx.push_back(i);
  }
  const double* zc = z.coords().data();

  RefineSplit out;
  out.kept.reserve(v.size());
  std::vector<std::size_t> removed;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (v[p].size() != n) throw DimensionMismatch("refine: vertex dimension mismatch");
    const double* s = v[p].coords().data();
    bool above = true;
    for (std::size_t i : idx) {
      if (!(s[i] > zc[i])) {
        above = false;
        break;
      }
    }
    (above ? removed : out.kept).push_back(p);
  }
  if (removed.empty()) return out;

  VertexSet cand;
  for (std::size_t p : removed) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      std::vector<double> c = v[p].values();
      c[i] = z[i];
      bool inside_other = false;
      for (std::size_t q : removed) {
        if (q != p && dominates(std::span<const double>(c), v[q].coords())) {
          inside_other = true;
          break;
        }
      }
      if (inside_other) continue;
      Point pt(std::move(c));
      if (in_h && !in_h(pt)) continue;
      cand.push_back(std::move(pt));
    }
  }
  cand = prune_dominated(cand);

  // A kept vertex t can dominate a candidate only through an exact tie
  // t_i == z_i on a cut coordinate.
  std::vector<std::size_t> tied;
  for (std::size_t p : out.kept) {
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] && v[p][i] == z[i]) {
        tied.push_back(p);
        break;
      }
    }
  }
  for (auto& c : cand) {
    const bool dominated = std::any_of(tied.begin(), tied.end(), [&](std::size_t p) { return dominates(c, v[p]); });
    if (!dominated) out.added.push_back(std::move(c));
  }
  return out;
}

VertexSet refine_vertices(const VertexSet& v, const Point& z, const HFilter& in_h, const std::vector<bool>& cut) {
  auto split = refine_split(v, z, in_h, cut);
  VertexSet out;
  out.reserve(split.kept.size() + split.added.size());
  for (std::size_t p : split.kept) out.push_back(v[p]);
  for (auto& a : split.added) out.push_back(std::move(a));
  return out;
}

VertexSet reduce_vertices(const VertexSet& v, const ScalarFn& f, double f_best, double eps) {
  VertexSet out;
  for (const auto& s : v) {
    if (!(f(s.coords()) + eps < f_best)) out.push_back(s);
  }
  return out;
}

MonotoneProblem origin_shift(const MonotoneProblem& problem, double alpha) {
  problem.validate();
  if (alpha < 0.0) throw std::invalid_argument("origin_shift: alpha must be >= 0");
  if (alpha == 0.0) return problem;
  const std::size_t n = problem.n;
  auto shift_neg = [alpha](std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - alpha;
    return y;
  };
  auto shift_pos = [alpha](std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i] - alpha, 0.0);
    return y;
  };

  MonotoneProblem out;
  out.n = n;
  out.objective = [f = problem.objective, shift_neg](std::span<const double> x) { return f(shift_neg(x)); };
  for (const auto& g : problem.upper) {
    out.upper.emplace_back(CustomConstraint{
        [g, shift_pos](std::span<const double> x) { return eval_constraint(g, shift_pos(x)); }, "shifted"});
  }
  out.upper_thresholds = problem.upper_thresholds;
  for (const auto& h : problem.lower) {
    out.lower.emplace_back(CustomConstraint{
        [h, shift_neg](std::span<const double> x) { return eval_constraint(h, shift_neg(x)); }, "shifted"});
  }
  out.lower_thresholds = problem.lower_thresholds;
  out.lower.emplace_back(CustomConstraint{[](std::span<const double> x) {
                                            double m = kInfinity;
                                            for (double v : x) m = std::min(m, v);
                                            return m;
                                          },
                                          "min_coordinate"});
  out.lower_thresholds.push_back(alpha);
  std::vector<double> b = problem.bound.values();
  for (auto& v : b) v += alpha;
  out.bound = Point(std::move(b));
  return out;
}

Point unshift(const Point& y, double alpha) {
  std::vector<double> x = y.values();
  for (auto& v : x) v = std::max(v - alpha, 0.0);
  return Point(std::move(x));
}

PoaResult solve(const MonotoneProblem& problem, const ProjectionOracle& proj, const PoaConfig& cfg) {
  problem.validate();
  cfg.validate();
  const auto before = proj.counters();
  const std::size_t n = problem.n;
  const Point& b = problem.bound;
  auto in_h = [&problem](const Point& p) { return problem.in_h(p); };
  const HFilter h_filter = problem.lower.empty() ? HFilter{} : HFilter(in_h);

  PoaResult res;
  VertexSet verts{b};
  std::vector<double> fv{problem.f(b)};
  Point x_hat = b;
  double f_hat = fv.front();
  bool have_best = false;

  auto finish = [&](Termination t) {
    res.termination = t;
    res.upper_bound = f_hat;
    const auto after = proj.counters();
    res.projection_calls = after.projection_calls - before.projection_calls;
    res.constraint_evals = after.constraint_evals - before.constraint_evals;
    res.model_evals = after.model_evals - before.model_evals;
    return res;
  };

  while (!(have_best && res.best_value + cfg.eps >= f_hat)) {
    if (res.iterations >= cfg.max_iters) return finish(Termination::IterLimit);
    ++res.iterations;

    Point z;
    try {
      z = proj.project(x_hat);
    } catch (const UnboundedNormalSetError&) {
      proj.note_unbounded_clamp();
      ++res.unbounded_clamps;
      z = x_hat.scaled(std::max(1.0, ray_clamp_factor(x_hat, b)));
    } catch (const std::exception& e) {
      res.error = e.what();
      return finish(Termination::ProjectionError);
    }
    const bool stall = dominates(x_hat, z);
    if (stall) z = x_hat;

    if (verts.size() > cfg.v_max) {
      verts = {b};
      fv = {problem.f(b)};
      ++res.restarts;
    }

    const double fz = problem.f(z);
    if (fz > res.best_value && problem.in_h(z)) {
      res.best_value = fz;
      res.best_point = z;
      have_best = true;
    }

    if (stall) {
      for (std::size_t p = 0; p < verts.size(); ++p) {
        if (verts[p] == x_hat) {
          verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(p));
          fv.erase(fv.begin() + static_cast<std::ptrdiff_t>(p));
          break;
        }
      }
    } else {
      std::vector<bool> cut(n);
      for (std::size_t i = 0; i < n; ++i) cut[i] = x_hat[i] > cfg.axis_tol * b[i];
      auto split = refine_split(verts, z, h_filter, cut);
      // kept is ascending, so compaction in place is safe
      std::size_t w = 0;
      for (std::size_t p : split.kept) {
        if (w != p) {
          verts[w] = std::move(verts[p]);
          fv[w] = fv[p];
        }
        ++w;
      }
      verts.resize(w);
      fv.resize(w);
      for (auto& a : split.added) {
        fv.push_back(problem.f(a));
        verts.push_back(std::move(a));
      }
    }

    if (have_best) {
      std::size_t w = 0;
      for (std::size_t p = 0; p < verts.size(); ++p) {
        if (!(fv[p] + cfg.eps < res.best_value)) {
          if (w != p) {
            verts[w] = std::move(verts[p]);
            fv[w] = fv[p];
          }
          ++w;
        }
      }
      verts.resize(w);
      fv.resize(w);
    }
    res.max_vertices = std::max(res.max_vertices, verts.size());

    if (verts.empty()) {
      return finish(have_best ? Termination::Converged : Termination::VertexStarvation);
    }
    std::size_t arg = 0;
    for (std::size_t p = 1; p < verts.size(); ++p) {
      if (fv[p] > fv[arg] || (fv[p] == fv[arg] && lexicographic_less(verts[p], verts[arg]))) arg = p;
    }
    x_hat = verts[arg];
    f_hat = fv[arg];

    if (cfg.trace) {
      *cfg.trace << res.iterations << ' ' << verts.size() << ' ' << f_hat << ' ' << res.best_value << '\n';
    }
  }
  return finish(Termination::Converged);
}

PoaResult solve_shifted(const MonotoneProblem& problem,
                        const std::function<ProjectionOracle(const MonotoneProblem&)>& make_oracle,
                        const PoaConfig& cfg) {
  const double alpha = cfg.origin_shift_alpha;
  if (alpha <= 0.0) {
    const auto oracle = make_oracle(problem);
    return solve(problem, oracle, cfg);
  }
  const auto shifted = origin_shift(problem, alpha);
  const auto oracle = make_oracle(shifted);
  auto res = solve(shifted, oracle, cfg);
  if (res.best_point) {
    res.best_point = unshift(*res.best_point, alpha);
    res.best_value = problem.f(*res.best_point);
  }
  return res;
}

}  // namespace monopoa
