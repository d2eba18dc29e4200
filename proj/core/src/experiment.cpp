#include "monopoa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"
#include "monopoa/instance_io.hpp"
#include "monopoa/projection.hpp"

namespace monopoa::bench {

using detail::json;
namespace nn = neural;

std::string to_string(Method m) {
  switch (m) {
    case Method::HmRi: return "HM-RI";
    case Method::HRi: return "H-RI";
    case Method::MRi: return "M-RI";
    case Method::Ri: return "RI";
    case Method::MNet: return "M-Net";
    case Method::Oracle: return "ORACLE";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::HmRi, Method::HRi, Method::MRi, Method::Ri, Method::MNet, Method::Oracle}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::string to_string(DataRegime r) { return r == DataRegime::Limited ? "limited" : "unlimited"; }

DataRegime regime_from_string(const std::string& s) {
  if (s == "limited") return DataRegime::Limited;
  if (s == "unlimited") return DataRegime::Unlimited;
  throw std::invalid_argument("unknown data regime '" + s + "'");
}

bool is_radial_inverse(Method m) { return m != Method::MNet && m != Method::Oracle; }

nn::RiVariant variant_of(Method m) {
  switch (m) {
    case Method::HmRi: return nn::RiVariant::HmRi;
    case Method::HRi: return nn::RiVariant::HRi;
    case Method::MRi: return nn::RiVariant::MRi;
    case Method::Ri: return nn::RiVariant::Ri;
    default: break;
  }
  throw std::invalid_argument("method " + to_string(m) + " is not a radial-inverse variant");
}

void ExperimentSpec::validate() const {
  if (instance_count < 1) throw std::invalid_argument("spec: instance_count must be >= 1");
  if (n < 1 || m_g < 1) throw std::invalid_argument("spec: n and m_g must be >= 1");
  if (family == Family::Multiplicative && k < 1) throw std::invalid_argument("spec: k must be >= 1");
  if (methods.empty()) throw std::invalid_argument("spec: no methods");
  poa.validate();
  if (!(bisection_tol > 0.0 && bisection_tol < 1.0)) throw std::invalid_argument("spec: bisection_tol in (0, 1)");
  const bool learned = std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::Oracle; });
  if (learned) {
    if (seeds.empty()) throw std::invalid_argument("spec: learned methods need at least one seed");
    model.train.validate();
    if (model.shape.width < 1 || model.shape.blocks < 1) throw std::invalid_argument("spec: bad model shape");
    if (model.regime == DataRegime::Limited && model.limited_count < 1) {
      throw std::invalid_argument("spec: limited_count must be >= 1");
    }
  }
}

// ---- spec documents --------------------------------------------------------

namespace {

json train_to_json(const nn::TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},   {"batch_size", t.batch_size},
          {"iterations_initial", t.iterations_initial}, {"iterations_per_reset", t.iterations_per_reset},
          {"max_resets", t.max_resets},         {"beta", t.beta},
          {"c_init", t.c_init},                 {"c_factor", t.c_factor},
          {"c_max", t.c_max},                   {"eta", t.eta},
          {"delta", t.delta},                   {"tau", t.tau},
          {"regularizer_points", t.regularizer_points}, {"log_every", t.log_every}};
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

nn::TrainConfig train_from_json(const json& j) {
  nn::TrainConfig t;
  get_if(j, "learning_rate", t.learning_rate);
  get_if(j, "batch_size", t.batch_size);
  get_if(j, "iterations_initial", t.iterations_initial);
  get_if(j, "iterations_per_reset", t.iterations_per_reset);
  get_if(j, "max_resets", t.max_resets);
  get_if(j, "beta", t.beta);
  get_if(j, "c_init", t.c_init);
  get_if(j, "c_factor", t.c_factor);
  get_if(j, "c_max", t.c_max);
  get_if(j, "eta", t.eta);
  get_if(j, "delta", t.delta);
  get_if(j, "tau", t.tau);
  get_if(j, "regularizer_points", t.regularizer_points);
  get_if(j, "log_every", t.log_every);
  return t;
}

std::string init_name(nn::InitScheme s) { return s == nn::InitScheme::He ? "he" : "sign_structured"; }

nn::InitScheme init_from_name(const std::string& s) {
  if (s == "he") return nn::InitScheme::He;
  if (s == "sign_structured") return nn::InitScheme::SignStructured;
  throw std::invalid_argument("unknown init scheme '" + s + "'");
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& s) {
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(to_string(m));
  json j{{"format", "monopoa-experiment"},
         {"version", 1},
         {"family", to_string(s.family)},
         {"n", s.n},
         {"m_g", s.m_g},
         {"k", s.k},
         {"instance_count", s.instance_count},
         {"corpus_seed", s.corpus_seed},
         {"seeds", s.seeds},
         {"methods", methods},
         {"bisection_tol", s.bisection_tol},
         {"poa",
          {{"eps", s.poa.eps},
           {"v_max", s.poa.v_max},
           {"max_iters", s.poa.max_iters},
           {"origin_shift_alpha", s.poa.origin_shift_alpha},
           {"axis_tol", s.poa.axis_tol}}},
         {"model",
          {{"width", s.model.shape.width},
           {"blocks", s.model.shape.blocks},
           {"init", init_name(s.model.shape.init)},
           {"regime", to_string(s.model.regime)},
           {"limited_count", s.model.limited_count},
           {"certify", s.model.certify},
           {"max_width", s.model.max_width},
           {"train", train_to_json(s.model.train)}}},
         {"corpus", s.corpus},
         {"output", s.output}};
  return j.dump(2);
}

ExperimentSpec spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  detail::check_format(j, "monopoa-experiment", 1);
  ExperimentSpec s;
  if (j.contains("family")) s.family = family_from_string(j.at("family").get<std::string>());
  get_if(j, "n", s.n);
  get_if(j, "m_g", s.m_g);
  get_if(j, "k", s.k);
  get_if(j, "instance_count", s.instance_count);
  get_if(j, "corpus_seed", s.corpus_seed);
  get_if(j, "seeds", s.seeds);
  if (j.contains("methods")) {
    s.methods.clear();
    for (const auto& m : j.at("methods")) s.methods.push_back(method_from_string(m.get<std::string>()));
  } else if (j.contains("method")) {
    s.methods = {method_from_string(j.at("method").get<std::string>())};
  }
  get_if(j, "bisection_tol", s.bisection_tol);
  if (j.contains("poa")) {
    const auto& p = j.at("poa");
    get_if(p, "eps", s.poa.eps);
    get_if(p, "v_max", s.poa.v_max);
    get_if(p, "max_iters", s.poa.max_iters);
    get_if(p, "origin_shift_alpha", s.poa.origin_shift_alpha);
    get_if(p, "axis_tol", s.poa.axis_tol);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    get_if(m, "width", s.model.shape.width);
    get_if(m, "blocks", s.model.shape.blocks);
    if (m.contains("init")) s.model.shape.init = init_from_name(m.at("init").get<std::string>());
    if (m.contains("regime")) s.model.regime = regime_from_string(m.at("regime").get<std::string>());
    get_if(m, "limited_count", s.model.limited_count);
    get_if(m, "certify", s.model.certify);
    get_if(m, "max_width", s.model.max_width);
    if (m.contains("train")) s.model.train = train_from_json(m.at("train"));
  }
  get_if(j, "corpus", s.corpus);
  get_if(j, "output", s.output);
  s.validate();
  return s;
}

// ---- evaluation --------------------------------------------------------------

Metrics evaluate(const Point& x_star, const MonotoneProblem& truth) {
  Metrics m;
  m.raw_objective = truth.f(x_star);
  m.violation = truth.violation(x_star.coords());
  try {
    const auto proj = bisection_project(x_star, truth.upper, truth.upper_thresholds, 1e-6);
    m.projected_objective = truth.f(proj.point);
  } catch (const EmptyRayError&) {
    m.projected_objective = truth.f(Point::zeros(x_star.size()));
  }
  return m;
}

// ---- records -----------------------------------------------------------------

bool RunRecord::aborted() const {
  return termination == to_string(Termination::ProjectionError) || termination == "TrainingError";
}

std::string record_to_json(const RunRecord& r) {
  const json j{{"instance", r.instance},
               {"instance_seed", r.instance_seed},
               {"family", r.family},
               {"method", r.method},
               {"seed", r.seed},
               {"projected_objective", r.projected_objective},
               {"raw_objective", r.raw_objective},
               {"violation", r.violation},
               {"poa_iterations", r.poa_iterations},
               {"projection_calls", r.projection_calls},
               {"constraint_evals", r.constraint_evals},
               {"model_evals", r.model_evals},
               {"restarts", r.restarts},
               {"certified", r.certified},
               {"wall_time", r.wall_time},
               {"termination", r.termination}};
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  RunRecord r;
  r.instance = j.at("instance").get<std::size_t>();
  r.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  r.family = j.at("family").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.projected_objective = j.at("projected_objective").get<double>();
  r.raw_objective = j.at("raw_objective").get<double>();
  r.violation = j.at("violation").get<double>();
  r.poa_iterations = j.at("poa_iterations").get<std::size_t>();
  r.projection_calls = j.at("projection_calls").get<std::size_t>();
  r.constraint_evals = j.at("constraint_evals").get<std::size_t>();
  r.model_evals = j.at("model_evals").get<std::size_t>();
  r.restarts = j.at("restarts").get<std::size_t>();
  r.certified = j.at("certified").get<bool>();
  r.wall_time = j.at("wall_time").get<double>();
  r.termination = j.at("termination").get<std::string>();
  return r;
}

namespace {
std::string record_header() {
  return json{{"format", "monopoa-records"}, {"version", kRecordSchemaVersion}}.dump();
}
}  // namespace

RecordWriter::RecordWriter(const std::filesystem::path& path) : path_(path) {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path_.string());
  out << record_header() << '\n';
}

void RecordWriter::append(const RunRecord& r) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path_.string());
  out << record_to_json(r) << '\n';
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path.string()));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty record file " + path.string());
  detail::check_format(json::parse(line), "monopoa-records", kRecordSchemaVersion);
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(record_from_json(line));
  }
  return out;
}

// ---- corpus ------------------------------------------------------------------

std::vector<Instance> prepare_corpus(const ExperimentSpec& spec) {
  if (!spec.corpus.empty() && std::filesystem::exists(spec.corpus)) {
    auto corpus = load_corpus(spec.corpus);
    if (corpus.size() < spec.instance_count) throw std::runtime_error("corpus has fewer instances than requested");
    corpus.resize(spec.instance_count);
    for (const auto& inst : corpus) {
      if (family_of(inst) != spec.family) throw std::runtime_error("corpus family does not match the spec");
    }
    return corpus;
  }
  std::vector<Instance> corpus;
  corpus.reserve(spec.instance_count);
  for (std::size_t i = 0; i < spec.instance_count; ++i) {
    corpus.push_back(generate_instance(spec.family, spec.n, spec.m_g, spec.k, spec.corpus_seed + i));
  }
  if (!spec.corpus.empty()) save_corpus(corpus, spec.corpus);
  return corpus;
}

// ---- training ----------------------------------------------------------------

namespace {

// Seeds of training corpora live far away from evaluation corpus seeds.
constexpr std::uint64_t kTrainSeedBase = 0x7000000000ULL;

nn::ValueTransform transform_for(Family f) {
  return f == Family::Multiplicative ? nn::ValueTransform::Log : nn::ValueTransform::Identity;
}

nn::LabeledSample labeled(ConstraintSample s) { return {std::move(s.x), s.y, std::move(s.z), 1.0}; }

std::vector<nn::LabeledSample> labeled(std::vector<ConstraintSample> v) {
  std::vector<nn::LabeledSample> out;
  out.reserve(v.size());
  for (auto& s : v) out.push_back(labeled(std::move(s)));
  return out;
}

// Limited regime: records from the training corpus's own constraints.
std::vector<nn::LabeledSample> limited_records(Family family, std::size_t n, std::size_t k, std::size_t count,
                                               std::uint64_t seed) {
  constexpr std::size_t per_instance = 64;
  constexpr std::size_t m_g = 8;
  std::vector<nn::LabeledSample> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    const auto s = kTrainSeedBase + seed * 100000 + i;
    const auto inst = generate_instance(family, n, m_g, k, s);
    auto recs = labeled(sample_constraint_data(inst, std::min(per_instance, count - out.size()), s));
    for (auto& r : recs) out.push_back(std::move(r));
  }
  return out;
}

nn::InputScaling scaling_for(const ConstraintFamilySampler& sampler, std::uint64_t seed) {
  std::mt19937_64 rng(kTrainSeedBase ^ (seed * 0x9E3779B97F4A7C15ULL));
  const auto samples = labeled(sampler.draw_many(4096, rng));
  auto [zlo, zhi] = sampler.parameter_range();
  return nn::fit_scaling(samples, std::vector<double>(sampler.n(), 1.0), zlo, zhi, transform_for(sampler.family()));
}

}  // namespace

TrainedModel train_surrogate(Method method, Family family, std::size_t n, std::size_t k,
                             const ModelSettings& settings, std::uint64_t seed) {
  if (method == Method::Oracle) throw std::invalid_argument("ORACLE has no surrogate");
  const ConstraintFamilySampler sampler(family, n, k);
  const auto scaling = scaling_for(sampler, seed);
  auto cfg = settings.train;
  cfg.seed = seed;

  TrainedModel out;
  bool augment = false;
  if (method == Method::MNet) {
    out.model = std::make_shared<nn::ConstraintNet>(nn::build_constraint_net(scaling, settings.shape, true, seed));
  } else {
    const auto v = variant_of(method);
    augment = nn::uses_augmentation(v);
    out.model = std::make_shared<nn::HmRiModel>(nn::build_variant(v, scaling, settings.shape, seed));
  }

  std::unique_ptr<nn::DataSource> data;
  if (settings.regime == DataRegime::Limited) {
    auto recs = limited_records(family, n, k, settings.limited_count, seed);
    if (augment) {
      std::mt19937_64 rng(seed + 1);
      recs = nn::augment_homogeneity(recs, rng);
    }
    data = std::make_unique<nn::FixedData>(std::move(recs));
  } else {
    data = std::make_unique<nn::StreamData>([sampler, augment](std::size_t size, std::mt19937_64& rng) {
      if (!augment) return labeled(sampler.draw_many(size, rng));
      const auto base = labeled(sampler.draw_many(std::max<std::size_t>(1, size / 2), rng));
      return nn::augment_homogeneity(base, rng);
    });
  }

  nn::Certifier certifier;
  if (settings.certify) {
    certifier = [delta = cfg.delta, tau = cfg.tau, w = settings.max_width](const nn::TrainableModel& m) {
      return certify::certify_model(m, delta, tau, w, true).certified;
    };
  }
  out.report = nn::train(*out.model, *data, cfg, certifier);
  return out;
}

// ---- solving -----------------------------------------------------------------

RunRecord run_instance(Method method, const Instance& instance, std::size_t index, const TrainedModel* model,
                       const ExperimentSpec& spec, std::uint64_t seed) {
  RunRecord rec;
  rec.instance = index;
  rec.instance_seed = seed_of(instance);
  rec.family = to_string(family_of(instance));
  rec.method = to_string(method);
  rec.seed = method == Method::Oracle ? 0 : seed;
  if (model) {
    rec.restarts = model->report.restarts;
    rec.certified = model->report.certified;
  }

  const auto truth = to_problem(instance);
  const auto t0 = std::chrono::steady_clock::now();
  PoaResult res;
  try {
    const auto m = constraint_count(instance);
    std::function<ProjectionOracle(const MonotoneProblem&)> make_oracle;
    MonotoneProblem working = truth;
    if (method == Method::Oracle) {
      make_oracle = [&](const MonotoneProblem& p) { return make_bisection_oracle(p, spec.bisection_tol); };
    } else if (method == Method::MNet) {
      if (!model) throw std::invalid_argument("M-Net run without a model");
      auto net = std::dynamic_pointer_cast<const nn::ConstraintNet>(model->model);
      if (!net) throw std::invalid_argument("M-Net run needs a constraint model");
      working.upper.clear();
      for (std::size_t j = 0; j < m; ++j) {
        working.upper.emplace_back(LearnedConstraint{net, constraint_parameters(instance, j)});
      }
      make_oracle = [&](const MonotoneProblem& p) { return make_bisection_oracle(p, spec.bisection_tol); };
    } else {
      if (!model) throw std::invalid_argument("radial-inverse run without a model");
      auto ri = std::dynamic_pointer_cast<const nn::HmRiModel>(model->model);
      if (!ri) throw std::invalid_argument("radial-inverse run needs a radial-inverse model");
      LearnedRiStrategy s{ri, {}, truth.upper_thresholds};
      for (std::size_t j = 0; j < m; ++j) s.z.push_back(constraint_parameters(instance, j));
      if (spec.poa.origin_shift_alpha > 0.0) {
        throw std::invalid_argument("learned radial inverses do not support the origin shift");
      }
      make_oracle = [s](const MonotoneProblem& p) { return ProjectionOracle(s, p.bound); };
    }
    res = solve_shifted(working, make_oracle, spec.poa);
  } catch (const std::exception& e) {
    res.termination = Termination::ProjectionError;
    res.error = e.what();
  }

  if (res.best_point) {
    const auto metrics = evaluate(*res.best_point, truth);
    rec.projected_objective = metrics.projected_objective;
    rec.raw_objective = metrics.raw_objective;
    rec.violation = metrics.violation;
  } else {
    // No candidate: score the origin, which every generated family admits.
    const auto origin = Point::zeros(truth.n);
    rec.projected_objective = rec.raw_objective = truth.f(origin);
    rec.violation = truth.violation(origin.coords());
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.poa_iterations = res.iterations;
  rec.projection_calls = res.projection_calls;
  rec.constraint_evals = res.constraint_evals;
  rec.model_evals = res.model_evals;
  rec.termination = to_string(res.termination);
  return rec;
}

std::vector<RunRecord> run_method(const ExperimentSpec& spec, const std::function<void(const RunRecord&)>& sink) {
  spec.validate();
  const auto corpus = prepare_corpus(spec);
  std::vector<RunRecord> out;
  auto emit = [&](RunRecord r) {
    if (sink) sink(r);
    out.push_back(std::move(r));
  };

  for (Method method : spec.methods) {
    if (method == Method::Oracle) {
      for (std::size_t i = 0; i < corpus.size(); ++i) emit(run_instance(method, corpus[i], i, nullptr, spec, 0));
      continue;
    }
    for (std::uint64_t seed : spec.seeds) {
      TrainedModel model;
      try {
        model = train_surrogate(method, spec.family, spec.n, spec.k, spec.model, seed);
      } catch (const std::exception&) {
        for (std::size_t i = 0; i < corpus.size(); ++i) {
          RunRecord r;
          r.instance = i;
          r.instance_seed = seed_of(corpus[i]);
          r.family = to_string(spec.family);
          r.method = to_string(method);
          r.seed = seed;
          r.termination = "TrainingError";
          emit(std::move(r));
        }
        continue;
      }
      for (std::size_t i = 0; i < corpus.size(); ++i) emit(run_instance(method, corpus[i], i, &model, spec, seed));
    }
  }
  return out;
}

// ---- ablation ----------------------------------------------------------------

double AblationCell::mean_loss() const {
  if (test_loss.empty()) return 0.0;
  return std::accumulate(test_loss.begin(), test_loss.end(), 0.0) / static_cast<double>(test_loss.size());
}

double AblationCell::mean_restarts() const {
  if (restarts.empty()) return 0.0;
  return static_cast<double>(std::accumulate(restarts.begin(), restarts.end(), std::size_t{0})) /
         static_cast<double>(restarts.size());
}

const AblationCell& AblationResult::cell(double delta, double tau) const {
  for (const auto& c : cells) {
    if (c.delta == delta && c.tau == tau) return c;
  }
  throw std::out_of_range("no ablation cell for the requested (delta, tau)");
}

AblationResult ablation_relaxations(const ExperimentSpec& spec, std::size_t test_samples) {
  if (spec.family != Family::PowerG2 && spec.family != Family::PowerG35) {
    throw std::invalid_argument("the relaxation ablation runs on a power family");
  }
  if (spec.seeds.empty()) throw std::invalid_argument("ablation needs at least one seed");
  const ConstraintFamilySampler sampler(spec.family, spec.n, spec.k);
  std::mt19937_64 test_rng(kTrainSeedBase - 1);
  const auto test = labeled(sampler.draw_many(test_samples, test_rng));

  AblationResult result;
  for (double delta : {-0.1, 0.0}) {
    for (double tau : {0.01, 0.0}) {
      AblationCell cell{delta, tau, delta < 0.0 ? 0.0 : 0.01, {}, {}, {}};
      for (std::uint64_t seed : spec.seeds) {
        auto settings = spec.model;
        settings.certify = true;
        settings.train.delta = delta;
        settings.train.tau = tau;
        settings.train.eta = cell.eta;
        const auto trained = train_surrogate(Method::MNet, spec.family, spec.n, spec.k, settings, seed);
        cell.test_loss.push_back(nn::mean_squared_error(*trained.model, test));
        cell.restarts.push_back(trained.report.restarts);
        cell.certified.push_back(trained.report.certified);
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {
double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}
}  // namespace

std::string format_ablation(const AblationResult& result) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "delta" << std::setw(8) << "tau" << std::setw(8) << "eta" << std::setw(24)
     << "test_loss (sd)" << std::setw(20) << "restarts (sd)" << "certified\n";
  for (const auto& c : result.cells) {
    std::vector<double> r(c.restarts.begin(), c.restarts.end());
    std::ostringstream loss, rs;
    loss << std::setprecision(4) << c.mean_loss() << " (" << stddev(c.test_loss) << ")";
    rs << std::setprecision(4) << c.mean_restarts() << " (" << stddev(r) << ")";
    os << std::left << std::setw(8) << c.delta << std::setw(8) << c.tau << std::setw(8) << c.eta << std::setw(24)
       << loss.str() << std::setw(20) << rs.str() << std::count(c.certified.begin(), c.certified.end(), true) << "/"
       << c.certified.size() << "\n";
  }
  return os.str();
}

// ---- reports -----------------------------------------------------------------

std::vector<SummaryRow> report(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("report: no records");
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : records) {
    auto key = std::make_pair(r.family, r.method);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& g = groups[key];
    SummaryRow row;
    row.family = key.first;
    row.method = key.second;
    row.runs = g.size();
    std::size_t converged = 0;
    double calls = 0.0, evals = 0.0;
    for (const auto* r : g) {
      row.projected_objective += r->projected_objective;
      row.raw_objective += r->raw_objective;
      row.violation += r->violation;
      row.projection_calls += static_cast<double>(r->projection_calls);
      row.constraint_evals += static_cast<double>(r->constraint_evals);
      row.model_evals += static_cast<double>(r->model_evals);
      row.wall_time += r->wall_time;
      calls += static_cast<double>(r->projection_calls);
      evals += static_cast<double>(r->constraint_evals + r->model_evals);
      if (r->termination == to_string(Termination::Converged)) ++converged;
    }
    const auto k = static_cast<double>(g.size());
    row.projected_objective /= k;
    row.raw_objective /= k;
    row.violation /= k;
    row.projection_calls /= k;
    row.constraint_evals /= k;
    row.model_evals /= k;
    row.wall_time /= k;
    row.evals_per_projection = calls > 0.0 ? evals / calls : 0.0;
    row.converged_fraction = static_cast<double>(converged) / k;
    row.not_available = 2 * converged < g.size();
    rows.push_back(row);
  }
  return rows;
}

std::string format_report(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "family" << std::setw(8) << "method" << std::right << std::setw(6) << "runs"
     << std::setw(11) << "P-Obj" << std::setw(11) << "Obj" << std::setw(11) << "Viol" << std::setw(10) << "calls"
     << std::setw(12) << "g-evals" << std::setw(12) << "m-evals" << std::setw(10) << "ev/call" << std::setw(10)
     << "time[s]" << std::setw(8) << "conv" << "  flag\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::left << std::setw(16) << r.family << std::setw(8) << r.method << std::right << std::setw(6) << r.runs;
    os << std::setprecision(4) << std::setw(11) << r.projected_objective << std::setw(11) << r.raw_objective
       << std::setw(11) << r.violation << std::setprecision(1) << std::setw(10) << r.projection_calls << std::setw(12) << r.constraint_evals
       << std::setw(12) << r.model_evals << std::setw(10) << r.evals_per_projection << std::setprecision(4)
       << std::setw(10) << r.wall_time << std::setprecision(2) << std::setw(8) << r.converged_fraction
       << (r.not_available ? "  N/A" : "") << "\n";
  }
  // Eval-equivalent speedup of radial-inverse projection over bisection on the surrogate.
  for (const auto& mnet : rows) {
    if (mnet.method != "M-Net" || mnet.evals_per_projection <= 0.0) continue;
    for (const auto& ri : rows) {
      if (ri.family != mnet.family || ri.evals_per_projection <= 0.0) continue;
      if (ri.method == "M-Net" || ri.method == "ORACLE") continue;
      os << "speedup " << mnet.family << " M-Net/" << ri.method << ": " << std::setprecision(1)
         << mnet.evals_per_projection / ri.evals_per_projection << "x\n";
    }
  }
  return os.str();
}

std::string report_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "family,method,runs,projected_objective,raw_objective,violation,projection_calls,constraint_evals,"
        "model_evals,evals_per_projection,wall_time,converged_fraction,not_available\n";
  for (const auto& r : rows) {
    os << r.family << ',' << r.method << ',' << r.runs << ',' << r.projected_objective << ',' << r.raw_objective
       << ',' << r.violation << ',' << r.projection_calls << ',' << r.constraint_evals << ',' << r.model_evals << ','
       << r.evals_per_projection << ',' << r.wall_time << ',' << r.converged_fraction << ','
       << (r.not_available ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace monopoa::bench
