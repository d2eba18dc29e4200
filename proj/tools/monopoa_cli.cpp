// monopoa: generate corpora, train and certify surrogates, solve, benchmark.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "monopoa/certify.hpp"
#include "monopoa/experiment.hpp"
#include "monopoa/instance_io.hpp"
#include "monopoa/model_io.hpp"

namespace fs = std::filesystem;
using namespace monopoa;
namespace nn = monopoa::neural;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<nn::TrainableModel> to_shared(nn::AnyModel m) {
  if (auto* ri = std::get_if<nn::HmRiModel>(&m)) return std::make_shared<nn::HmRiModel>(std::move(*ri));
  return std::make_shared<nn::ConstraintNet>(std::get<nn::ConstraintNet>(std::move(m)));
}

nn::AnyModel to_any(const nn::TrainableModel& m) {
  if (const auto* ri = dynamic_cast<const nn::HmRiModel*>(&m)) return *ri;
  return dynamic_cast<const nn::ConstraintNet&>(m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone optimisation with polyblock outer approximation and learned projections"};
  app.require_subcommand(1);

  // generate
  std::string family = "quadratic", out;
  std::size_t n = 4, m_g = 8, k = 8, count = 1;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("generate", "Write a JSONL instance corpus");
  gen->add_option("--family", family, "quadratic | multiplicative | power_g2 | power_g35");
  gen->add_option("-n", n, "Variables");
  gen->add_option("--m-g", m_g, "Constraints");
  gen->add_option("-k", k, "Factors per multiplicative constraint");
  gen->add_option("--count", count, "Instances");
  gen->add_option("--seed", seed, "First instance seed");
  gen->add_option("--out", out, "Output corpus")->required();

  // train
  std::string variant = "HM-RI", regime = "unlimited", config, model_out;
  auto* tr = app.add_subcommand("train", "Train a radial-inverse or constraint surrogate");
  tr->add_option("--family", family);
  tr->add_option("-n", n);
  tr->add_option("-k", k);
  tr->add_option("--variant", variant, "HM-RI | H-RI | M-RI | RI | M-Net");
  tr->add_option("--regime", regime, "limited | unlimited");
  tr->add_option("--config", config, "Experiment document whose model settings are used");
  tr->add_option("--seed", seed);
  tr->add_option("--model-out", model_out)->required();

  // certify
  std::string model_path;
  double delta = 0.0, tau = 0.0;
  std::size_t max_width = 20;
  auto* cert = app.add_subcommand("certify", "Certify the monotone towers of a model over their domains");
  cert->add_option("--model", model_path)->required();
  cert->add_option("--delta", delta);
  cert->add_option("--tau", tau);
  cert->add_option("--max-width", max_width);

  // solve
  std::string instance_path, method = "ORACLE";
  std::size_t index = 0;
  bench::ExperimentSpec solve_spec;
  auto* sol = app.add_subcommand("solve", "Solve one instance");
  sol->add_option("--instance", instance_path, "Instance (.json) or corpus (.jsonl)")->required();
  sol->add_option("--index", index, "Corpus line");
  sol->add_option("--method", method, "ORACLE | M-Net | HM-RI | H-RI | M-RI | RI");
  sol->add_option("--model", model_path);
  sol->add_option("--eps", solve_spec.poa.eps);
  sol->add_option("--v-max", solve_spec.poa.v_max);
  sol->add_option("--max-iters", solve_spec.poa.max_iters);
  sol->add_option("--alpha", solve_spec.poa.origin_shift_alpha, "Origin shift");
  sol->add_option("--tol", solve_spec.bisection_tol, "Bisection tolerance");

  // bench
  std::string spec_path, records_path;
  auto* ben = app.add_subcommand("bench", "Run an experiment document");
  ben->add_option("--spec", spec_path)->required();
  ben->add_option("--out", records_path, "Record file (overrides the document)");

  // report
  std::string csv_path;
  auto* rep = app.add_subcommand("report", "Summarise a record file");
  rep->add_option("--records", records_path)->required();
  rep->add_option("--csv", csv_path, "Also write machine-readable rows");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Relaxation ablation over (delta, tau)");
  abl->add_option("--spec", spec_path)->required();
  std::size_t test_samples = 2048;
  abl->add_option("--test-samples", test_samples);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      std::vector<Instance> corpus;
      for (std::size_t i = 0; i < count; ++i) {
        corpus.push_back(generate_instance(family_from_string(family), n, m_g, k, seed + i));
      }
      save_corpus(corpus, out);
      std::cout << "wrote " << corpus.size() << " instances to " << out << "\n";
      return 0;
    }

    if (*tr) {
      bench::ModelSettings settings;
      Family fam = family_from_string(family);
      if (!config.empty()) {
        const auto spec = bench::spec_from_json(slurp(config));
        settings = spec.model;
        if (tr->count("--family") == 0) fam = spec.family;
        if (tr->count("-n") == 0) n = spec.n;
        if (tr->count("-k") == 0) k = spec.k;
      }
      if (tr->count("--regime") || config.empty()) settings.regime = bench::regime_from_string(regime);
      const auto trained = bench::train_surrogate(bench::method_from_string(variant), fam, n, k, settings, seed);
      nn::save_model(to_any(*trained.model), model_out);
      std::cout << "iterations " << trained.report.iterations << ", restarts " << trained.report.restarts
                << ", certified " << (trained.report.certified ? "yes" : "no") << "\n";
      return 0;
    }

    if (*cert) {
      const auto model = to_shared(nn::load_model(model_path));
      const auto rep_ = certify::certify_model(*model, delta, tau, max_width);
      std::cout << "certified " << (rep_.certified ? "yes" : "no") << "\n"
                << "regions checked " << rep_.regions_checked << ", skipped by tau " << rep_.regions_skipped_by_tau
                << ", infeasible " << rep_.regions_infeasible << ", bounded " << rep_.regions_bounded
                << ", lp solves " << rep_.lp_solves << "\n";
      for (const auto& c : rep_.counterexamples) {
        std::cout << "counterexample block " << c.block << " coordinate " << c.coordinate << " gradient "
                  << c.gradient << "\n";
      }
      return 0;
    }

    if (*sol) {
      const fs::path p(instance_path);
      const Instance inst = p.extension() == ".jsonl" ? load_corpus(p).at(index) : load_instance(p);
      const auto m = bench::method_from_string(method);
      std::unique_ptr<bench::TrainedModel> model;
      if (m != bench::Method::Oracle) {
        if (model_path.empty()) throw std::invalid_argument("--model is required for learned methods");
        model = std::make_unique<bench::TrainedModel>();
        model->model = to_shared(nn::load_model(model_path));
      }
      const auto rec = bench::run_instance(m, inst, index, model.get(), solve_spec, 0);
      std::cout << bench::record_to_json(rec) << "\n";
      return rec.aborted() ? 1 : 0;
    }

    if (*ben) {
      auto spec = bench::spec_from_json(slurp(spec_path));
      if (!records_path.empty()) spec.output = records_path;
      std::unique_ptr<bench::RecordWriter> writer;
      if (!spec.output.empty()) writer = std::make_unique<bench::RecordWriter>(spec.output);
      bool aborted = false;
      const auto records = bench::run_method(spec, [&](const bench::RunRecord& r) {
        if (writer) writer->append(r);
        aborted = aborted || r.aborted();
      });
      std::cout << bench::format_report(bench::report(records));
      return aborted ? 1 : 0;
    }

    if (*rep) {
      const auto rows = bench::report(bench::load_records(records_path));
      std::cout << bench::format_report(rows);
      if (!csv_path.empty()) {
        std::ofstream(csv_path) << bench::report_to_csv(rows);
      }
      return 0;
    }

    if (*abl) {
      const auto spec = bench::spec_from_json(slurp(spec_path));
      std::cout << bench::format_ablation(bench::ablation_relaxations(spec, test_samples));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
