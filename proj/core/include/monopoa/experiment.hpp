#ifndef MONOPOA_EXPERIMENT_HPP
#define MONOPOA_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monopoa/certify.hpp"
#include "monopoa/hmri.hpp"
#include "monopoa/poa.hpp"
#include "monopoa/problem.hpp"
#include "monopoa/training.hpp"

namespace monopoa::bench {

enum class Method { HmRi, HRi, MRi, Ri, MNet, Oracle };
enum class DataRegime { Limited, Unlimited };

[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] Method method_from_string(const std::string& s);
[[nodiscard]] std::string to_string(DataRegime r);
[[nodiscard]] DataRegime regime_from_string(const std::string& s);
[[nodiscard]] bool is_radial_inverse(Method m);
[[nodiscard]] neural::RiVariant variant_of(Method m);

struct ModelSettings {
  neural::ModelShape shape;
  neural::TrainConfig train;
  DataRegime regime = DataRegime::Unlimited;
  std::size_t limited_count = 512;
  bool certify = true;
  std::size_t max_width = 20;
};

struct ExperimentSpec {
  Family family = Family::Quadratic;
  std::size_t n = 4;
  std::size_t m_g = 8;
  std::size_t k = 8;
  std::size_t instance_count = 50;
  std::uint64_t corpus_seed = 1;
  std::vector<std::uint64_t> seeds{0, 1};  // training seeds
  std::vector<Method> methods{Method::Oracle};
  PoaConfig poa;
  double bisection_tol = 1e-4;
  ModelSettings model;
  std::string corpus;  // instance corpus path; generated when missing
  std::string output;  // record file

  void validate() const;
};

[[nodiscard]] std::string spec_to_json(const ExperimentSpec& spec);
[[nodiscard]] ExperimentSpec spec_from_json(const std::string& text);

struct Metrics {
  double projected_objective = 0.0;
  double raw_objective = 0.0;
  double violation = 0.0;
};

/// Ground-truth metrics of a returned candidate (tol 1e-6 bisection).
[[nodiscard]] Metrics evaluate(const Point& x_star, const MonotoneProblem& truth);

struct RunRecord {
  std::size_t instance = 0;
  std::uint64_t instance_seed = 0;
  std::string family;
  std::string method;
  std::uint64_t seed = 0;  // training seed (0 for ORACLE)
  double projected_objective = 0.0;
  double raw_objective = 0.0;
  double violation = 0.0;
  std::size_t poa_iterations = 0;
  std::size_t projection_calls = 0;
  std::size_t constraint_evals = 0;
  std::size_t model_evals = 0;
  std::size_t restarts = 0;  // training-loop restarts of the model used
  bool certified = false;
  double wall_time = 0.0;
  std::string termination;

  [[nodiscard]] bool aborted() const;
  bool operator==(const RunRecord&) const = default;
};

inline constexpr int kRecordSchemaVersion = 1;

[[nodiscard]] std::string record_to_json(const RunRecord& r);
[[nodiscard]] RunRecord record_from_json(const std::string& line);

/// Append-only line-delimited records with a schema header line.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);
  void append(const RunRecord& r);

 private:
  std::filesystem::path path_;
};

[[nodiscard]] std::vector<RunRecord> load_records(const std::filesystem::path& path);

/// Instances of the experiment, loaded from spec.corpus when it exists, else
/// generated (and saved when a path is given).
[[nodiscard]] std::vector<Instance> prepare_corpus(const ExperimentSpec& spec);

struct TrainedModel {
  std::shared_ptr<neural::TrainableModel> model;
  neural::TrainReport report;
};

/// Trains the family-conditional surrogate used by `method`.
[[nodiscard]] TrainedModel train_surrogate(Method method, Family family, std::size_t n, std::size_t k,
                                           const ModelSettings& settings, std::uint64_t seed);

/// One solve of `method` on one instance with an already trained model.
[[nodiscard]] RunRecord run_instance(Method method, const Instance& instance, std::size_t index,
                                     const TrainedModel* model, const ExperimentSpec& spec, std::uint64_t seed);

/// Runs every method of the spec over the shared corpus. Records go to
/// `sink` as they are produced and are also returned.
std::vector<RunRecord> run_method(const ExperimentSpec& spec,
                                  const std::function<void(const RunRecord&)>& sink = {});

struct AblationCell {
  double delta = 0.0;
  double tau = 0.0;
  double eta = 0.0;
  std::vector<double> test_loss;  // per seed
  std::vector<std::size_t> restarts;
  std::vector<bool> certified;
  [[nodiscard]] double mean_loss() const;
  [[nodiscard]] double mean_restarts() const;
};

struct AblationResult {
  std::vector<AblationCell> cells;  // (-0.1, 0.01), (-0.1, 0), (0, 0.01), (0, 0)
  [[nodiscard]] const AblationCell& cell(double delta, double tau) const;
};

/// Trains constraint surrogates under each (delta, tau) setting, eta = 0 for
/// delta < 0 and 0.01 for delta = 0, and reports held-out loss and restarts.
[[nodiscard]] AblationResult ablation_relaxations(const ExperimentSpec& spec, std::size_t test_samples = 2048);
[[nodiscard]] std::string format_ablation(const AblationResult& result);

struct SummaryRow {
  std::string family;
  std::string method;
  std::size_t runs = 0;
  double projected_objective = 0.0;
  double raw_objective = 0.0;
  double violation = 0.0;
  double projection_calls = 0.0;
  double constraint_evals = 0.0;
  double model_evals = 0.0;
  double evals_per_projection = 0.0;
  double wall_time = 0.0;
  double converged_fraction = 0.0;
  bool not_available = false;  // more than half the runs did not converge
};

[[nodiscard]] std::vector<SummaryRow> report(const std::vector<RunRecord>& records);
[[nodiscard]] std::string format_report(const std::vector<SummaryRow>& rows);
[[nodiscard]] std::string report_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace monopoa::bench

#endif  // MONOPOA_EXPERIMENT_HPP
