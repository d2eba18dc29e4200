#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "monopoa/experiment.hpp"
#include "monopoa/instance_io.hpp"
#include "support.hpp"

using namespace monopoa;
namespace mt = monopoa::testing;
namespace fs = std::filesystem;

namespace {

bench::ModelSettings tiny_model() {
  bench::ModelSettings m;
  m.shape.width = 8;
  m.train.batch_size = 64;
  m.train.iterations_initial = 300;
  m.train.iterations_per_reset = 20;
  m.train.max_resets = 1;
  m.train.learning_rate = 1e-3;
  m.certify = false;
  return m;
}

bench::ExperimentSpec small_spec() {
  bench::ExperimentSpec s;
  s.instance_count = 3;
  s.corpus_seed = 500;
  s.seeds = {0};
  s.poa.max_iters = 200;
  s.model = tiny_model();
  return s;
}

bench::RunRecord row(const std::string& method, double obj, const std::string& term) {
  bench::RunRecord r;
  r.family = "quadratic";
  r.method = method;
  r.projected_objective = obj;
  r.projection_calls = 10;
  r.constraint_evals = method == "ORACLE" ? 1120 : 0;
  r.model_evals = method == "ORACLE" ? 0 : 80;
  r.termination = term;
  return r;
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  using bench::Method;
  for (auto m : {Method::HmRi, Method::HRi, Method::MRi, Method::Ri, Method::MNet, Method::Oracle}) {
    EXPECT_EQ(bench::method_from_string(bench::to_string(m)), m);
  }
  EXPECT_TRUE(bench::is_radial_inverse(Method::HRi));
  EXPECT_FALSE(bench::is_radial_inverse(Method::MNet));
  EXPECT_THROW((void)bench::method_from_string("SDP"), std::invalid_argument);
}

TEST(Evaluate, CircleCorner) {
  const auto p = mt::circle_problem();
  const auto m = bench::evaluate(Point{1.0, 1.0}, p);
  EXPECT_NEAR(m.projected_objective, std::sqrt(2.0), 1e-5);
  EXPECT_DOUBLE_EQ(m.raw_objective, 2.0);
  EXPECT_DOUBLE_EQ(m.violation, 1.0);
}

TEST(Evaluate, FeasiblePointKeepsObjective) {
  const auto p = mt::circle_problem();
  const auto m = bench::evaluate(Point{0.3, 0.4}, p);
  EXPECT_DOUBLE_EQ(m.projected_objective, 0.7);
  EXPECT_DOUBLE_EQ(m.violation, 0.0);
}

TEST(Spec, ValidationCatchesBadValues) {
  auto s = small_spec();
  EXPECT_NO_THROW(s.validate());
  s.methods.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.bisection_tol = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Run, OracleRowsAreFeasible) {
  const auto spec = small_spec();
  const auto records = bench::run_method(spec);
  ASSERT_EQ(records.size(), 3U);
  for (const auto& r : records) {
    EXPECT_EQ(r.method, "ORACLE");
    EXPECT_LE(r.violation, 1e-9);
    EXPECT_FALSE(r.aborted());
    EXPECT_EQ(r.model_evals, 0U);
    EXPECT_GE(r.constraint_evals, 112 * r.projection_calls);
    EXPECT_LE(r.constraint_evals, 120 * r.projection_calls);
    EXPECT_GE(r.projected_objective, 0.0);
  }
}

TEST(Run, LearnedCallCounts) {
  auto spec = small_spec();
  spec.methods = {bench::Method::HmRi, bench::Method::MNet};
  const auto records = bench::run_method(spec);
  ASSERT_EQ(records.size(), 6U);
  for (const auto& r : records) {
    ASSERT_FALSE(r.aborted()) << r.method;
    if (r.method == "HM-RI") {
      EXPECT_EQ(r.model_evals, 8 * r.projection_calls);
      EXPECT_EQ(r.constraint_evals, 0U);
    } else {
      EXPECT_EQ(r.method, "M-Net");
      EXPECT_GE(r.constraint_evals, 112 * r.projection_calls);
      EXPECT_LE(r.constraint_evals, 120 * r.projection_calls);
    }
  }
}

TEST(Run, DeterministicModuloWallTime) {
  auto spec = small_spec();
  spec.methods = {bench::Method::Oracle, bench::Method::HRi};
  auto a = bench::run_method(spec);
  auto b = bench::run_method(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].wall_time = b[i].wall_time = 0.0;
    EXPECT_EQ(a[i], b[i]) << i;
  }
}

TEST(Run, SinkSeesEveryRecord) {
  const auto spec = small_spec();
  std::size_t seen = 0;
  const auto records = bench::run_method(spec, [&](const bench::RunRecord&) { ++seen; });
  EXPECT_EQ(seen, records.size());
}

TEST(Run, MismatchedModelAborts) {
  const auto spec = small_spec();
  const auto inst = generate_instance(Family::Quadratic, 4, 8, 8, 1);
  const auto trained = bench::train_surrogate(bench::Method::MNet, Family::Quadratic, 4, 8, spec.model, 0);
  const auto rec = bench::run_instance(bench::Method::HmRi, inst, 0, &trained, spec, 0);
  EXPECT_EQ(rec.termination, "ProjectionError");
  EXPECT_TRUE(rec.aborted());
}

TEST(Corpus, SavedAndReused) {
  auto spec = small_spec();
  const auto path = fs::temp_directory_path() / "monopoa_tests" / "spec_corpus.jsonl";
  fs::create_directories(path.parent_path());
  fs::remove(path);
  spec.corpus = path.string();
  const auto first = bench::prepare_corpus(spec);
  ASSERT_TRUE(fs::exists(path));
  const auto again = bench::prepare_corpus(spec);
  ASSERT_EQ(first.size(), again.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(instance_parameters(first[i]), instance_parameters(again[i]));
    EXPECT_EQ(seed_of(first[i]), 500 + i);
  }
}

TEST(Report, AggregatesAndFlags) {
  std::vector<bench::RunRecord> records{row("ORACLE", 0.1, "Converged"), row("ORACLE", 0.2, "IterLimit"),
                                        row("ORACLE", 0.3, "IterLimit"), row("HM-RI", 0.05, "Converged"),
                                        row("HM-RI", 0.07, "Converged")};
  const auto rows = bench::report(records);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0].method, "ORACLE");
  EXPECT_EQ(rows[0].runs, 3U);
  EXPECT_NEAR(rows[0].projected_objective, 0.2, 1e-15);
  EXPECT_TRUE(rows[0].not_available);
  EXPECT_DOUBLE_EQ(rows[0].evals_per_projection, 112.0);
  EXPECT_FALSE(rows[1].not_available);
  EXPECT_NEAR(rows[1].projected_objective, 0.06, 1e-15);
  EXPECT_DOUBLE_EQ(rows[1].evals_per_projection, 8.0);

  const auto text = bench::format_report(rows);
  EXPECT_NE(text.find("N/A"), std::string::npos);
  const auto csv = bench::report_to_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_THROW((void)bench::report({}), std::invalid_argument);
}
