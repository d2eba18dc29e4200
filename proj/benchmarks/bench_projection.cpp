#include <benchmark/benchmark.h>

#include <random>

#include "monopoa/problem.hpp"
#include "monopoa/projection.hpp"

using namespace monopoa;

namespace {

std::vector<Point> queries(std::size_t n, std::size_t count) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    out.emplace_back(std::move(x));
  }
  return out;
}

void BM_Bisection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = generate_quadratic(n, 8, 1).first;
  const auto oracle = make_bisection_oracle(p, 1e-4);
  const auto xs = queries(n, 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(oracle.project(xs[i++ % xs.size()]));
}
BENCHMARK(BM_Bisection)->Arg(2)->Arg(4)->Arg(8);

void BM_ClosedForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = generate_quadratic(n, 8, 1).first;
  const auto oracle = make_closed_form_oracle(p);
  const auto xs = queries(n, 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(oracle.project(xs[i++ % xs.size()]));
}
BENCHMARK(BM_ClosedForm)->Arg(2)->Arg(4)->Arg(8);

void BM_NumericRi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = generate_quadratic(n, 8, 1).first;
  const ProjectionOracle oracle(NumericRiStrategy{p.upper, p.upper_thresholds, {}}, p.bound);
  const auto xs = queries(n, 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(oracle.project(xs[i++ % xs.size()]));
}
BENCHMARK(BM_NumericRi)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
