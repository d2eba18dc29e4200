#include <benchmark/benchmark.h>

#include <random>

#include "monopoa/poa.hpp"
#include "monopoa/problem.hpp"

using namespace monopoa;

namespace {

void BM_SolveClosedForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = generate_quadratic(n, 8, 3).first;
  PoaConfig cfg;
  cfg.max_iters = 2000;
  for (auto _ : state) {
    const auto res = solve(p, make_closed_form_oracle(p), cfg);
    benchmark::DoNotOptimize(res.best_value);
    state.counters["iters"] = static_cast<double>(res.iterations);
  }
}
BENCHMARK(BM_SolveClosedForm)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RefineVertices(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  VertexSet cur{Point::filled(n, 1.0)};
  while (cur.size() < 200) {
    std::vector<double> z(n);
    for (auto& c : z) c = u(rng);
    cur = refine_vertices(cur, Point(z));
  }
  const auto z = Point::filled(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(refine_vertices(cur, z));
  state.counters["vertices"] = static_cast<double>(cur.size());
}
BENCHMARK(BM_RefineVertices)->Arg(3)->Arg(4)->Arg(6);

}  // namespace
