#include <benchmark/benchmark.h>

#include "effcon/scenario.hpp"

using namespace effcon;

namespace {

std::string scenario_path(const std::string& name) { return std::string(EFFCON_SCENARIO_DIR) + "/" + name + ".scn"; }

void BM_MomentBracket(benchmark::State& state) {
  Model m(parse_scenario("[system]\nname = pair\npairs = q:p\nconstraint = qhat(q)\n"));
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // Fresh space each time so the bracket cache does not hide the work.
    PhaseSpace ps(m.algebra());
    benchmark::DoNotOptimize(ps.poisson_bracket(ps.G({n, 0}), ps.G({0, n})));
  }
}
BENCHMARK(BM_MomentBracket)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_Expectation(benchmark::State& state) {
  Model m(load_scenario(scenario_path("free_particle")));
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ConstraintFactory f(m.space(), m.factory().classical());
    benchmark::DoNotOptimize(f.generate(m.word("q*p"), n, m.limit(3, TruncationMode::graded)));
  }
}
BENCHMARK(BM_Expectation)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  Model m(load_scenario(scenario_path(state.range(0) == 0 ? "two_component" : "free_particle")));
  for (auto _ : state) benchmark::DoNotOptimize(m.solved(2, TruncationMode::graded));
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Observables(benchmark::State& state) {
  Model m(load_scenario(scenario_path("free_particle")));
  auto sys = m.solved(2, TruncationMode::graded);
  for (auto _ : state) benchmark::DoNotOptimize(find_observables(sys, {2, 2}));
}
BENCHMARK(BM_Observables)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
