#include <benchmark/benchmark.h>

#include "ltv/evaluation.hpp"
#include "ltv/push_scenario.hpp"
#include "ltv/solvers.hpp"

namespace {

ltv::DagModel fatigue_model(std::size_t lambda, std::size_t m_max) {
  const ltv::FamilySpec family{"fatigue", {{"q0", 0.35}, {"c0", 0.004}, {"beta", 0.9}, {"gamma", 1.25}}};
  return ltv::build_push_dag({lambda, m_max, ltv::synth_prob_model(family, lambda, m_max, 7)});
}

void BM_DpPass(benchmark::State& state) {
  const auto model = fatigue_model(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ltv::dp_pass(model, 1.0).value());
  state.SetItemsProcessed(state.iterations() * model.transition_count());
}

void BM_SolveMreopt(benchmark::State& state) {
  const auto model = fatigue_model(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(ltv::solve_mreopt(model).ltv);
}

void BM_SolveBfUnrolled(benchmark::State& state) {
  const auto model = fatigue_model(100, 10);
  for (auto _ : state) benchmark::DoNotOptimize(ltv::solve_bf_unrolled(model, state.range(0)).value);
}

void BM_Simulate(benchmark::State& state) {
  const auto model = fatigue_model(100, 10);
  const auto policy = ltv::solve_mreopt(model).policy;
  ltv::SimOptions options;
  options.n_episodes = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(ltv::simulate_online(model, policy, options).mean_ltv);
}

}  // namespace

BENCHMARK(BM_DpPass)->Args({100, 10})->Args({200, 50})->Args({500, 50});
BENCHMARK(BM_SolveMreopt)->Args({100, 10})->Args({200, 50})->Args({500, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveBfUnrolled)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
