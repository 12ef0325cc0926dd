#include <benchmark/benchmark.h>

#include "vwapexec/bvp.hpp"
#include "vwapexec/cost.hpp"
#include "vwapexec/montecarlo.hpp"
#include "vwapexec/optimizer.hpp"

using namespace vwapexec;

namespace {

const MarketParams kFig1Market{0.1, 0.02, 0.1, 100.0};
const MarketParams kFig2Market{0.1, 0.02, 0.2, 100.0};
const GbmVolumeModel kFig3Model{1.0, -0.02, 0.2, 0.9};

void BM_BoundaryValueArcsine(benchmark::State& state) {
  const auto p = arcsine_profile(build_grid(1.0, state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_inventory_ode(p, 2.0, kFig1Market, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BoundaryValueArcsine)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_QpArcsine(benchmark::State& state) {
  const auto p = arcsine_profile(build_grid(1.0, state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp_deterministic(p, 2.0, kFig1Market, 1.0));
}
BENCHMARK(BM_QpArcsine)->Arg(100)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SqpGbm(benchmark::State& state) {
  const auto g = build_grid(1.0, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_sqp_gbm(kFig3Model, g, 10.0, kFig2Market, 1.0));
}
BENCHMARK(BM_SqpGbm)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_GbmObjectiveGradient(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto g = build_grid(1.0, n);
  const GbmObjective f(kFig3Model, g, 10.0, kFig2Market, 1.0);
  const Eigen::VectorXd r = Eigen::VectorXd::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(f.gradient(r));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GbmObjectiveGradient)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ImpactIntegral(benchmark::State& state) {
  const auto g = build_grid(1.0, state.range(0));
  const auto s = expected_vwap_strategy(kFig3Model, g, 1.0);
  const bool full = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(full ? impact_double_integral_full(s, kFig3Model) : impact_double_integral(s, kFig3Model));
}
BENCHMARK(BM_ImpactIntegral)->ArgsProduct({{200, 1000}, {0, 1}});

void BM_CrossMomentGaussHermite(benchmark::State& state) {
  const auto g = build_grid(1.0, 200);
  const auto s = twap_strategy(g, 1.0);
  const auto inv = inventory_from_rate(s);
  for (auto _ : state) benchmark::DoNotOptimize(cross_moment_gauss_hermite(s, inv, kFig3Model, state.range(0)));
}
BENCHMARK(BM_CrossMomentGaussHermite)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SimulateCosts(benchmark::State& state) {
  SimulationConfig cfg{build_grid(1.0, 200), kFig2Market, kFig3Model, 0.9, 10000, 1};
  cfg.threads = static_cast<unsigned>(state.range(0));
  const auto s = twap_strategy(cfg.grid, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_costs(s, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
BENCHMARK(BM_SimulateCosts)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
