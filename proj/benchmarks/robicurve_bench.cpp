#include <benchmark/benchmark.h>

#include "robicurve/estimators.hpp"
#include "robicurve/ic_solver.hpp"
#include "robicurve/maxmin_tests.hpp"
#include "robicurve/quadrature.hpp"
#include "robicurve/radius_minimax.hpp"
#include "robicurve/risk.hpp"

using namespace robicurve;

static void BM_NormalExpectation(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        normal_expectation([](double u) { return std::min(u * u, 1.44); }, 1e-12, {-1.2, 1.2}));
}
BENCHMARK(BM_NormalExpectation);

static void BM_SolveLocation(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_location(k, 0.5));
}
BENCHMARK(BM_SolveLocation)->Arg(1)->Arg(5)->Arg(50);

static void BM_SolveScaleC(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_scale_c(0.5));
}
BENCHMARK(BM_SolveScaleC);

static void BM_SolveScaleV(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_scale_v(0.5));
}
BENCHMARK(BM_SolveScaleV);

static void BM_RelMse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(rel_mse(RiskModel::Location1, 1, 0.4, 1.1));
}
BENCHMARK(BM_RelMse);

static void BM_RadiusMinimax(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(least_favorable_radius(RiskModel::Location1, 1, 0.1, 0.9));
}
BENCHMARK(BM_RadiusMinimax)->Unit(benchmark::kMillisecond);

static void BM_SamplerDraw(benchmark::State& state) {
  PiecewiseLinear g{{-1.2, 1.2}, {{-1.2, 0.0}, {0.0, 1.0}, {1.2, 0.0}}};
  SqrtDensitySampler sampler(g, 0.01);
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(rng.uniform()));
}
BENCHMARK(BM_SamplerDraw);

static void BM_MonteCarloMse(benchmark::State& state) {
  const auto ic = solve_location(1, 0.5);
  const auto model = ModelSpec::location(1);
  SimConfig cfg;
  cfg.n = 200;
  cfg.replications = 20;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_mse(ic, model, cfg));
}
BENCHMARK(BM_MonteCarloMse)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
