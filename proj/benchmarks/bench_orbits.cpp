#include <benchmark/benchmark.h>

#include "abc/edge.hpp"
#include "abc/hamiltform.hpp"
#include "abc/integrate.hpp"
#include "abc/scan.hpp"

using namespace abc;

namespace {

const AbcParams kFlow{0.1, 1.0, 1.0};
const State kStart{-kHalfPi, 0.0, 0.2254};

void BM_Rk4Horizon50(benchmark::State& st) {
  const IntegratorConfig cfg = IntegratorConfig::sweep();
  for (auto _ : st) benchmark::DoNotOptimize(finalState(kFlow, kStart, 0.0, 50.0, cfg));
}
BENCHMARK(BM_Rk4Horizon50);

void BM_Dopri5Horizon50(benchmark::State& st) {
  const IntegratorConfig cfg = IntegratorConfig::tight();
  for (auto _ : st) benchmark::DoNotOptimize(finalState(kFlow, kStart, 0.0, 50.0, cfg));
}
BENCHMARK(BM_Dopri5Horizon50);

void BM_DenseTrajectory(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(integrate(kFlow, kStart, {0.0, 50.0}).size());
}
BENCHMARK(BM_DenseTrajectory);

void BM_SpiralSolve(benchmark::State& st) {
  SpiralOptions opts;
  opts.modes = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(spiralFixedPoint({0.01, 1.0, 1.0}, opts).speed);
}
BENCHMARK(BM_SpiralSolve)->Arg(16)->Arg(32)->Arg(64);

void BM_ShootMiss(benchmark::State& st) {
  const auto p = ShootingProblem::standard(0.1, OrbitType::TypeA);
  for (auto _ : st) benchmark::DoNotOptimize(shootMiss(p, 0.2244));
}
BENCHMARK(BM_ShootMiss);

void BM_KamScan20x20(benchmark::State& st) {
  const GridSpec grid{CellRegion{{0, 0}}, 400, Sampling::UniformGrid, 0};
  for (auto _ : st) {
    benchmark::DoNotOptimize(kamScan({0.05, 1.0, 1.0}, {0, 0}, 0.0, grid, 50.0, 1).trappedFraction);
  }
}
BENCHMARK(BM_KamScan20x20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
