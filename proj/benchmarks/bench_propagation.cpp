#include <benchmark/benchmark.h>

#include "rotor/propagator.hpp"
#include "rotor/sweep.hpp"

using namespace rotor;

static void BM_Spectral(benchmark::State& state) {
  const RotorBasis basis(static_cast<int>(state.range(0)));
  const PulseSpec pulse(5.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_spectral(pulse, 0, basis));
}
BENCHMARK(BM_Spectral)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

static void BM_Rk4(benchmark::State& state) {
  const RotorBasis basis(static_cast<int>(state.range(0)));
  const PulseSpec pulse(5.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_ode(pulse, 0, basis, 10000));
}
BENCHMARK(BM_Rk4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_ConvergedPoint(benchmark::State& state) {
  const PulseSpec pulse(static_cast<double>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_converged(pulse, 0));
}
BENCHMARK(BM_ConvergedPoint)->Arg(1)->Arg(5)->Arg(10);

static void BM_SigmaSweep(benchmark::State& state) {
  SweepGrid grid;
  grid.strengths = {1.5};
  grid.durations = stepped_range(0.005, 10.0, 0.005);
  SweepOptions opts;
  opts.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(grid, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_SigmaSweep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
