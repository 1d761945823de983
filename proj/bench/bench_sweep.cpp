#include "dnp/config.hpp"
#include "dnp/sweeps.hpp"

#include <benchmark/benchmark.h>

namespace {

dnp::SweepSpec grid(int n) {
  dnp::SweepSpec spec;
  spec.axis1 = {dnp::SweepAxis::B0, 5.0, 20.0, n, dnp::Spacing::Linear};
  spec.axis2 = {dnp::SweepAxis::MwOffset, -10e6, 10e6, n, dnp::Spacing::Linear};
  return spec;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto sys = dnp::fixture_system("table1");
  const auto spec = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dnp::run_sweep_serial(sys, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto sys = dnp::fixture_system("table1");
  const auto spec = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dnp::run_sweep(sys, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
