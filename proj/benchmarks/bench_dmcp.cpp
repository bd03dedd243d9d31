#include <benchmark/benchmark.h>

#include <vector>

#include "dmcp/nlevel.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/synthesis.hpp"
#include "dmcp/tables.hpp"

using namespace dmcp;

static void BM_Compose(benchmark::State& state) {
  const auto seq = table_sequence("pi-n6-o2");
  const ErrorModel err = ErrorModel::area(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(compose(seq, err));
}
BENCHMARK(BM_Compose);

static void BM_NlevelPropagator(benchmark::State& state) {
  const auto seq = table_sequence("pi-n4-o1");
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nlevel_propagator(seq, n));
}
BENCHMARK(BM_NlevelPropagator)->Arg(3)->Arg(5)->Arg(9);

static void BM_AreaScan(benchmark::State& state) {
  const auto seq = table_sequence("pi-n4-o1");
  const auto eps = sample_range(-0.5, 0.5, 0.001);
  const auto states = reference_qubit_states();
  ScanOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(area_scan(seq, states, eps, opts));
}
BENCHMARK(BM_AreaScan)->Unit(benchmark::kMillisecond);

static void BM_Scan2d(benchmark::State& state) {
  const auto seq = table_sequence("pi-n4-o1");
  const auto axis = linspace(-1.0, 1.0, 201);
  ScanOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(scan_2d(seq, StateVector{1.0, 0.0}, axis, axis, opts));
}
BENCHMARK(BM_Scan2d)->Unit(benchmark::kMillisecond);

static void BM_SolvePp(benchmark::State& state) {
  const std::vector<double> seed{-4.2, -1.9, 1.7};
  for (auto _ : state) benchmark::DoNotOptimize(solve_pp({kPi, 3, 2}, seed));
}
BENCHMARK(BM_SolvePp)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
