#include <benchmark/benchmark.h>

#include <vector>

#include "piezoband/band_structure.hpp"
#include "piezoband/kernels.hpp"
#include "piezoband/material_file.hpp"

using namespace piezoband;

namespace {

ShuntedCell bench_cell() {
  return with_c_over_s(parse_material_file(default_material_text()), -16.2e-6);
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void BM_HalfTraceGrid(benchmark::State& state) {
  const auto cell = bench_cell();
  const std::size_t n = 1 << 16;
  std::vector<double> omegas(n);
  for (std::size_t i = 0; i < n; ++i) omegas[i] = 3e7 * static_cast<double>(i) / n;
  std::vector<DispersionSample> out(n);
  for (auto _ : state) {
    evaluate_half_trace(cell, omegas, out, kPoleRelTol, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_HalfTraceGrid)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_TraceBranches(benchmark::State& state) {
  const auto cell = bench_cell();
  const double wmax = default_omega_max(cell);
  ScanOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(trace_branches(cell, 200, wmax, opt));
}
BENCHMARK(BM_TraceBranches)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
