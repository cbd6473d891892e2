#include <benchmark/benchmark.h>

#include "alg/fvm.hpp"

using namespace alg;

namespace {

// One explicit step including the velocity evaluation; reported per cell.
void BM_fvm_step(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0)), nt = static_cast<int>(state.range(1));
  const Grid g(nx, nx, nt);
  OrientationField f = initial_uniform_random(g, 0.5, 0.01, 1);
  FvmSolver solver(g, to_physical({0.5, 30.0, 0.5}));
  for (auto _ : state) solver.advance(f, 1e9);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cells()));
}
BENCHMARK(BM_fvm_step)->Args({64, 32})->Args({128, 64})->Unit(benchmark::kMillisecond);

void BM_moments(benchmark::State& state) {
  const Grid g(128, 128, 64);
  const OrientationField f = initial_uniform_random(g, 0.5, 0.01, 2);
  for (auto _ : state) benchmark::DoNotOptimize(moments(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cells()));
}
BENCHMARK(BM_moments)->Unit(benchmark::kMillisecond);

}  // namespace
