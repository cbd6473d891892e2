#include <benchmark/benchmark.h>

#include "alg/linstab.hpp"

using namespace alg;

namespace {

void BM_leading_eigenpair(benchmark::State& state) {
  StabilityProblem p;
  p.phi = 0.7;
  p.params = to_physical({0.7, 12.0, 0.5});
  p.n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(leading_eigenpair(p));
}
BENCHMARK(BM_leading_eigenpair)->Arg(6)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_boundary_pe(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(boundary_pe(0.7));
}
BENCHMARK(BM_boundary_pe)->Unit(benchmark::kMillisecond);

}  // namespace
