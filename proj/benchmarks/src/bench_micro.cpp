#include <benchmark/benchmark.h>

#include "alg/micro.hpp"
#include "alg/rate_index.hpp"

#include <random>

using namespace alg;

namespace {

// Events per second of the Gillespie loop at a phase-separating point.
void BM_gillespie_window(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MicroSimulation sim(init_product(n, 0.7, make_stream(1, 0)), to_physical({0.7, 12.0, 0.5}));
  const auto start = sim.events();
  for (auto _ : state) {
    const double dt = sim.gillespie_window(1e-3);
    sim.angle_update(dt);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(sim.events() - start), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_gillespie_window)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_angle_update(benchmark::State& state) {
  MicroSimulation sim(init_product(128, 0.7, make_stream(2, 0)), to_physical({0.7, 12.0, 0.5}));
  for (auto _ : state) sim.angle_update(1e-3);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.state().particle_count()));
}
BENCHMARK(BM_angle_update)->Unit(benchmark::kMillisecond);

}  // namespace

namespace {

void BM_rate_index_update_and_find(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  auto rng = make_stream(3, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> rates(n);
  for (double& r : rates) r = u(rng);
  RateIndex index;
  index.assign(rates);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto _ : state) {
    const std::size_t i = index.find(u(rng) * index.total());
    index.set(pick(rng), u(rng));
    benchmark::DoNotOptimize(i);
  }
}
BENCHMARK(BM_rate_index_update_and_find)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18);

}  // namespace
