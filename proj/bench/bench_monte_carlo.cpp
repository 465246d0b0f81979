// Serial reference vs. OpenMP Monte-Carlo driver.

#include <benchmark/benchmark.h>

#include "smap/sim.hpp"

namespace {

smap::sim::ScenarioConfig config_for(const benchmark::State& state) {
    smap::sim::ScenarioConfig c;
    c.cv_strategy = smap::ConstraintStrategy::sccv();
    c.iterations = static_cast<std::size_t>(state.range(1));
    return c;
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto config = config_for(state);
    const auto runs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            smap::sim::run_monte_carlo_serial(config, smap::sim::Algorithm::smap, runs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto config = config_for(state);
    const auto runs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(smap::sim::run_monte_carlo(config, smap::sim::Algorithm::smap, runs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Args({100, 1000})->Args({1000, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Args({100, 1000})->Args({1000, 1000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
