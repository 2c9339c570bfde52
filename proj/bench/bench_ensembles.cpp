#include <benchmark/benchmark.h>

#include "sdlab/ensemble.hpp"
#include "sdlab/excursion.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/skewprod.hpp"

using namespace sdlab;

namespace {

const model::ModelParams params(1.0);

void reflected_endpoints(benchmark::State& state, Execution exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto ends = map_paths(
            n,
            [](std::size_t i) {
                Stream rng = Stream::for_path(1, i);
                return radial::run_reflected(params, 0.0, 1e-3, 2000, rng).value;
            },
            exec);
        benchmark::DoNotOptimize(ends.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void assembled_paths(benchmark::State& state, Execution exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const radial::SimConfig cfg{1e-3, 2.0, 1, 0, true};
    excursion::AssembleOptions opts;
    opts.stride = cfg.steps();
    for (auto _ : state) {
        auto ends = map_paths(
            n,
            [&](std::size_t i) {
                Stream rng = Stream::for_path(2, i);
                return excursion::assemble_x(params, {}, cfg, rng, opts).points.back();
            },
            exec);
        benchmark::DoNotOptimize(ends.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void drift(benchmark::State& state, Execution exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(skewprod::drift_statistic(params, {1, 0, 0}, 1e-3, n, 3, {}, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

}  // namespace

BENCHMARK_CAPTURE(reflected_endpoints, serial, Execution::serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(reflected_endpoints, parallel, Execution::parallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembled_paths, serial, Execution::serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembled_paths, parallel, Execution::parallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(drift, serial, Execution::serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(drift, parallel, Execution::parallel)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
