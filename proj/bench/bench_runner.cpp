// Serial reference runner vs the OpenMP runner on the skewed synthetic
// workload. On a single core the two should be within noise of each other.

#include "ctxband/config.hpp"
#include "ctxband/harness.hpp"

#include <benchmark/benchmark.h>

using namespace ctxband;

namespace {

ExperimentConfig workload(const char* policy, std::int64_t horizon) {
    nlohmann::json doc = {
        {"instance", {{"source", "synthetic"}, {"n", 5}, {"k", 20}, {"population", "skewed"}}},
        {"policy", {{"name", policy}, {"subroutine", "ucb"}}},
        {"horizon", horizon},
        {"runs", 32},
        {"seed", 7},
    };
    return parse_experiment_config(doc);
}

void BM_Serial(benchmark::State& state) {
    const auto config = workload("active-known-p", state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(config).mean_regret);
    state.SetItemsProcessed(state.iterations() * config.runs * config.horizon);
}

void BM_OpenMP(benchmark::State& state) {
    const auto config = workload("active-known-p", state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config).mean_regret);
    state.SetItemsProcessed(state.iterations() * config.runs * config.horizon);
}

void BM_EetcEpisode(benchmark::State& state) {
    const auto config = workload("eetc", state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_single(config, 1).regret);
    state.SetItemsProcessed(state.iterations() * config.horizon);
}

} // namespace

BENCHMARK(BM_Serial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EetcEpisode)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
