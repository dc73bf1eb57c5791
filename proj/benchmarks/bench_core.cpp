#include <benchmark/benchmark.h>

#include <random>

#include "siattn/attention.hpp"
#include "siattn/mclab.hpp"
#include "siattn/rng.hpp"
#include "siattn/schedule.hpp"

using namespace siattn;

static void BM_GaussianField(benchmark::State& state) {
    const GaussianField field(42, 0);
    std::uint64_t t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(field(7, t++));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GaussianField);

static void BM_ScheduleAt(benchmark::State& state) {
    const ScheduleParams p = resolve_params(10.0);
    std::uint64_t t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(schedule_at(t++ % 100000, p));
    }
}
BENCHMARK(BM_ScheduleAt);

static void BM_EstimateRangeStats(benchmark::State& state) {
    const auto width = static_cast<std::uint64_t>(state.range(0));
    const RangeSpec range{1000, 1000 + width};
    McConfig cfg;
    cfg.samples = 64;
    cfg.modifier = resolve_params(10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_range_stats(range, cfg, 1));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64 * width);
}
BENCHMARK(BM_EstimateRangeStats)->Arg(1024)->Arg(16384);

static void BM_CausalAttention(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t d = 64;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> dist;
    Tensor q = Tensor::zeros({n, d}), k = Tensor::zeros({n, d}), v = Tensor::zeros({n, d});
    for (double& x : q.data) x = dist(rng);
    for (double& x : k.data) x = dist(rng);
    for (double& x : v.data) x = dist(rng);
    AttentionConfig cfg;
    cfg.head_dim = static_cast<int>(d);
    cfg.pos = PRope{10000.0, 1024.0};
    cfg.modifier = ScaleInvariant{resolve_params(10.0)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(causal_attention(q, k, v, cfg, 0));
    }
    state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_CausalAttention)->Arg(128)->Arg(512)->Arg(1024)->Complexity();

BENCHMARK_MAIN();
