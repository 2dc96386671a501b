#include "edgelab/bridge.hpp"

#include <benchmark/benchmark.h>

using namespace edgelab;

namespace {

void BM_SampleBridge(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(bridge::sample_bridge(0.0, 0.0, 1.0, steps, rng));
}
BENCHMARK(BM_SampleBridge)->Arg(1024)->Arg(4096);

void BM_SelfIntersection(benchmark::State& state) {
    const auto steps = static_cast<std::size_t>(state.range(0));
    const auto path = bridge::sample_bridge(0.0, 0.0, 1.0, steps, 2);
    for (auto _ : state) benchmark::DoNotOptimize(bridge::self_intersection(path, 0.04));
}
BENCHMARK(BM_SelfIntersection)->Arg(1024)->Arg(4096);

void BM_BoundaryWeight(benchmark::State& state) {
    Rng rng(3);
    const auto path = bridge::sample_reflected_bridge(0.2, 1.0, 4096, rng);
    for (auto _ : state) benchmark::DoNotOptimize(bridge::expected_boundary_weight(path, 0.5));
}
BENCHMARK(BM_BoundaryWeight);

void BM_SampleLocalTime(benchmark::State& state) {
    Rng rng(4);
    const auto path = bridge::sample_bridge(0.0, 0.0, 1.0, 4096, rng);
    for (auto _ : state) benchmark::DoNotOptimize(bridge::sample_local_time(path, 0.0, rng));
}
BENCHMARK(BM_SampleLocalTime);

} // namespace
