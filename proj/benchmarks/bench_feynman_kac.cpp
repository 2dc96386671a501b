#include "edgelab/feynman_kac.hpp"

#include <benchmark/benchmark.h>

using namespace edgelab;

namespace {

void BM_FeynmanKacSamples(benchmark::State& state) {
    const int r = static_cast<int>(state.range(0));
    const sao::SaoParams th{r, 2.0, std::vector<double>(static_cast<std::size_t>(r), sao::kInfinity)};
    const auto eta = sao::GeneralizedParams::canonical(th);
    fk::FkSettings s;
    s.steps = 1024;
    s.threads = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(fk::mc_expected_trace(th, eta, 0.5, s, 200, ++seed));
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_FeynmanKacSamples)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CombinatorialConstantQuaternion(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<std::pair<int, int>> jumps;
    for (int k = 0; k < n; ++k) jumps.emplace_back(k % 2, (k + 1) % 2);
    const auto all = fk::enumerate_matchings(n);
    for (auto _ : state)
        for (const auto& m : all)
            benchmark::DoNotOptimize(fk::combinatorial_constant(m, jumps, ensembles::Field::Quaternion));
}
BENCHMARK(BM_CombinatorialConstantQuaternion)->Arg(4)->Arg(8);

void BM_EnumerateMatchings(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fk::enumerate_matchings(n));
}
BENCHMARK(BM_EnumerateMatchings)->Arg(8)->Arg(12);

void BM_TraceReplicas(benchmark::State& state) {
    const sao::SaoParams th{1, 2.0, {sao::kInfinity}};
    const auto eta = sao::GeneralizedParams::canonical(th);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(fk::trace_replicas(th, eta, {0.05, 60.0}, {0.3, 0.6, 1.0}, 4, ++seed, 1));
}
BENCHMARK(BM_TraceReplicas)->Unit(benchmark::kMillisecond);

} // namespace
