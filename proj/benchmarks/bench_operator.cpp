#include "edgelab/ensembles.hpp"
#include "edgelab/sao_operator.hpp"

#include <benchmark/benchmark.h>

using namespace edgelab;

namespace {

void BM_BuildScalarOperator(benchmark::State& state) {
    const sao::GridSpec grid{0.01, 10.0};
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sao::build_sao({1, 2.0, {sao::kInfinity}}, grid, ++seed));
}
BENCHMARK(BM_BuildScalarOperator);

void BM_SmallestEigenvalues(benchmark::State& state) {
    const int r = static_cast<int>(state.range(0));
    const sao::SaoParams th{r, 2.0, std::vector<double>(static_cast<std::size_t>(r), sao::kInfinity)};
    const auto op = sao::build_sao(th, {0.02, 10.0}, 3);
    for (auto _ : state) benchmark::DoNotOptimize(sao::smallest_eigenvalues(op, 10));
}
BENCHMARK(BM_SmallestEigenvalues)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_EigenvaluesBelowCutoff(benchmark::State& state) {
    const auto op = sao::build_sao({1, 2.0, {sao::kInfinity}}, {0.05, 60.0}, 4);
    for (auto _ : state) benchmark::DoNotOptimize(sao::eigenvalues_below(op, 160.0));
}
BENCHMARK(BM_EigenvaluesBelowCutoff)->Unit(benchmark::kMillisecond);

void BM_BetaHermite(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ensembles::sample_beta_hermite({n, 2.0}, ++seed));
}
BENCHMARK(BM_BetaHermite)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SpikedWishart(benchmark::State& state) {
    std::uint64_t seed = 0;
    const ensembles::SpikedModelSpec spec{ensembles::ModelKind::Wishart, 200, 200, ensembles::Field::Real, {{3.0}}};
    for (auto _ : state) benchmark::DoNotOptimize(ensembles::sample_spiked(spec, ++seed));
}
BENCHMARK(BM_SpikedWishart)->Unit(benchmark::kMillisecond);

} // namespace
