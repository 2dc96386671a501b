#include "edgelab/ensembles.hpp"
#include "edgelab/estimators.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace edgelab;

namespace {

PointConfiguration airy_like(std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t k = 0; k < n; ++k) pts[k] = std::pow(1.5 * 3.14159265 * (k + 0.75), 2.0 / 3.0);
    return make_configuration(pts);
}

void BM_EstimatorT(benchmark::State& state) {
    const auto cfg = airy_like(static_cast<std::size_t>(state.range(0)));
    const estimators::EstimatorSettings s{0.05, 0.5, 8};
    for (auto _ : state) benchmark::DoNotOptimize(estimators::estimator_T(cfg, s));
}
BENCHMARK(BM_EstimatorT)->Arg(200)->Arg(2000);

void BM_HamiltonianEnergy(benchmark::State& state) {
    const auto e = ensembles::sample_beta_hermite({static_cast<std::size_t>(state.range(0)), 2.0}, 1).eigenvalues;
    for (auto _ : state) benchmark::DoNotOptimize(estimators::hamiltonian_energy(e));
}
BENCHMARK(BM_HamiltonianEnergy)->Arg(1000);

void BM_BetaFromEnergy(benchmark::State& state) {
    const double e = estimators::energy_limit(2.0, 1000);
    for (auto _ : state) benchmark::DoNotOptimize(estimators::beta_from_energy(e, 1000));
}
BENCHMARK(BM_BetaFromEnergy);

} // namespace
