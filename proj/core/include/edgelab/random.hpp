#pragma once

#include <cstdint>
#include <random>

namespace edgelab {

/// Mixes a master seed with a stream index into an independent 64-bit seed.
/// Replica k of an experiment always uses derive_seed(master, k), so results do
/// not depend on the number of worker threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Thin wrapper over a 64-bit Mersenne twister with the draws used across the library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }
    /// Chi variable with k degrees of freedom (k > 0, not necessarily integer).
    double chi(double k);
    unsigned poisson(double mean);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace edgelab
