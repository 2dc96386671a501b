#pragma once

#include "edgelab/point_configuration.hpp"
#include "edgelab/random.hpp"

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace edgelab::ensembles {

/// Real, complex or quaternion entries, indexed by the Dyson index 1, 2, 4.
enum class Field : int { Real = 1, Complex = 2, Quaternion = 4 };

Field field_from_beta(int beta);
inline int dyson_index(Field f) { return static_cast<int>(f); }

enum class ModelKind { Wishart, Gaussian };

/// Finite-rank perturbation strengths, largest first, all nonnegative.
struct SpikeVector {
    std::vector<double> values;
    void validate() const;
    std::size_t rank() const { return values.size(); }
};

struct SpikedModelSpec {
    ModelKind kind = ModelKind::Wishart;
    /// Matrix dimension of the observed spectrum.
    std::size_t n = 0;
    /// Number of columns of the data matrix (Wishart only).
    std::size_t p = 0;
    Field field = Field::Real;
    SpikeVector spikes;

    void validate() const;
    /// Aspect ratio p / n; 1 for the Gaussian model.
    double aspect_ratio() const;
};

struct BetaHermiteSpec {
    std::size_t n = 0;
    double beta = 2.0;
    void validate() const;
};

using EnsembleSpec = std::variant<SpikedModelSpec, BetaHermiteSpec>;

/// Eigenvalues of one sampled matrix, ascending, with their provenance.
struct SpectrumSample {
    std::vector<double> eigenvalues;
    EnsembleSpec spec;
    std::uint64_t seed = 0;
};

/// Tridiagonal model whose eigenvalues have joint density proportional to
/// prod |x_i - x_j|^beta exp(-beta n sum x_i^2 / 4), with semicircle limit on [-2, 2].
SpectrumSample sample_beta_hermite(const BetaHermiteSpec& spec, std::uint64_t seed);

/// W = (1/n) D Sigma D^* with Sigma = diag(1, ..., 1, 1 + l_{r-1}, ..., 1 + l_0).
SpectrumSample sample_spiked_wishart(const SpikedModelSpec& spec, std::uint64_t seed);

/// Y = X / sqrt(n) + diag(0, ..., 0, l_{r-1}, ..., l_0) with X a Wigner matrix of the field.
SpectrumSample sample_spiked_gaussian(const SpikedModelSpec& spec, std::uint64_t seed);

SpectrumSample sample_spiked(const SpikedModelSpec& spec, std::uint64_t seed);

/// Bulk edge e and fluctuation scale s_n for the model.
double edge_location(const SpikedModelSpec& spec);
double edge_scale(const SpikedModelSpec& spec);

/// Points s_n (e - lambda_i), ascending, which converge to the soft-edge configuration.
PointConfiguration edge_rescale(const SpectrumSample& sample, const SpikedModelSpec& spec);

struct CriticalSpike {
    double spike = 0.0;
    /// Set when the formula produced a negative strength that was replaced by 0.
    bool clipped = false;
};

/// Spike strength mapping to boundary parameter w at size n (w may be +infinity).
CriticalSpike critical_spike_from_w(double w, std::size_t n, ModelKind kind, double aspect_ratio);

/// Asymptotic sum of type I and II errors of the likelihood-ratio test for spike rank r
/// at subcritical strength lambda in (0, 1).
double lrt_error_curve(double lambda, std::size_t rank);

/// Critical strength (sqrt(gamma) for Wishart, 1 for Gaussian).
double critical_threshold(ModelKind kind, double aspect_ratio);

} // namespace edgelab::ensembles
