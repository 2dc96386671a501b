#pragma once

#include "edgelab/band_matrix.hpp"
#include "edgelab/point_configuration.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace edgelab::sao {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Operator parameters: dimension r, Dyson index beta and one boundary weight per component.
/// A finite weight w imposes f'(0) = w f(0); +infinity imposes f(0) = 0.
struct SaoParams {
    int r = 1;
    double beta = 2.0;
    std::vector<double> w{kInfinity};

    void validate() const;
    /// Number of finite (Robin) weights.
    int robin_count() const;
    std::string describe() const;
};

/// Drift slope, diagonal noise strength and off-diagonal noise strength.
struct GeneralizedParams {
    double kappa = 0.5;
    double sigma = 1.0;
    double upsilon = 1.0;

    void validate() const;
    /// (r/2, 1/sqrt(beta), 1/sqrt(2)): the parameters under which twice the generalized
    /// operator equals the stochastic Airy operator.
    static GeneralizedParams canonical(const SaoParams& theta);
};

/// Cell-centred grid x_k = (k + 1/2) h on [0, L] with a hard wall at L.
struct GridSpec {
    double h = 0.01;
    double L = 10.0;

    void validate() const;
    std::size_t cells() const;
    double node(std::size_t k) const { return (static_cast<double>(k) + 0.5) * h; }
};

struct BuildOptions {
    /// Draw the white-noise term; switching it off yields the deterministic Airy operator.
    bool noise = true;
};

struct DiscretizedOperator {
    BandedHermitian matrix;
    GridSpec grid;
    SaoParams theta;
    GeneralizedParams eta;
    /// 2 when quaternion entries are embedded as 2x2 complex blocks, else 1.
    int kramers_multiplicity = 1;
    std::uint64_t seed = 0;

    std::size_t dimension() const { return matrix.size(); }
    /// Row/column of cell k, component i, embedded slot s.
    std::size_t index(std::size_t cell, int component, int slot = 0) const;
};

/// -1/2 d^2/dx^2 + kappa x + noise, with diagonal noise of variance sigma^2 and off-diagonal
/// noise of total variance upsilon^2 per unit length.
DiscretizedOperator build_generalized(const SaoParams& theta, const GeneralizedParams& eta, const GridSpec& grid,
                                      std::uint64_t seed, const BuildOptions& options = {});

/// -d^2/dx^2 + r x + sqrt(2) W'; uses the same noise draws as build_generalized for a given seed.
DiscretizedOperator build_sao(const SaoParams& theta, const GridSpec& grid, std::uint64_t seed,
                              const BuildOptions& options = {});

/// Ghost-point ratio f(-h/2) = c f(h/2) for the boundary condition f'(0) = w f(0).
double robin_ghost_ratio(double w, double h);

/// k smallest eigenvalues with Kramers pairs counted once.
EigenResult smallest_eigenvalues(const DiscretizedOperator& op, std::size_t k, const EigenOptions& options = {});

/// All eigenvalues below the cutoff with Kramers pairs counted once.
std::vector<double> eigenvalues_below(const DiscretizedOperator& op, double cutoff);

PointConfiguration spectrum_to_configuration(const std::vector<double>& eigenvalues, std::size_t k,
                                             const GridSpec& grid = {});

} // namespace edgelab::sao
