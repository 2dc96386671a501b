#include "edgelab/sao_operator.hpp"

#include "edgelab/random.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace edgelab::sao {

void SaoParams::validate() const {
    if (r < 1) throw std::invalid_argument("operator dimension r must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
    if (r > 1 && beta != 1.0 && beta != 2.0 && beta != 4.0)
        throw std::invalid_argument("matrix operators (r > 1) require beta in {1, 2, 4}");
    if (w.size() != static_cast<std::size_t>(r))
        throw std::invalid_argument("boundary weight list must have r entries");
    for (double v : w)
        if (std::isnan(v) || v == -kInfinity) throw std::invalid_argument("boundary weights must be finite or +inf");
}

int SaoParams::robin_count() const {
    int n = 0;
    for (double v : w) n += std::isfinite(v) ? 1 : 0;
    return n;
}

std::string SaoParams::describe() const {
    std::ostringstream os;
    os << "r=" << r << ",beta=" << beta << ",w=";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) os << ';';
        if (std::isinf(w[i]))
            os << "inf";
        else
            os << w[i];
    }
    return os.str();
}

void GeneralizedParams::validate() const {
    if (!(kappa > 0.0) || !(sigma > 0.0) || !(upsilon > 0.0) || !std::isfinite(kappa) || !std::isfinite(sigma) ||
        !std::isfinite(upsilon))
        throw std::invalid_argument("kappa, sigma and upsilon must be positive and finite");
}

GeneralizedParams GeneralizedParams::canonical(const SaoParams& theta) {
    return {0.5 * theta.r, 1.0 / std::sqrt(theta.beta), 1.0 / std::sqrt(2.0)};
}

void GridSpec::validate() const {
    if (!(h > 0.0) || !(L > 0.0) || !std::isfinite(h) || !std::isfinite(L))
        throw std::invalid_argument("grid step and length must be positive");
    if (h > 0.1) throw std::invalid_argument("grid too coarse: h must not exceed 0.1");
    if (L < 10.0) throw std::invalid_argument("domain length L must be at least 10");
    const std::size_t n = cells();
    if (n < 10) throw std::invalid_argument("degenerate grid: fewer than 10 cells");
    if (std::abs(static_cast<double>(n) * h - L) > 1e-12 * std::max(1.0, L))
        throw std::invalid_argument("grid length must be an integer multiple of the step");
}

std::size_t GridSpec::cells() const {
    return static_cast<std::size_t>(std::llround(L / h));
}

std::size_t DiscretizedOperator::index(std::size_t cell, int component, int slot) const {
    return (cell * static_cast<std::size_t>(theta.r) + static_cast<std::size_t>(component)) *
               static_cast<std::size_t>(kramers_multiplicity) +
           static_cast<std::size_t>(slot);
}

double robin_ghost_ratio(double w, double h) {
    if (std::isinf(w)) return -1.0;
    const double a = 0.5 * w * h;
    if (!(1.0 + a > 0.0)) throw std::invalid_argument("Robin weight too negative for the grid step");
    return (1.0 - a) / (1.0 + a);
}

namespace {

/// Scale factors that distinguish the two operator normalizations.
struct Coefficients {
    double kinetic;     ///< multiplies the second-difference stencil (1/h^2 units)
    double drift;       ///< slope of the linear potential
    double diag_noise;  ///< multiplies a standard normal per cell before the 1/sqrt(h)
    double off_noise;   ///< multiplies a unit-variance field entry before the 1/sqrt(h)
};

DiscretizedOperator assemble(const SaoParams& theta, const GeneralizedParams& eta, const GridSpec& grid,
                             std::uint64_t seed, const BuildOptions& options, const Coefficients& c) {
    theta.validate();
    grid.validate();
    const std::size_t n = grid.cells();
    const int r = theta.r;
    const bool quaternion = r > 1 && theta.beta == 4.0;
    const int m = quaternion ? 2 : 1;
    const bool real = r == 1 || theta.beta == 1.0;
    const std::size_t block = static_cast<std::size_t>(r * m);
    const std::size_t dim = n * block;
    const std::size_t bw = dim > 1 ? std::min(block, dim - 1) : 0;

    DiscretizedOperator op{BandedHermitian(dim, bw, real), grid, theta, eta, m, seed};
    BandedHermitian& a = op.matrix;
    const double h = grid.h;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_sqrt_h = 1.0 / std::sqrt(h);
    const int field_components = static_cast<int>(theta.beta);

    Rng rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = grid.node(k);
        for (int i = 0; i < r; ++i) {
            double d = 2.0 * c.kinetic * inv_h2 + c.drift * x;
            if (k == 0) d -= c.kinetic * inv_h2 * robin_ghost_ratio(theta.w[static_cast<std::size_t>(i)], h);
            if (k + 1 == n) d += c.kinetic * inv_h2;
            const double z = rng.normal();
            if (options.noise) d += c.diag_noise * z * inv_sqrt_h;
            for (int s = 0; s < m; ++s) {
                a.set(op.index(k, i, s), op.index(k, i, s), d);
                if (k + 1 < n) a.set(op.index(k + 1, i, s), op.index(k, i, s), -c.kinetic * inv_h2);
            }
        }
        for (int i = 0; i < r; ++i) {
            for (int j = i + 1; j < r; ++j) {
                double q[4] = {0.0, 0.0, 0.0, 0.0};
                const double norm = 1.0 / std::sqrt(static_cast<double>(field_components));
                for (int comp = 0; comp < field_components; ++comp) q[comp] = rng.normal() * norm;
                if (!options.noise) continue;
                const double s = c.off_noise * inv_sqrt_h;
                if (!quaternion) {
                    a.set(op.index(k, i), op.index(k, j), cplx(s * q[0], s * q[1]));
                } else {
                    const cplx u(s * q[0], s * q[1]);
                    const cplx v(s * q[2], s * q[3]);
                    a.set(op.index(k, i, 0), op.index(k, j, 0), u);
                    a.set(op.index(k, i, 0), op.index(k, j, 1), v);
                    a.set(op.index(k, i, 1), op.index(k, j, 0), -std::conj(v));
                    a.set(op.index(k, i, 1), op.index(k, j, 1), std::conj(u));
                }
            }
        }
    }
    return op;
}

std::vector<double> dedupe_pairs(const std::vector<double>& w) {
    std::vector<double> out;
    out.reserve(w.size() / 2);
    for (std::size_t i = 0; i + 1 < w.size(); i += 2) {
        const double scale = std::max({1.0, std::abs(w[i]), std::abs(w[i + 1])});
        if (std::abs(w[i + 1] - w[i]) > 1e-6 * scale)
            throw ConvergenceError("Kramers pair split beyond tolerance", std::abs(w[i + 1] - w[i]) / scale);
        out.push_back(w[i + 1]);
    }
    return out;
}

} // namespace

DiscretizedOperator build_generalized(const SaoParams& theta, const GeneralizedParams& eta, const GridSpec& grid,
                                      std::uint64_t seed, const BuildOptions& options) {
    eta.validate();
    return assemble(theta, eta, grid, seed, options, {0.5, eta.kappa, eta.sigma, eta.upsilon});
}

DiscretizedOperator build_sao(const SaoParams& theta, const GridSpec& grid, std::uint64_t seed,
                              const BuildOptions& options) {
    theta.validate();
    const double r = static_cast<double>(theta.r);
    const Coefficients c{1.0, r, 2.0 / std::sqrt(theta.beta), std::sqrt(2.0)};
    return assemble(theta, GeneralizedParams::canonical(theta), grid, seed, options, c);
}

EigenResult smallest_eigenvalues(const DiscretizedOperator& op, std::size_t k, const EigenOptions& options) {
    const std::size_t m = static_cast<std::size_t>(op.kramers_multiplicity);
    if (k == 0 || k * m > op.dimension())
        throw std::invalid_argument("requested eigenvalue count out of range");
    EigenResult res = edgelab::smallest_eigenvalues(op.matrix, k * m, options);
    if (m == 2) res.values = dedupe_pairs(res.values);
    return res;
}

std::vector<double> eigenvalues_below(const DiscretizedOperator& op, double cutoff) {
    auto w = edgelab::eigenvalues_below(op.matrix, cutoff);
    if (op.kramers_multiplicity == 2) {
        if (w.size() % 2 == 1) w.pop_back();
        w = dedupe_pairs(w);
    }
    return w;
}

PointConfiguration spectrum_to_configuration(const std::vector<double>& eigenvalues, std::size_t k,
                                             const GridSpec& grid) {
    if (k > eigenvalues.size()) throw std::invalid_argument("truncation exceeds available eigenvalues");
    std::vector<double> kept(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(k));
    return make_configuration(std::move(kept), "discretized-operator", grid.h, grid.L);
}

} // namespace edgelab::sao
