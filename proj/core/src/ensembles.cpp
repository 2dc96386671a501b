#include "edgelab/ensembles.hpp"

#include "edgelab/band_matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgelab::ensembles {

Field field_from_beta(int beta) {
    switch (beta) {
    case 1: return Field::Real;
    case 2: return Field::Complex;
    case 4: return Field::Quaternion;
    default: throw std::invalid_argument("field index must be 1, 2 or 4, got " + std::to_string(beta));
    }
}

void SpikeVector::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("spike strengths must be finite and nonnegative");
        if (i + 1 < values.size() && values[i] < values[i + 1])
            throw std::invalid_argument("spike strengths must be listed largest first");
    }
}

void SpikedModelSpec::validate() const {
    spikes.validate();
    if (n == 0) throw std::invalid_argument("matrix size n must be positive");
    if (kind == ModelKind::Wishart) {
        if (p == 0) throw std::invalid_argument("Wishart column count p must be positive");
        if (p < spikes.rank()) throw std::invalid_argument("Wishart model requires p >= spike rank");
    } else if (n < spikes.rank()) {
        throw std::invalid_argument("Gaussian model requires n >= spike rank");
    }
}

double SpikedModelSpec::aspect_ratio() const {
    if (kind == ModelKind::Gaussian) return 1.0;
    return static_cast<double>(p) / static_cast<double>(n);
}

void BetaHermiteSpec::validate() const {
    if (n < 2) throw std::invalid_argument("beta-Hermite size must be at least 2");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
}

SpectrumSample sample_beta_hermite(const BetaHermiteSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const std::size_t n = spec.n;
    const double scale = 1.0 / std::sqrt(spec.beta * static_cast<double>(n));
    std::vector<double> diag(n), off(n - 1);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::sqrt(2.0) * rng.normal() * scale;
    for (std::size_t i = 0; i + 1 < n; ++i)
        off[i] = rng.chi(spec.beta * static_cast<double>(n - 1 - i)) * scale;
    SpectrumSample out;
    out.eigenvalues = tridiagonal_eigenvalues(std::move(diag), std::move(off));
    out.spec = spec;
    out.seed = seed;
    return out;
}

namespace {

/// Standard Gaussian in the field with E|z|^2 = 1, as a quaternion (a, b, c, d) packed
/// into two complex numbers (a + bi, c + di). Real and complex fields leave the rest zero.
struct FieldEntry {
    cplx u;
    cplx v;
};

FieldEntry draw_entry(Rng& rng, Field f) {
    switch (f) {
    case Field::Real: return {cplx(rng.normal(), 0.0), {}};
    case Field::Complex: {
        const double s = std::sqrt(0.5);
        const double a = rng.normal() * s;
        const double b = rng.normal() * s;
        return {cplx(a, b), {}};
    }
    case Field::Quaternion: {
        const double a = rng.normal() * 0.5;
        const double b = rng.normal() * 0.5;
        const double c = rng.normal() * 0.5;
        const double d = rng.normal() * 0.5;
        return {cplx(a, b), cplx(c, d)};
    }
    }
    return {};
}

/// Writes q = u + v j into the 2x2 complex block [[u, v], [-conj(v), conj(u)]].
void put_quaternion(Eigen::MatrixXcd& m, Eigen::Index i, Eigen::Index j, FieldEntry q) {
    m(2 * i, 2 * j) = q.u;
    m(2 * i, 2 * j + 1) = q.v;
    m(2 * i + 1, 2 * j) = -std::conj(q.v);
    m(2 * i + 1, 2 * j + 1) = std::conj(q.u);
}

Eigen::MatrixXcd draw_matrix(Rng& rng, Field f, std::size_t rows, std::size_t cols) {
    const Eigen::Index k = f == Field::Quaternion ? 2 : 1;
    Eigen::MatrixXcd m(k * rows, k * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const auto e = draw_entry(rng, f);
            if (f == Field::Quaternion)
                put_quaternion(m, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), e);
            else
                m(i, j) = e.u;
        }
    return m;
}

std::vector<double> spectrum_of(const Eigen::MatrixXcd& h, Field f) {
    std::vector<double> w;
    if (f == Field::Real)
        w = dense_symmetric_eigenvalues(h.real());
    else
        w = dense_hermitian_eigenvalues(h);
    if (f == Field::Quaternion) {
        std::vector<double> half;
        half.reserve(w.size() / 2);
        for (std::size_t i = 1; i < w.size(); i += 2) half.push_back(w[i]);
        return half;
    }
    return w;
}

} // namespace

SpectrumSample sample_spiked_wishart(const SpikedModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.kind != ModelKind::Wishart) throw std::invalid_argument("sample_spiked_wishart: spec is not Wishart");
    Rng rng(seed);
    const Eigen::Index k = spec.field == Field::Quaternion ? 2 : 1;
    Eigen::MatrixXcd d = draw_matrix(rng, spec.field, spec.n, spec.p);
    const std::size_t r = spec.spikes.rank();
    for (std::size_t i = 0; i < r; ++i) {
        // Column p-1-i carries spike l_i, so the last column holds the largest.
        const auto col = static_cast<Eigen::Index>(spec.p - 1 - i);
        const double s = std::sqrt(1.0 + spec.spikes.values[i]);
        d.middleCols(k * col, k) *= s;
    }
    const Eigen::MatrixXcd w = (d * d.adjoint()) / static_cast<double>(spec.n);
    SpectrumSample out;
    out.eigenvalues = spectrum_of(0.5 * (w + w.adjoint()), spec.field);
    out.spec = spec;
    out.seed = seed;
    return out;
}

SpectrumSample sample_spiked_gaussian(const SpikedModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.kind != ModelKind::Gaussian) throw std::invalid_argument("sample_spiked_gaussian: spec is not Gaussian");
    Rng rng(seed);
    const Eigen::MatrixXcd d = draw_matrix(rng, spec.field, spec.n, spec.n);
    Eigen::MatrixXcd y = (d + d.adjoint()) / std::sqrt(2.0 * static_cast<double>(spec.n));
    const Eigen::Index k = spec.field == Field::Quaternion ? 2 : 1;
    for (std::size_t i = 0; i < spec.spikes.rank(); ++i) {
        const auto idx = static_cast<Eigen::Index>(spec.n - 1 - i);
        for (Eigen::Index s = 0; s < k; ++s) y(k * idx + s, k * idx + s) += spec.spikes.values[i];
    }
    SpectrumSample out;
    out.eigenvalues = spectrum_of(y, spec.field);
    out.spec = spec;
    out.seed = seed;
    return out;
}

SpectrumSample sample_spiked(const SpikedModelSpec& spec, std::uint64_t seed) {
    return spec.kind == ModelKind::Wishart ? sample_spiked_wishart(spec, seed) : sample_spiked_gaussian(spec, seed);
}

double edge_location(const SpikedModelSpec& spec) {
    if (spec.kind == ModelKind::Gaussian) return 2.0;
    const double g = spec.aspect_ratio();
    return (1.0 + std::sqrt(g)) * (1.0 + std::sqrt(g));
}

double edge_scale(const SpikedModelSpec& spec) {
    const double n23 = std::pow(static_cast<double>(spec.n), 2.0 / 3.0);
    if (spec.kind == ModelKind::Gaussian) return n23;
    const double g = spec.aspect_ratio();
    return std::pow(g, -0.5) * std::pow(1.0 + std::pow(g, -0.5), -4.0 / 3.0) * n23;
}

PointConfiguration edge_rescale(const SpectrumSample& sample, const SpikedModelSpec& spec) {
    if (sample.eigenvalues.empty()) throw std::invalid_argument("edge_rescale: empty sample");
    double e = 2.0;
    double s = std::pow(static_cast<double>(sample.eigenvalues.size()), 2.0 / 3.0);
    std::string source = "beta-hermite";
    if (std::holds_alternative<SpikedModelSpec>(sample.spec)) {
        e = edge_location(spec);
        s = edge_scale(spec);
        source = spec.kind == ModelKind::Wishart ? "spiked-wishart" : "spiked-gaussian";
    }
    std::vector<double> pts;
    pts.reserve(sample.eigenvalues.size());
    for (auto it = sample.eigenvalues.rbegin(); it != sample.eigenvalues.rend(); ++it) pts.push_back(s * (e - *it));
    return make_configuration(std::move(pts), source);
}

double critical_threshold(ModelKind kind, double aspect_ratio) {
    return kind == ModelKind::Wishart ? std::sqrt(aspect_ratio) : 1.0;
}

CriticalSpike critical_spike_from_w(double w, std::size_t n, ModelKind kind, double aspect_ratio) {
    if (n == 0) throw std::invalid_argument("critical_spike_from_w: n must be positive");
    if (std::isnan(w) || w == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("critical_spike_from_w: w must be finite or +infinity");
    if (std::isinf(w)) return {0.0, false};
    const double n13 = std::pow(static_cast<double>(n), -1.0 / 3.0);
    double l = 0.0;
    if (kind == ModelKind::Wishart) {
        const double sg = std::sqrt(aspect_ratio);
        l = sg - w * sg * std::pow(1.0 + 1.0 / sg, 2.0 / 3.0) * n13;
    } else {
        l = 1.0 - w * n13;
    }
    if (l < 0.0) return {0.0, true};
    return {l, false};
}

double lrt_error_curve(double lambda, std::size_t rank) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lrt_error_curve: lambda must lie in [0, 1)");
    if (rank == 0) throw std::invalid_argument("lrt_error_curve: rank must be positive");
    return std::erfc(0.25 * static_cast<double>(rank) * std::sqrt(-std::log1p(-lambda)));
}

} // namespace edgelab::ensembles
