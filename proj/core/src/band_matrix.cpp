#include "edgelab/band_matrix.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace edgelab {

BandedHermitian::BandedHermitian(std::size_t n, std::size_t bandwidth, bool real)
    : n_(n), kd_(bandwidth), real_(real), band_((bandwidth + 1) * n, cplx{}) {
    if (n == 0) throw std::invalid_argument("BandedHermitian: empty matrix");
    if (bandwidth >= n && n > 1) kd_ = n - 1;
    band_.assign((kd_ + 1) * n, cplx{});
}

cplx* BandedHermitian::slot(std::size_t i, std::size_t j) {
    return &band_[(i - j) + j * (kd_ + 1)];
}

cplx BandedHermitian::get(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("BandedHermitian::get");
    if (i >= j) {
        if (i - j > kd_) return {};
        return band_[(i - j) + j * (kd_ + 1)];
    }
    if (j - i > kd_) return {};
    return std::conj(band_[(j - i) + i * (kd_ + 1)]);
}

void BandedHermitian::set(std::size_t i, std::size_t j, cplx value) {
    if (i >= n_ || j >= n_) throw std::out_of_range("BandedHermitian::set");
    if (i < j) {
        std::swap(i, j);
        value = std::conj(value);
    }
    if (i - j > kd_) throw std::out_of_range("BandedHermitian::set: outside band");
    if (i == j && value.imag() != 0.0) throw std::invalid_argument("BandedHermitian: complex diagonal");
    if (real_ && value.imag() != 0.0) throw std::invalid_argument("BandedHermitian: complex entry in real matrix");
    *slot(i, j) = value;
}

void BandedHermitian::add(std::size_t i, std::size_t j, cplx value) {
    set(i, j, get(i, j) + value);
}

std::vector<cplx> BandedHermitian::apply(const std::vector<cplx>& x) const {
    if (x.size() != n_) throw std::invalid_argument("BandedHermitian::apply: size mismatch");
    std::vector<cplx> y(n_, cplx{});
    for (std::size_t j = 0; j < n_; ++j) {
        y[j] += band_[j * (kd_ + 1)] * x[j];
        for (std::size_t d = 1; d <= kd_ && j + d < n_; ++d) {
            const cplx v = band_[d + j * (kd_ + 1)];
            y[j + d] += v * x[j];
            y[j] += std::conj(v) * x[j + d];
        }
    }
    return y;
}

double BandedHermitian::norm_inf() const {
    std::vector<double> rows(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        rows[j] += std::abs(band_[j * (kd_ + 1)]);
        for (std::size_t d = 1; d <= kd_ && j + d < n_; ++d) {
            const double v = std::abs(band_[d + j * (kd_ + 1)]);
            rows[j + d] += v;
            rows[j] += v;
        }
    }
    return *std::max_element(rows.begin(), rows.end());
}

double BandedHermitian::trace() const {
    double t = 0.0;
    for (std::size_t j = 0; j < n_; ++j) t += band_[j * (kd_ + 1)].real();
    return t;
}

Eigen::MatrixXcd BandedHermitian::dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = get(i, j);
    return m;
}

BandedHermitian BandedHermitian::scaled(double factor) const {
    BandedHermitian out = *this;
    for (auto& v : out.band_) v *= factor;
    return out;
}

namespace {

/// Runs the banded expert driver for eigenvalues only. range is 'V' or 'I'.
std::vector<double> banded_values(const BandedHermitian& a, char range, double vl, double vu,
                                  lapack_int il, lapack_int iu) {
    const auto n = static_cast<lapack_int>(a.size());
    const auto kd = static_cast<lapack_int>(a.bandwidth());
    const lapack_int ldab = kd + 1;
    std::vector<double> w(a.size());
    std::vector<lapack_int> ifail(a.size());
    lapack_int m = 0;
    lapack_int info = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    if (a.is_real()) {
        std::vector<double> ab(a.band().size());
        std::transform(a.band().begin(), a.band().end(), ab.begin(), [](cplx v) { return v.real(); });
        double q = 0.0, z = 0.0;
        info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', range, 'L', n, kd, ab.data(), ldab, &q, 1, vl, vu, il, iu,
                              abstol, &m, w.data(), &z, 1, ifail.data());
    } else {
        std::vector<cplx> ab = a.band();
        cplx q{}, z{};
        info = LAPACKE_zhbevx(LAPACK_COL_MAJOR, 'N', range, 'L', n, kd, ab.data(), ldab, &q, 1, vl, vu, il, iu,
                              abstol, &m, w.data(), &z, 1, ifail.data());
    }
    if (info != 0) throw ConvergenceError("banded eigensolver failed, info=" + std::to_string(info), -1.0);
    w.resize(static_cast<std::size_t>(m));
    return w;
}

/// Inverse iteration for the eigenvector nearest to lambda; returns the relative residual.
double inverse_iteration_residual(const BandedHermitian& a, double lambda, double anorm, std::size_t index) {
    const auto n = static_cast<lapack_int>(a.size());
    const auto kd = static_cast<lapack_int>(a.bandwidth());
    const lapack_int ldab = 2 * kd + kd + 1;
    const double shift = lambda + 1e-11 * std::max(anorm, 1.0);
    std::vector<cplx> ab(static_cast<std::size_t>(ldab) * a.size(), cplx{});
    for (lapack_int j = 0; j < n; ++j) {
        for (lapack_int i = std::max<lapack_int>(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
            cplx v = a.get(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (i == j) v -= shift;
            ab[static_cast<std::size_t>(2 * kd + i - j + j * ldab)] = v;
        }
    }
    std::vector<lapack_int> ipiv(a.size());
    lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(), ldab, ipiv.data());
    if (info < 0) throw ConvergenceError("inverse iteration factorization failed", -1.0);
    std::vector<cplx> x(a.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = cplx(1.0 + 0.37 * std::sin(0.7 * static_cast<double>(i + index)), 0.1 * std::cos(1.3 * i));
    for (int it = 0; it < 3; ++it) {
        info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
        if (info != 0) throw ConvergenceError("inverse iteration solve failed", -1.0);
        double nrm = 0.0;
        for (const auto& v : x) nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConvergenceError("inverse iteration diverged", -1.0);
        for (auto& v : x) v /= nrm;
    }
    const auto ax = a.apply(x);
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r += std::norm(ax[i] - lambda * x[i]);
    return std::sqrt(r) / std::max(anorm, 1e-300);
}

} // namespace

EigenResult smallest_eigenvalues(const BandedHermitian& a, std::size_t k, const EigenOptions& options) {
    if (k == 0 || k > a.size())
        throw std::invalid_argument("smallest_eigenvalues: k must be in [1, n], got " + std::to_string(k));
    EigenResult result;
    result.values = banded_values(a, 'I', 0.0, 0.0, 1, static_cast<lapack_int>(k));
    if (result.values.size() != k) throw ConvergenceError("eigensolver returned too few eigenvalues", -1.0);
    if (options.verify_residuals) {
        const double anorm = a.norm_inf();
        double worst = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = inverse_iteration_residual(a, result.values[i], anorm, i);
            worst = std::max(worst, r);
            if (!(r <= options.residual_tolerance))
                throw ConvergenceError("eigenpair residual " + std::to_string(r) + " exceeds tolerance", r);
        }
        result.max_residual = worst;
    }
    return result;
}

std::vector<double> eigenvalues_below(const BandedHermitian& a, double upper) {
    auto w = all_eigenvalues(a);
    w.erase(std::lower_bound(w.begin(), w.end(), upper), w.end());
    return w;
}

std::vector<double> all_eigenvalues(const BandedHermitian& a) {
    const auto n = static_cast<lapack_int>(a.size());
    const auto kd = static_cast<lapack_int>(a.bandwidth());
    std::vector<double> w(a.size());
    lapack_int info = 0;
    if (a.is_real()) {
        std::vector<double> ab(a.band().size());
        std::transform(a.band().begin(), a.band().end(), ab.begin(), [](cplx v) { return v.real(); });
        double z = 0.0;
        info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd, ab.data(), kd + 1, w.data(), &z, 1);
    } else {
        std::vector<cplx> ab = a.band();
        cplx z{};
        info = LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd, ab.data(), kd + 1, w.data(), &z, 1);
    }
    if (info != 0) throw ConvergenceError("banded eigensolver failed, info=" + std::to_string(info), -1.0);
    return w;
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> diagonal, std::vector<double> offdiagonal) {
    if (diagonal.empty()) return {};
    if (offdiagonal.size() + 1 != diagonal.size())
        throw std::invalid_argument("tridiagonal_eigenvalues: off-diagonal length must be n - 1");
    offdiagonal.push_back(0.0);
    const lapack_int info =
        LAPACKE_dsterf(static_cast<lapack_int>(diagonal.size()), diagonal.data(), offdiagonal.data());
    if (info != 0) throw ConvergenceError("tridiagonal eigensolver failed, info=" + std::to_string(info), -1.0);
    return diagonal;
}

std::vector<double> dense_hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXcd m = a;
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, w.data());
    if (info != 0) throw ConvergenceError("dense Hermitian eigensolver failed", -1.0);
    return w;
}

std::vector<double> dense_symmetric_eigenvalues(const Eigen::MatrixXd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd m = a;
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, w.data());
    if (info != 0) throw ConvergenceError("dense symmetric eigensolver failed", -1.0);
    return w;
}

} // namespace edgelab
