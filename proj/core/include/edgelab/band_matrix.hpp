#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace edgelab {

using cplx = std::complex<double>;

/// Hermitian matrix with bounded bandwidth, stored as its lower band.
///
/// Element (i, j) with 0 <= i - j <= bandwidth lives at band_[(i - j) + j * (bandwidth + 1)],
/// which is the column-major lower storage expected by the banded LAPACK drivers.
class BandedHermitian {
public:
    BandedHermitian(std::size_t n, std::size_t bandwidth, bool real);

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return kd_; }
    bool is_real() const { return real_; }

    /// Any (i, j); entries outside the band are zero and upper entries are conjugated.
    cplx get(std::size_t i, std::size_t j) const;
    /// Sets (i, j) and implicitly its Hermitian mirror. Diagonal values must be real.
    void set(std::size_t i, std::size_t j, cplx value);
    void add(std::size_t i, std::size_t j, cplx value);

    std::vector<cplx> apply(const std::vector<cplx>& x) const;
    /// Maximum absolute row sum, an upper bound on the spectral norm.
    double norm_inf() const;
    double trace() const;
    Eigen::MatrixXcd dense() const;

    const std::vector<cplx>& band() const { return band_; }
    BandedHermitian scaled(double factor) const;

private:
    cplx* slot(std::size_t i, std::size_t j);
    std::size_t n_;
    std::size_t kd_;
    bool real_;
    std::vector<cplx> band_;
};

/// Raised when the eigensolver cannot certify a result.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct EigenOptions {
    /// Recompute eigenvectors by inverse iteration and check ||Av - lambda v|| / ||A||.
    bool verify_residuals = true;
    double residual_tolerance = 1e-8;
};

struct EigenResult {
    std::vector<double> values;
    /// Largest relative residual seen; negative when residuals were not verified.
    double max_residual = -1.0;
};

/// The k smallest eigenvalues in ascending order.
EigenResult smallest_eigenvalues(const BandedHermitian& a, std::size_t k, const EigenOptions& options = {});

/// All eigenvalues strictly below upper, ascending.
std::vector<double> eigenvalues_below(const BandedHermitian& a, double upper);

/// Full spectrum, ascending.
std::vector<double> all_eigenvalues(const BandedHermitian& a);

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diagonal, std::vector<double> offdiagonal);

/// Eigenvalues of a dense Hermitian matrix, ascending.
std::vector<double> dense_hermitian_eigenvalues(const Eigen::MatrixXcd& a);
std::vector<double> dense_symmetric_eigenvalues(const Eigen::MatrixXd& a);

} // namespace edgelab
