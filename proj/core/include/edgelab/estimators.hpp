#pragma once

#include "edgelab/point_configuration.hpp"
#include "edgelab/sao_operator.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace edgelab::estimators {

struct EstimatorSettings {
    double c1 = 0.05;
    double c2 = 0.5;
    int M = 3;
    /// Largest admissible truncation tail bound before a trace is flagged.
    double tail_policy = 1e-6;

    void validate() const;
    /// t_n = exp(-c1 n).
    double time(std::size_t n) const;
    /// N_m = ceil(m^(1 + c2)).
    std::size_t block_end(int m) const;
};

struct TraceValue {
    double value = 0.0;
    double tail_bound = 0.0;
    bool tail_flag = false;
};

/// Sum of exp(-t x / 2) over the points, with a gap-extrapolated bound on the missing tail.
TraceValue exp_trace(const PointConfiguration& config, double t, double tail_policy = 1e-6);

struct TEstimate {
    double value = 0.0;
    /// Block averages A_{N_m} for m = 1..M.
    std::vector<double> block_averages;
    double last_increment = 0.0;
    bool divergence_flag = false;
    bool tail_flag = false;
};

/// 1/2 + 2 A_{N_M} with A_N the average over n <= N of trace(t_n) - sqrt(2/pi) t_n^{-3/2}.
TEstimate estimator_T_from_trace(const std::function<double(double)>& trace, const EstimatorSettings& s);
TEstimate estimator_T(const PointConfiguration& config, const EstimatorSettings& s);

struct RigidityEstimate {
    double value = 0.0;
    long nearest = 0;
    std::vector<double> block_averages;
    bool divergence_flag = false;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double x) const { return x >= lower && x < upper; }
};

/// Rigidity count from the exponential trace of the points outside B.
RigidityEstimate rigidity_count_from_trace(const std::function<double(double)>& outside_trace, int robin_count,
                                           double beta, const EstimatorSettings& s);

/// Number of points inside B predicted from the points outside B, given r0 and beta.
RigidityEstimate rigidity_count(const PointConfiguration& outside, const Interval& b, int robin_count, double beta,
                                const EstimatorSettings& s);

/// (1/2) sum x^2/2 - (1/n) sum_{i<j} log|x_j - x_i|.
double hamiltonian_energy(const std::vector<double>& points);

/// log(beta^2/4) - 2 psi(1 + beta/2).
double F_beta(double beta);
double F_beta_derivative(double beta);

/// Inverts the large-n energy limit; throws std::range_error when the statistic is outside F's range.
double beta_from_energy(double energy, std::size_t n);

/// Expected energy predicted by the limit relation for given beta.
double energy_limit(double beta, std::size_t n);

double log_Z_gbe(std::size_t n, double beta);

/// 1/4 (2 r0 - r + r sigma^2/kappa + r(r-1) upsilon^2/kappa).
double trace_constant_formula(const sao::SaoParams& theta, const sao::GeneralizedParams& eta);

/// Leading small-t coefficient r / (sqrt(2 pi) kappa) of the expected trace.
double trace_leading_coefficient(const sao::SaoParams& theta, const sao::GeneralizedParams& eta);

} // namespace edgelab::estimators
