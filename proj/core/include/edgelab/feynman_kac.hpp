#pragma once

#include "edgelab/bridge.hpp"
#include "edgelab/ensembles.hpp"
#include "edgelab/random.hpp"
#include "edgelab/sao_operator.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace edgelab::fk {

/// Perfect matching of the positions {0, ..., n-1}. n = 0 is the empty matching.
struct Matching {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    bool valid() const;
    int partner(int position) const;
};

/// (n-1)!! for even n >= 0.
long double_factorial_count(int n);

/// All matchings of {0..n-1} in canonical order: the smallest unmatched position is paired
/// with each larger one in increasing order.
std::vector<Matching> enumerate_matchings(int n);

Matching sample_uniform_matching(int n, Rng& rng);

/// 2 * Poisson((r-1)^2 ||L||^2 / 2).
unsigned sample_jump_count(double l2norm2, int r, Rng& rng);

/// Draws n times from the self-intersection measure of the field, pair by pair: each matched pair
/// lands in time cells (a, b) with probability proportional to <L_a, L_b>, then uniformly inside.
std::vector<double> sample_si_times(const bridge::LocalTimeField& field, const Matching& q, Rng& rng);

/// Piecewise-constant path on the components {0..r-1}.
struct JumpPath {
    int start = 0;
    double horizon = 1.0;
    std::vector<double> times;
    /// states[0] = start, states[k] = value after the k-th jump.
    std::vector<int> states;

    std::size_t jumps() const { return times.size(); }
    int state_at(double s) const;
    int final_state() const { return states.back(); }
    /// (M_{k-1}, M_k) for k = 1..N.
    std::vector<std::pair<int, int>> jump_pairs() const;
};

struct JumpSample {
    JumpPath path;
    /// The sampled matching carried to sorted time positions.
    Matching sorted_matching;
};

/// Sorts the times, assigns a uniform non-self random walk from state i and transports q.
JumpSample build_jump_path(int i, const std::vector<double>& times, const Matching& q, int r, double horizon,
                           Rng& rng);

/// Local times of the bridge split by the state of the jump path.
struct StateLocalTimes {
    double delta = 0.0;
    /// bulk[j] is the spatial histogram collected while the path sits in state j.
    std::vector<std::vector<double>> bulk;
    /// boundary[j] is the expected boundary local time collected in state j.
    std::vector<double> boundary;
    std::vector<double> total_bulk;
    double total_boundary = 0.0;
};

StateLocalTimes combined_local_times(const JumpPath& jump, const bridge::BridgePath& path, double delta, int r);

/// E[exp(-sum_j w_j L^(j,0)) | skeleton], with exp(-inf * c) read as the indicator of c = 0.
double boundary_weight(const JumpPath& jump, const bridge::BridgePath& path, const std::vector<double>& w);

/// Field-dependent combinatorial constant of a jump sequence and matching (0 when incompatible).
double combinatorial_constant(const Matching& p, const std::vector<std::pair<int, int>>& jumps,
                              ensembles::Field field);

struct FkSettings {
    std::size_t steps = 1024;
    /// Spatial bin width; 0 selects 2.5 sqrt(t / steps).
    double delta = 0.0;
    std::size_t time_cells = 64;
    int max_jumps = 12;
    unsigned threads = 0;
};

struct FkEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    bridge::Estimate t0;
    bridge::Estimate t2;
    bridge::Estimate t4;
    /// Average probability mass of jump counts beyond max_jumps.
    double truncated_mass = 0.0;
    bool variance_flag = false;
    std::size_t samples = 0;
};

/// Monte Carlo of E[Tr exp(-t H)] for the generalized operator through the Feynman-Kac formula.
FkEstimate mc_expected_trace(const sao::SaoParams& theta, const sao::GeneralizedParams& eta, double t,
                             const FkSettings& settings, std::size_t samples, std::uint64_t seed);

// Eigenvalue-based trace studies.

/// traces[replica][k] = Tr exp(-t_k H) for the discretized generalized operator.
std::vector<std::vector<double>> trace_replicas(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                                                const sao::GridSpec& grid, const std::vector<double>& t_grid,
                                                std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

bridge::Estimate mean_trace(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                            const sao::GridSpec& grid, double t, std::size_t replicas, std::uint64_t seed,
                            unsigned threads = 0);

struct FitOptions {
    /// Exponents of the correction terms beyond t^{-3/2} and 1.
    std::vector<double> corrections{1.5};
    bool include_leading = true;
    std::size_t bootstrap = 200;
    double condition_limit = 1e8;
};

/// Correction exponents used by default: t^{3/2}, plus t^{1/2} when a finite nonzero Robin weight is present.
FitOptions default_fit_options(const sao::SaoParams& theta);

struct Interval95 {
    double lower = 0.0;
    double upper = 0.0;
};

struct FitResult {
    double leading = 0.0;
    double constant = 0.0;
    std::vector<double> corrections;
    Interval95 leading_ci;
    Interval95 constant_ci;
    bool ill_conditioned = false;
    std::vector<double> t_grid;
    std::vector<double> means;
    std::vector<double> std_errors;
};

/// Least-squares fit of a t^{-3/2} + b + sum c_k t^{p_k} to per-t means of the replica curves.
FitResult fit_trace_curve(const std::vector<std::vector<double>>& curves, const std::vector<double>& t_grid,
                          const FitOptions& options, std::uint64_t seed);

FitResult trace_constant_fit(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                             const sao::GridSpec& grid, const std::vector<double>& t_grid, std::size_t replicas,
                             std::uint64_t seed, const FitOptions& options, unsigned threads = 0);

/// Fit of b_first - b_second from seed-matched trace differences.
FitResult trace_delta_fit(const sao::SaoParams& first, const sao::GeneralizedParams& eta_first,
                          const sao::SaoParams& second, const sao::GeneralizedParams& eta_second,
                          const sao::GridSpec& grid, const std::vector<double>& t_grid, std::size_t replicas,
                          std::uint64_t seed, const FitOptions& options, unsigned threads = 0);

struct CovariancePair {
    double s = 0.0;
    double t = 0.0;
    double covariance = 0.0;
    double ratio = 0.0;
    double normalized = 0.0;
};

struct CovarianceReport {
    std::vector<CovariancePair> pairs;
    double max_normalized = 0.0;
    /// Slope of normalized covariance against -log(min/max), with a bootstrap interval.
    double slope = 0.0;
    Interval95 slope_ci;
    bool bounded = false;
};

CovarianceReport covariance_from_curves(const std::vector<std::vector<double>>& curves,
                                        const std::vector<double>& t_grid, std::size_t bootstrap,
                                        std::uint64_t seed);

CovarianceReport trace_covariance_check(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                                        const sao::GridSpec& grid, const std::vector<double>& t_grid,
                                        std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

} // namespace edgelab::fk
