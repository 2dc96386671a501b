#pragma once

#include "edgelab/random.hpp"
#include "edgelab/stats.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace edgelab::bridge {

/// Brownian bridge from x to y over [0, t] sampled on a uniform grid of S steps.
///
/// A reflected path stores |B| in values and keeps the signed skeleton so that
/// functionals of the piecewise-linear interpolant can be evaluated exactly.
struct BridgePath {
    double t = 1.0;
    double x = 0.0;
    double y = 0.0;
    std::vector<double> values;
    bool reflected = false;
    std::vector<double> signed_values;

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double step() const { return t / static_cast<double>(steps()); }
    /// Skeleton used for exact per-step formulas: the signed path when available.
    const std::vector<double>& skeleton() const { return signed_values.empty() ? values : signed_values; }
};

/// Exact Gaussian bridge at the grid times by sequential conditional sampling.
BridgePath sample_bridge(double x, double y, double t, std::size_t steps, Rng& rng);
BridgePath sample_bridge(double x, double y, double t, std::size_t steps, std::uint64_t seed);

BridgePath reflect(BridgePath path);

/// Reflected bridge from x back to x: |B^{x,x}| or |B^{x,-x}| with odds 1 : exp(-2x^2/t).
BridgePath sample_reflected_bridge(double x, double t, std::size_t steps, Rng& rng);

/// Space-time local time histogram: values[interval * bins + bin] is the occupation time of
/// [origin + bin*delta, origin + (bin+1)*delta) during the interval, divided by delta.
struct LocalTimeField {
    double delta = 0.01;
    double origin = 0.0;
    std::size_t bins = 0;
    std::vector<double> time_edges;
    std::vector<double> values;

    std::size_t intervals() const { return time_edges.size() - 1; }
    const double* row(std::size_t interval) const { return values.data() + interval * bins; }
    std::vector<double> total() const;
    /// Spatial inner product of two interval rows.
    double inner(std::size_t a, std::size_t b) const;
};

/// Histogram of the piecewise-linear interpolant. Bins are aligned to multiples of 2*delta so
/// that squared norms can be extrapolated in the bin width.
LocalTimeField local_time_field(const BridgePath& path, double delta, const std::vector<double>& time_edges);
LocalTimeField local_time_field(const BridgePath& path, double delta, std::size_t intervals = 1);

/// sum L^2 delta over one histogram row.
double squared_norm(const std::vector<double>& row, double delta);
/// 2 S(delta) - S(2 delta), cancelling the first-order bin-width bias.
double squared_norm_extrapolated(const std::vector<double>& row, double delta);

/// Richardson-extrapolated ||L_t||_2^2 of the path.
double self_intersection(const BridgePath& path, double delta);

/// Integral of the interpolated path over [0, t] (exact for the piecewise-linear reflection).
double path_integral(const BridgePath& path);

struct BoundaryEstimate {
    double value = 0.0;
    bool converged = true;
};

/// (1/2 eps) occupation of (-eps, eps) for a decreasing ladder of eps, extrapolated linearly to eps = 0.
BoundaryEstimate boundary_local_time(const BridgePath& path, const std::vector<double>& epsilons);

/// Local time at level y, conditional expectation given the skeleton (exact bridge within steps).
double expected_local_time(const BridgePath& path, double level);
/// Probability that the continuous path touches level y, given the skeleton.
double hit_probability(const BridgePath& path, double level);
/// Exact draw of the local time at level y given the skeleton.
double sample_local_time(const BridgePath& path, double level, Rng& rng);
/// E[exp(-w L^0) | skeleton] for the boundary local time at 0.
double expected_boundary_weight(const BridgePath& path, double w);

/// Per-step hit probability of level y for a bridge from a to b over time dt.
double step_hit_probability(double a, double b, double level, double dt);
/// Per-step expected local time at level y.
double step_expected_local_time(double a, double b, double level, double dt);
/// Per-step E[exp(-w l)] for the local time l at level y.
double step_exp_local_time(double a, double b, double level, double dt, double w);

/// Conditional cdf of L^y_t for a bridge from a to b over [0, t], including the atom at 0.
double pitman_conditional_cdf(double ell, double a, double b, double level, double t);

/// Transition density of reflected Brownian motion from x to x.
double reflected_kernel(double t, double x);
/// The same with the hard wall at 0 (killed process).
double killed_kernel(double t, double x);

enum class Coupling { Reflecting, Dirichlet };

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct BudgetSettings {
    std::size_t paths = 100000;
    std::size_t steps = 4096;
    double delta = 0.04;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Monte Carlo of Pi_X(t;x,x) E[F(X^{x,x})] via the pathwise right side
/// (F(|B^{x,x}|) +/- exp(-2x^2/t) F(|B^{x,-x}|)) / sqrt(2 pi t).
Estimate reflected_expectation(const std::function<double(const BridgePath&)>& f, double x, double t,
                               const BudgetSettings& budget, Coupling coupling = Coupling::Reflecting);

/// Direct Monte Carlo of E[F(X^{x,x})] using sample_reflected_bridge.
Estimate reflected_bridge_mean(const std::function<double(const BridgePath&)>& f, double x, double t,
                               const BudgetSettings& budget);

/// Mean of F over bridges from x to y.
Estimate bridge_mean(const std::function<double(const BridgePath&)>& f, double x, double y, double t,
                     const BudgetSettings& budget);

struct ReportItem {
    std::string item;
    double t = 0.0;
    double estimate = 0.0;
    double target = 0.0;
    double std_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

/// |estimate - target| <= max(tolerance, 3 stderr).
ReportItem make_item(std::string name, double t, double estimate, double target, double std_error,
                     double tolerance, std::string note = {});

/// E||L_1(B^{0,0})||^2 against sqrt(pi/2).
ReportItem check_self_intersection_mean(const BudgetSettings& budget);
/// Gaussian-weighted integral of E||L_1(B^{0,-2x})||^2 against sqrt(2)/(3 sqrt(pi)).
ReportItem check_self_intersection_integral(const BudgetSettings& budget);
/// Fraction of B^{x,x}_t paths touching 0 against exp(-2x^2/t).
ReportItem check_hit_probability(double x, double t, const BudgetSettings& budget);
/// E[L^0_1(B^{x,x}_1)] against the closed form sqrt(pi/2) erfc(sqrt(2) x).
ReportItem check_boundary_local_time(double x, const BudgetSettings& budget);
/// E[(L^y_1(B^{0,0}))^2] against 2 exp(-2y^2) - 2 sqrt(2 pi)|y| erfc(sqrt(2)|y|).
ReportItem check_local_time_second_moment(double y, const BudgetSettings& budget);

struct PitmanCheck {
    KsResult ks;
    bool pass = false;
};

/// KS distance between exact-in-step local times L^y_t(B^{x,x}) and the conditional Pitman law.
PitmanCheck pitman_density_check(double x, double y, double t, const BudgetSettings& budget);

struct ScalingCheck {
    KsResult ks;
    double mean_direct = 0.0;
    double mean_scaled = 0.0;
    bool pass = false;
};

/// Compares ||L_t(|B^{x,+-x}_t|)||^2 with t^{3/2} ||L_1(|B^{x/sqrt t, +-x/sqrt t}_1|)||^2 in law.
ScalingCheck silt_scaling_check(double t, double x, bool same_sign, const BudgetSettings& budget);

/// Per-t convergence report for the small-t asymptotics of the reflected bridge functionals.
std::vector<ReportItem> verify_bridge_asymptotics(double kappa, const std::vector<double>& t_grid,
                                                  const BudgetSettings& budget);

} // namespace edgelab::bridge
