#include "edgelab/estimators.hpp"

#include "edgelab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace edgelab::estimators {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

double heat_leading(double t) {
    return kSqrt2OverPi * std::pow(t, -1.5);
}

/// Block averages of f(t_n) for n = 1..N_M, evaluated at each block end N_m.
std::vector<double> block_averages(const std::function<double(double)>& f, const EstimatorSettings& s) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(s.M));
    double acc = 0.0;
    std::size_t n = 0;
    for (int m = 1; m <= s.M; ++m) {
        const std::size_t end = s.block_end(m);
        for (; n < end; ++n) acc += f(s.time(n + 1));
        out.push_back(acc / static_cast<double>(end));
    }
    return out;
}

bool diverging(const std::vector<double>& a) {
    if (a.size() < 4) return false;
    const std::size_t k = a.size();
    const double i1 = std::abs(a[k - 3] - a[k - 4]);
    const double i2 = std::abs(a[k - 2] - a[k - 3]);
    const double i3 = std::abs(a[k - 1] - a[k - 2]);
    return i1 < i2 && i2 < i3;
}

} // namespace

void EstimatorSettings::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("c1 and c2 must be positive");
    if (M < 1) throw std::invalid_argument("outer index M must be at least 1");
}

double EstimatorSettings::time(std::size_t n) const {
    return std::exp(-c1 * static_cast<double>(n));
}

std::size_t EstimatorSettings::block_end(int m) const {
    const double v = std::pow(static_cast<double>(m), 1.0 + c2);
    // Guard against pow returning k + 1e-15 for exact integers.
    return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

TraceValue exp_trace(const PointConfiguration& config, double t, double tail_policy) {
    if (!(t > 0.0)) throw std::invalid_argument("exp_trace: t must be positive");
    TraceValue tv;
    for (double x : config.points) tv.value += std::exp(-0.5 * t * x);
    if (config.points.size() >= 2) {
        const double last = config.points.back();
        const double gap = config.points.back() - config.points[config.points.size() - 2];
        tv.tail_bound = gap > 0.0 ? std::exp(-0.5 * t * last) * (1.0 + 2.0 / (t * gap)) : std::numeric_limits<double>::infinity();
    }
    tv.tail_flag = tv.tail_bound > tail_policy;
    return tv;
}

TEstimate estimator_T_from_trace(const std::function<double(double)>& trace, const EstimatorSettings& s) {
    s.validate();
    TEstimate est;
    est.block_averages = block_averages([&](double t) { return trace(t) - heat_leading(t); }, s);
    const auto& a = est.block_averages;
    est.value = 0.5 + 2.0 * a.back();
    est.last_increment = a.size() >= 2 ? std::abs(a.back() - a[a.size() - 2]) : 0.0;
    est.divergence_flag = diverging(a);
    return est;
}

TEstimate estimator_T(const PointConfiguration& config, const EstimatorSettings& s) {
    if (config.points.empty()) throw std::invalid_argument("estimator_T: empty configuration");
    bool tail = false;
    auto est = estimator_T_from_trace(
        [&](double t) {
            const auto tv = exp_trace(config, t, s.tail_policy);
            tail = tail || tv.tail_flag;
            return tv.value;
        },
        s);
    est.tail_flag = tail;
    return est;
}

RigidityEstimate rigidity_count_from_trace(const std::function<double(double)>& outside_trace, int robin_count,
                                           double beta, const EstimatorSettings& s) {
    s.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("rigidity_count: beta must be positive");
    const double constant = 0.5 * (robin_count + 1.0 / beta) - 0.25;
    RigidityEstimate est;
    est.block_averages =
        block_averages([&](double t) { return heat_leading(t) + constant - outside_trace(t); }, s);
    est.value = est.block_averages.back();
    est.nearest = std::lround(est.value);
    est.divergence_flag = diverging(est.block_averages);
    return est;
}

RigidityEstimate rigidity_count(const PointConfiguration& outside, const Interval& b, int robin_count, double beta,
                                const EstimatorSettings& s) {
    if (!(b.upper >= b.lower)) throw std::invalid_argument("rigidity_count: interval bounds reversed");
    for (double x : outside.points)
        if (b.contains(x)) throw std::invalid_argument("rigidity_count: configuration has a point inside B");
    return rigidity_count_from_trace(
        [&](double t) {
            double tr = 0.0;
            for (double x : outside.points) tr += std::exp(-0.5 * t * x);
            return tr;
        },
        robin_count, beta, s);
}

double hamiltonian_energy(const std::vector<double>& points) {
    const std::size_t n = points.size();
    if (n == 0) return 0.0;
    double quad = 0.0;
    for (double x : points) quad += 0.5 * x * x;
    double logs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(points[j] - points[i]);
            if (d == 0.0) throw std::invalid_argument("hamiltonian_energy: coincident points");
            logs += std::log(d);
        }
    return 0.5 * quad - logs / static_cast<double>(n);
}

double F_beta(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("F_beta: beta must be positive");
    return std::log(0.25 * beta * beta) - 2.0 * digamma(1.0 + 0.5 * beta);
}

double F_beta_derivative(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("F_beta_derivative: beta must be positive");
    return 2.0 / beta - trigamma(1.0 + 0.5 * beta);
}

double energy_limit(double beta, std::size_t n) {
    const double nn = static_cast<double>(n);
    return 3.0 * nn / 8.0 - 0.5 * std::log(nn) - 0.25 * (1.0 + F_beta(beta));
}

double beta_from_energy(double energy, std::size_t n) {
    if (n < 2) throw std::invalid_argument("beta_from_energy: n must be at least 2");
    const double nn = static_cast<double>(n);
    const double target = -4.0 * (energy - 3.0 * nn / 8.0 + 0.5 * std::log(nn)) - 1.0;
    double lo = std::log(1e-6), hi = std::log(1e6);
    const double flo = F_beta(std::exp(lo)), fhi = F_beta(std::exp(hi));
    if (!(target >= flo && target <= fhi))
        throw std::range_error("energy statistic outside the invertible range of F");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F_beta(std::exp(mid)) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double log_Z_gbe(std::size_t n, double beta) {
    if (n < 1) throw std::invalid_argument("log_Z_gbe: n must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("log_Z_gbe: beta must be positive");
    const double nn = static_cast<double>(n);
    double v = 0.5 * nn * std::log(2.0 * std::numbers::pi) +
               (-beta * nn * nn / 4.0 + (beta / 4.0 - 0.5) * nn) * std::log(nn * beta / 2.0);
    for (std::size_t j = 1; j <= n; ++j) v += std::lgamma(1.0 + static_cast<double>(j) * beta / 2.0);
    v -= nn * std::lgamma(1.0 + beta / 2.0);
    return v;
}

double trace_constant_formula(const sao::SaoParams& theta, const sao::GeneralizedParams& eta) {
    theta.validate();
    eta.validate();
    const double r = theta.r;
    const double r0 = theta.robin_count();
    const double s2 = eta.sigma * eta.sigma;
    const double u2 = eta.upsilon * eta.upsilon;
    return 0.25 * (2.0 * r0 - r + r * s2 / eta.kappa + r * (r - 1.0) * u2 / eta.kappa);
}

double trace_leading_coefficient(const sao::SaoParams& theta, const sao::GeneralizedParams& eta) {
    return theta.r / (std::sqrt(2.0 * std::numbers::pi) * eta.kappa);
}

} // namespace edgelab::estimators
