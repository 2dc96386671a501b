#include "edgelab/bridge.hpp"

#include "edgelab/parallel.hpp"
#include "edgelab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edgelab::bridge {

namespace {

constexpr double kPi = std::numbers::pi;

/// Adds a linear piece from p to q lasting d to the occupation histogram.
void add_linear(double* occ, std::size_t size, double origin, double delta, double p, double q, double d) {
    if (d <= 0.0) return;
    const double lo = std::min(p, q);
    const double hi = std::max(p, q);
    const auto last = static_cast<long>(size) - 1;
    auto bin_of = [&](double v) {
        return std::clamp(static_cast<long>(std::floor((v - origin) / delta)), 0L, last);
    };
    const long b0 = bin_of(lo);
    const long b1 = bin_of(hi);
    if (b0 == b1 || hi - lo <= 0.0) {
        occ[static_cast<std::size_t>(bin_of(0.5 * (lo + hi)))] += d;
        return;
    }
    const double rate = d / (hi - lo);
    for (long b = b0; b <= b1; ++b) {
        const double e0 = origin + static_cast<double>(b) * delta;
        const double overlap = std::min(hi, e0 + delta) - std::max(lo, e0);
        if (overlap > 0.0) occ[static_cast<std::size_t>(b)] += rate * overlap;
    }
}

/// Adds a piece of the signed skeleton, reflecting it into [0, inf) when requested.
void add_piece(double* occ, std::size_t size, double origin, double delta, double p, double q, double d,
               bool fold) {
    if (!fold) {
        add_linear(occ, size, origin, delta, p, q, d);
        return;
    }
    if ((p < 0.0 && q > 0.0) || (p > 0.0 && q < 0.0)) {
        const double f = p / (p - q);
        add_linear(occ, size, origin, delta, std::abs(p), 0.0, f * d);
        add_linear(occ, size, origin, delta, 0.0, std::abs(q), (1.0 - f) * d);
        return;
    }
    add_linear(occ, size, origin, delta, std::abs(p), std::abs(q), d);
}

/// Time spent by a linear piece from p to q (duration d) inside the open interval (lo, hi).
double time_inside(double p, double q, double d, double lo, double hi) {
    const double a = std::min(p, q);
    const double b = std::max(p, q);
    if (b - a <= 0.0) return (a > lo && a < hi) ? d : 0.0;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    return overlap > 0.0 ? d * overlap / (b - a) : 0.0;
}

Estimate summarize(const std::vector<double>& xs) {
    RunningStats s;
    for (double x : xs) s.add(x);
    return {s.mean(), s.stderr_of_mean()};
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

BridgePath sample_bridge(double x, double y, double t, std::size_t steps, Rng& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_bridge: t must be positive");
    if (steps < 2) throw std::invalid_argument("sample_bridge: need at least 2 steps");
    BridgePath p;
    p.t = t;
    p.x = x;
    p.y = y;
    p.values.resize(steps + 1);
    p.values[0] = x;
    const double dt = t / static_cast<double>(steps);
    double v = x;
    for (std::size_t k = 0; k + 1 < steps; ++k) {
        const double remaining = t - static_cast<double>(k) * dt;
        const double mean = v + (y - v) * dt / remaining;
        const double var = dt * (remaining - dt) / remaining;
        v = mean + std::sqrt(var) * rng.normal();
        p.values[k + 1] = v;
    }
    p.values[steps] = y;
    return p;
}

BridgePath sample_bridge(double x, double y, double t, std::size_t steps, std::uint64_t seed) {
    Rng rng(seed);
    return sample_bridge(x, y, t, steps, rng);
}

BridgePath reflect(BridgePath path) {
    if (path.reflected) return path;
    path.signed_values = path.values;
    for (auto& v : path.values) v = std::abs(v);
    path.reflected = true;
    return path;
}

BridgePath sample_reflected_bridge(double x, double t, std::size_t steps, Rng& rng) {
    const double odds = std::exp(-2.0 * x * x / t);
    const bool flipped = rng.uniform() < odds / (1.0 + odds);
    return reflect(sample_bridge(x, flipped ? -x : x, t, steps, rng));
}

std::vector<double> LocalTimeField::total() const {
    std::vector<double> out(bins, 0.0);
    for (std::size_t i = 0; i < intervals(); ++i)
        for (std::size_t b = 0; b < bins; ++b) out[b] += values[i * bins + b];
    return out;
}

double LocalTimeField::inner(std::size_t a, std::size_t b) const {
    const double* ra = row(a);
    const double* rb = row(b);
    double s = 0.0;
    for (std::size_t k = 0; k < bins; ++k) s += ra[k] * rb[k];
    return s * delta;
}

LocalTimeField local_time_field(const BridgePath& path, double delta, const std::vector<double>& time_edges) {
    if (!(delta > 0.0)) throw std::invalid_argument("local_time_field: delta must be positive");
    if (time_edges.size() < 2) throw std::invalid_argument("local_time_field: need at least one interval");
    for (std::size_t i = 0; i + 1 < time_edges.size(); ++i)
        if (time_edges[i + 1] < time_edges[i]) throw std::invalid_argument("local_time_field: unsorted edges");
    if (std::abs(time_edges.front()) > 1e-12 || std::abs(time_edges.back() - path.t) > 1e-12 * std::max(1.0, path.t))
        throw std::invalid_argument("local_time_field: intervals must partition [0, t]");
    const auto& sk = path.skeleton();
    const bool fold = path.reflected;
    const std::size_t steps = path.steps();
    double lo = *std::min_element(sk.begin(), sk.end());
    double hi = *std::max_element(sk.begin(), sk.end());
    if (fold) {
        hi = std::max(std::abs(lo), std::abs(hi));
        lo = 0.0;
    }
    LocalTimeField field;
    field.delta = delta;
    field.origin = 2.0 * delta * std::floor(lo / (2.0 * delta));
    field.bins = 2 * static_cast<std::size_t>(std::ceil((hi - field.origin) / (2.0 * delta))) + 2;
    field.time_edges = time_edges;
    const std::size_t nint = time_edges.size() - 1;
    field.values.assign(nint * field.bins, 0.0);

    const double dt = path.step();
    std::size_t interval = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        double s0 = static_cast<double>(k) * dt;
        const double s1 = k + 1 == steps ? path.t : static_cast<double>(k + 1) * dt;
        const double a = sk[k];
        const double b = sk[k + 1];
        double pa = a;
        while (interval + 1 < nint && time_edges[interval + 1] <= s0) ++interval;
        while (s0 < s1) {
            double stop = s1;
            if (interval + 1 < nint && time_edges[interval + 1] < s1) stop = time_edges[interval + 1];
            const double pb = a + (b - a) * (stop - static_cast<double>(k) * dt) / (s1 - static_cast<double>(k) * dt);
            add_piece(field.values.data() + interval * field.bins, field.bins, field.origin, delta, pa, pb,
                          stop - s0, fold);
            pa = pb;
            s0 = stop;
            if (stop < s1) ++interval;
        }
    }
    for (auto& v : field.values) v /= delta;
    return field;
}

LocalTimeField local_time_field(const BridgePath& path, double delta, std::size_t intervals) {
    if (intervals == 0) throw std::invalid_argument("local_time_field: intervals must be positive");
    std::vector<double> edges(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        edges[i] = path.t * static_cast<double>(i) / static_cast<double>(intervals);
    edges.back() = path.t;
    return local_time_field(path, delta, edges);
}

double squared_norm(const std::vector<double>& row, double delta) {
    double s = 0.0;
    for (double v : row) s += v * v;
    return s * delta;
}

double squared_norm_extrapolated(const std::vector<double>& row, double delta) {
    double fine = 0.0, coarse = 0.0;
    for (std::size_t i = 0; i < row.size(); i += 2) {
        const double u = row[i];
        const double v = i + 1 < row.size() ? row[i + 1] : 0.0;
        fine += u * u + v * v;
        const double m = 0.5 * (u + v);
        coarse += m * m;
    }
    return 2.0 * fine * delta - coarse * 2.0 * delta;
}

double self_intersection(const BridgePath& path, double delta) {
    const auto field = local_time_field(path, delta, 1);
    return squared_norm_extrapolated(field.total(), delta);
}

double path_integral(const BridgePath& path) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < sk.size(); ++k) {
        const double p = sk[k], q = sk[k + 1];
        if (path.reflected && ((p < 0.0 && q > 0.0) || (p > 0.0 && q < 0.0)))
            s += dt * (p * p + q * q) / (2.0 * (std::abs(p) + std::abs(q)));
        else if (path.reflected)
            s += dt * 0.5 * (std::abs(p) + std::abs(q));
        else
            s += dt * 0.5 * (p + q);
    }
    return s;
}

BoundaryEstimate boundary_local_time(const BridgePath& path, const std::vector<double>& epsilons) {
    if (epsilons.size() < 2) throw std::invalid_argument("boundary_local_time: need at least two widths");
    const auto& sk = path.skeleton();
    const double dt = path.step();
    std::vector<double> vals;
    vals.reserve(epsilons.size());
    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw std::invalid_argument("boundary_local_time: widths must be positive");
        double occ = 0.0;
        for (std::size_t k = 0; k + 1 < sk.size(); ++k) occ += time_inside(sk[k], sk[k + 1], dt, -eps, eps);
        vals.push_back(occ / (2.0 * eps));
    }
    std::vector<double> design;
    for (double eps : epsilons) {
        design.push_back(1.0);
        design.push_back(eps);
    }
    BoundaryEstimate out;
    const double scale = *std::max_element(vals.begin(), vals.end());
    if (scale == 0.0) return out;
    const auto fit = least_squares(design, epsilons.size(), 2, vals);
    out.value = fit.coefficients[0];
    const double rms = std::sqrt(fit.rss / static_cast<double>(vals.size()));
    out.converged = std::isfinite(out.value) && rms <= 0.5 * scale && out.value >= -0.25 * scale;
    return out;
}

double step_hit_probability(double a, double b, double level, double dt) {
    const double p = a - level, q = b - level;
    if (p * q <= 0.0) return 1.0;
    return std::exp(-2.0 * p * q / dt);
}

double step_expected_local_time(double a, double b, double level, double dt) {
    const double p = a - level, q = b - level;
    const double u = std::abs(p) + std::abs(q);
    const double hit = step_hit_probability(a, b, level, dt);
    if (hit == 0.0) return 0.0;
    return std::sqrt(0.5 * kPi * dt) * erfcx(u / std::sqrt(2.0 * dt)) * hit;
}

double step_exp_local_time(double a, double b, double level, double dt, double w) {
    if (w == 0.0) return 1.0;
    const double p = a - level, q = b - level;
    const double u = std::abs(p) + std::abs(q);
    const double hit = step_hit_probability(a, b, level, dt);
    if (hit == 0.0) return 1.0;
    if (std::isinf(w)) return 1.0 - hit;
    return 1.0 - w * hit * std::sqrt(0.5 * kPi * dt) * erfcx((u + w * dt) / std::sqrt(2.0 * dt));
}

double expected_local_time(const BridgePath& path, double level) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < sk.size(); ++k) s += step_expected_local_time(sk[k], sk[k + 1], level, dt);
    return s;
}

double hit_probability(const BridgePath& path, double level) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double miss = 1.0;
    for (std::size_t k = 0; k + 1 < sk.size() && miss > 0.0; ++k)
        miss *= 1.0 - step_hit_probability(sk[k], sk[k + 1], level, dt);
    return 1.0 - miss;
}

double sample_local_time(const BridgePath& path, double level, Rng& rng) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < sk.size(); ++k) {
        const double hit = step_hit_probability(sk[k], sk[k + 1], level, dt);
        if (hit < 1e-300) continue;
        const double u = rng.uniform();
        if (u >= hit || u <= 0.0) continue;
        const double p = sk[k] - level, q = sk[k + 1] - level;
        const double span = std::abs(p) + std::abs(q);
        total += std::sqrt((p - q) * (p - q) - 2.0 * dt * std::log(u)) - span;
    }
    return total;
}

double expected_boundary_weight(const BridgePath& path, double w) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double prod = 1.0;
    for (std::size_t k = 0; k + 1 < sk.size(); ++k) prod *= step_exp_local_time(sk[k], sk[k + 1], 0.0, dt, w);
    return prod;
}

double pitman_conditional_cdf(double ell, double a, double b, double level, double t) {
    if (ell < 0.0) return 0.0;
    const double u = std::abs(a - level) + std::abs(b - level);
    const double d = a - b;
    return 1.0 - std::exp(-((u + ell) * (u + ell) - d * d) / (2.0 * t));
}

double reflected_kernel(double t, double x) {
    return (1.0 + std::exp(-2.0 * x * x / t)) / std::sqrt(2.0 * kPi * t);
}

double killed_kernel(double t, double x) {
    return (1.0 - std::exp(-2.0 * x * x / t)) / std::sqrt(2.0 * kPi * t);
}

Estimate reflected_expectation(const std::function<double(const BridgePath&)>& f, double x, double t,
                               const BudgetSettings& budget, Coupling coupling) {
    const double sign = coupling == Coupling::Reflecting ? 1.0 : -1.0;
    const double odds = std::exp(-2.0 * x * x / t);
    const double norm = 1.0 / std::sqrt(2.0 * kPi * t);
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            const auto same = reflect(sample_bridge(x, x, t, budget.steps, rng));
            const auto flip = reflect(sample_bridge(x, -x, t, budget.steps, rng));
            return norm * (f(same) + sign * odds * f(flip));
        },
        budget.threads);
    return summarize(vals);
}

Estimate reflected_bridge_mean(const std::function<double(const BridgePath&)>& f, double x, double t,
                               const BudgetSettings& budget) {
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            return f(sample_reflected_bridge(x, t, budget.steps, rng));
        },
        budget.threads);
    return summarize(vals);
}

Estimate bridge_mean(const std::function<double(const BridgePath&)>& f, double x, double y, double t,
                     const BudgetSettings& budget) {
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            return f(sample_bridge(x, y, t, budget.steps, rng));
        },
        budget.threads);
    return summarize(vals);
}

ReportItem make_item(std::string name, double t, double estimate, double target, double std_error,
                     double tolerance, std::string note) {
    ReportItem it;
    it.item = std::move(name);
    it.t = t;
    it.estimate = estimate;
    it.target = target;
    it.std_error = std_error;
    it.tolerance = tolerance;
    it.pass = std::isfinite(estimate) && std::abs(estimate - target) <= std::max(tolerance, 3.0 * std_error);
    it.note = std::move(note);
    return it;
}

ReportItem check_self_intersection_mean(const BudgetSettings& budget) {
    const auto est = bridge_mean([&](const BridgePath& p) { return self_intersection(p, budget.delta); }, 0.0, 0.0,
                                 1.0, budget);
    const double target = std::sqrt(0.5 * kPi);
    return make_item("self-intersection-mean", 1.0, est.value, target, est.std_error, 0.02 * target);
}

ReportItem check_self_intersection_integral(const BudgetSettings& budget) {
    // x is drawn from the half-normal law with variance 1/4, which absorbs exp(-2x^2) up to the factor 1/4.
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            const double x = std::abs(0.5 * rng.normal());
            const auto path = sample_bridge(0.0, -2.0 * x, 1.0, budget.steps, rng);
            return 0.25 * self_intersection(path, budget.delta);
        },
        budget.threads);
    const auto est = summarize(vals);
    const double target = std::sqrt(2.0) / (3.0 * std::sqrt(kPi));
    return make_item("self-intersection-integral", 1.0, est.value, target, est.std_error, 0.03 * target);
}

ReportItem check_hit_probability(double x, double t, const BudgetSettings& budget) {
    const auto est = bridge_mean([](const BridgePath& p) { return hit_probability(p, 0.0); }, x, x, t, budget);
    const double target = std::exp(-2.0 * x * x / t);
    return make_item("hit-probability", t, est.value, target, est.std_error, 0.01 * target);
}

ReportItem check_boundary_local_time(double x, const BudgetSettings& budget) {
    const std::vector<double> ladder{0.1, 0.05, 0.025};
    const auto est = bridge_mean(
        [&](const BridgePath& p) { return boundary_local_time(reflect(p), ladder).value; }, x, x, 1.0, budget);
    const double target = std::sqrt(0.5 * kPi) * std::erfc(std::sqrt(2.0) * x);
    return make_item("boundary-local-time", 1.0, est.value, target, est.std_error, 0.03 * target);
}

ReportItem check_local_time_second_moment(double y, const BudgetSettings& budget) {
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            const auto path = sample_bridge(0.0, 0.0, 1.0, budget.steps, rng);
            const double l = sample_local_time(path, y, rng);
            return l * l;
        },
        budget.threads);
    const auto est = summarize(vals);
    const double ay = std::abs(y);
    const double target = 2.0 * std::exp(-2.0 * y * y) - 2.0 * std::sqrt(2.0 * kPi) * ay * std::erfc(std::sqrt(2.0) * ay);
    return make_item("local-time-second-moment", 1.0, est.value, target, est.std_error, 0.03 * target);
}

PitmanCheck pitman_density_check(double x, double y, double t, const BudgetSettings& budget) {
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            const auto path = sample_bridge(x, x, t, budget.steps, rng);
            return sample_local_time(path, y, rng);
        },
        budget.threads);
    PitmanCheck out;
    out.ks = ks_one_sample(vals, [&](double l) { return pitman_conditional_cdf(l, x, x, y, t); });
    out.pass = out.ks.statistic < 0.02;
    return out;
}

ScalingCheck silt_scaling_check(double t, double x, bool same_sign, const BudgetSettings& budget) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("silt_scaling_check: t must lie in (0, 1]");
    const double end = same_sign ? x : -x;
    const double rt = std::sqrt(t);
    const auto direct = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, 2 * i));
            return self_intersection(reflect(sample_bridge(x, end, t, budget.steps, rng)), budget.delta);
        },
        budget.threads);
    const auto scaled = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, 2 * i + 1));
            const auto p = reflect(sample_bridge(x / rt, end / rt, 1.0, budget.steps, rng));
            return t * rt * self_intersection(p, budget.delta);
        },
        budget.threads);
    ScalingCheck out;
    out.ks = ks_two_sample(direct, scaled);
    out.mean_direct = summarize(direct).value;
    out.mean_scaled = summarize(scaled).value;
    out.pass = out.ks.statistic < 0.03;
    return out;
}

namespace {

struct PathFunctionals {
    double integral_dev = 0.0;  // int_0^t (X - x) ds
    double silt = 0.0;          // ||L_t||^2
    double boundary = 0.0;      // E[L^0 | skeleton]
};

PathFunctionals functionals(const BridgePath& reflected, double x, double delta) {
    PathFunctionals f;
    f.integral_dev = path_integral(reflected) - x * reflected.t;
    f.silt = self_intersection(reflected, delta);
    f.boundary = expected_local_time(reflected, 0.0);
    return f;
}

/// Importance-sampled x-integral of Pi_X(t;x,x) e^{-kappa t x} E[G(X^{x,x})] for a functional
/// G of the per-path summaries. near_boundary selects a half-normal proposal of scale sqrt(t)
/// instead of the exponential proposal.
Estimate x_integral(double kappa, double t, const BudgetSettings& budget, bool near_boundary, Coupling coupling,
                    const std::function<double(const PathFunctionals&)>& g) {
    const double rate = kappa * t;
    const double norm = 1.0 / std::sqrt(2.0 * kPi * t);
    const double sign = coupling == Coupling::Reflecting ? 1.0 : -1.0;
    const auto vals = parallel_map<double>(
        budget.paths,
        [&](std::size_t i) {
            Rng rng(derive_seed(budget.seed, i));
            double x = 0.0, density = 0.0;
            if (near_boundary) {
                const double s = std::sqrt(t);
                x = std::abs(s * rng.normal());
                density = 2.0 * std::exp(-0.5 * x * x / t) / std::sqrt(2.0 * kPi * t);
            } else {
                x = rng.exponential(rate);
                density = rate * std::exp(-rate * x);
            }
            const double odds = std::exp(-2.0 * x * x / t);
            const auto same = reflect(sample_bridge(x, x, t, budget.steps, rng));
            const auto flip = reflect(sample_bridge(x, -x, t, budget.steps, rng));
            const double v = g(functionals(same, x, budget.delta)) +
                             sign * odds * g(functionals(flip, x, budget.delta));
            return norm * std::exp(-rate * x) * v / density;
        },
        budget.threads);
    return summarize(vals);
}

} // namespace

std::vector<ReportItem> verify_bridge_asymptotics(double kappa, const std::vector<double>& t_grid,
                                                  const BudgetSettings& budget) {
    if (!(kappa > 0.0)) throw std::invalid_argument("verify_bridge_asymptotics: kappa must be positive");
    std::vector<ReportItem> report;
    const double coeff = 1.0 / (std::sqrt(2.0 * kPi) * kappa);
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("verify_bridge_asymptotics: t must lie in (0, 1]");
        const double rate = kappa * t;
        const double bulk = simpson([&](double x) { return std::exp(-rate * x) / std::sqrt(2.0 * kPi * t); }, 0.0,
                                    60.0 / rate, 200000);
        const double image = simpson(
            [&](double x) { return std::exp(-rate * x - 2.0 * x * x / t) / std::sqrt(2.0 * kPi * t); }, 0.0,
            12.0 * std::sqrt(t), 20000);
        const double general = bulk + image;
        const double dirichlet = bulk - image;
        const double lead = coeff * std::pow(t, -1.5);
        const double slack = kappa * std::pow(t, 1.5);
        BudgetSettings scaled = budget;
        scaled.delta = std::min(budget.delta, 2.5 * std::sqrt(t / static_cast<double>(budget.steps)));
        report.push_back(make_item("leading-coefficient", t, std::pow(t, 1.5) * general, coeff, 0.0,
                                   0.3 * std::pow(t, 1.5) + 1e-9,
                                   "matches 1/(sqrt(2 pi) kappa); 1/(2 pi kappa) does not fit"));
        report.push_back(make_item("robin-constant", t, general - lead, 0.25, 0.0, 0.25 * slack + 1e-6));
        report.push_back(make_item("dirichlet-constant", t, dirichlet - lead, -0.25, 0.0, 0.25 * slack + 1e-6));
        report.push_back(make_item("dirichlet-gap", t, general - dirichlet, 0.5, 0.0, 0.5 * slack + 1e-6));

        const auto si = x_integral(kappa, t, scaled, false, Coupling::Reflecting,
                                   [](const PathFunctionals& f) { return f.silt; });
        report.push_back(make_item("self-intersection", t, si.value, 0.5 / kappa, si.std_error, 0.1 / kappa));
        const auto sid = x_integral(kappa, t, scaled, false, Coupling::Dirichlet,
                                    [](const PathFunctionals& f) { return f.silt; });
        report.push_back(
            make_item("self-intersection-dirichlet", t, sid.value, 0.5 / kappa, sid.std_error, 0.1 / kappa));
        const auto in = x_integral(kappa, t, scaled, true, Coupling::Reflecting,
                                   [](const PathFunctionals& f) { return f.integral_dev; });
        report.push_back(make_item("integral-remainder", t, in.value, 0.0, in.std_error, t));
        const auto lc = x_integral(kappa, t, scaled, true, Coupling::Reflecting,
                                   [](const PathFunctionals& f) { return f.boundary; });
        report.push_back(make_item("boundary-remainder", t, lc.value, 0.0, lc.std_error, std::sqrt(t)));
        const auto rem = x_integral(kappa, t, scaled, true, Coupling::Reflecting, [](const PathFunctionals& f) {
            const double a = std::abs(f.integral_dev) + f.silt + f.boundary;
            return a * a * std::exp(a);
        });
        report.push_back(make_item("second-order-remainder", t, rem.value, 0.0, rem.std_error, 2.0 * t,
                                   "uses the squared norm inside the square"));
    }
    return report;
}

} // namespace edgelab::bridge
