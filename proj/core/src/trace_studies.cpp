#include "edgelab/feynman_kac.hpp"

#include "edgelab/estimators.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgelab::fk {

namespace {

void check_grid(const std::vector<double>& t_grid, std::size_t min_points) {
    if (t_grid.size() < min_points) throw std::invalid_argument("trace study: t grid has too few points");
    for (double t : t_grid)
        if (!(t > 0.0)) throw std::invalid_argument("trace study: t values must be positive");
}

std::vector<double> traces_of(const std::vector<double>& eigs, const std::vector<double>& t_grid) {
    std::vector<double> out(t_grid.size(), 0.0);
    for (std::size_t k = 0; k < t_grid.size(); ++k)
        for (double e : eigs) out[k] += std::exp(-t_grid[k] * e);
    return out;
}

std::vector<double> design_row(double t, const FitOptions& o) {
    std::vector<double> row;
    if (o.include_leading) row.push_back(std::pow(t, -1.5));
    row.push_back(1.0);
    for (double p : o.corrections) row.push_back(std::pow(t, p));
    return row;
}

struct Coefficients {
    double leading = 0.0;
    double constant = 0.0;
    std::vector<double> corrections;
};

Coefficients solve(const std::vector<double>& t_grid, const std::vector<double>& y, const FitOptions& o) {
    std::vector<double> design;
    std::size_t cols = 0;
    for (double t : t_grid) {
        const auto row = design_row(t, o);
        cols = row.size();
        design.insert(design.end(), row.begin(), row.end());
    }
    const auto fit = least_squares(design, t_grid.size(), cols, y);
    Coefficients c;
    std::size_t k = 0;
    if (o.include_leading) c.leading = fit.coefficients[k++];
    c.constant = fit.coefficients[k++];
    for (; k < fit.coefficients.size(); ++k) c.corrections.push_back(fit.coefficients[k]);
    return c;
}

std::vector<double> column_means(const std::vector<std::vector<double>>& curves, const std::vector<std::size_t>& rows,
                                 std::size_t width) {
    std::vector<double> m(width, 0.0);
    for (std::size_t r : rows)
        for (std::size_t k = 0; k < width; ++k) m[k] += curves[r][k];
    for (double& v : m) v /= static_cast<double>(rows.size());
    return m;
}

Interval95 percentile_interval(std::vector<double> xs) {
    if (xs.empty()) return {};
    return {quantile(xs, 0.025), quantile(xs, 0.975)};
}

} // namespace

std::vector<std::vector<double>> trace_replicas(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                                                const sao::GridSpec& grid, const std::vector<double>& t_grid,
                                                std::size_t replicas, std::uint64_t seed, unsigned threads) {
    check_grid(t_grid, 1);
    theta.validate();
    eta.validate();
    grid.validate();
    const double t_min = *std::min_element(t_grid.begin(), t_grid.end());
    const double cutoff = 40.0 / t_min;
    return parallel_map<std::vector<double>>(
        replicas,
        [&](std::size_t rep) {
            const auto op = sao::build_generalized(theta, eta, grid, derive_seed(seed, rep));
            return traces_of(sao::eigenvalues_below(op, cutoff), t_grid);
        },
        threads);
}

bridge::Estimate mean_trace(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                            const sao::GridSpec& grid, double t, std::size_t replicas, std::uint64_t seed,
                            unsigned threads) {
    const auto curves = trace_replicas(theta, eta, grid, {t}, replicas, seed, threads);
    std::vector<double> v;
    v.reserve(curves.size());
    for (const auto& c : curves) v.push_back(c[0]);
    const auto m = estimate_mean(v);
    return {m.mean, m.std_error};
}

FitOptions default_fit_options(const sao::SaoParams& theta) {
    FitOptions o;
    for (double w : theta.w)
        if (std::isfinite(w) && w != 0.0) {
            o.corrections = {0.5, 1.5};
            break;
        }
    return o;
}

FitResult fit_trace_curve(const std::vector<std::vector<double>>& curves, const std::vector<double>& t_grid,
                          const FitOptions& options, std::uint64_t seed) {
    const std::size_t cols = (options.include_leading ? 2 : 1) + options.corrections.size();
    check_grid(t_grid, cols);
    if (curves.size() < 2) throw std::invalid_argument("fit_trace_curve: need at least two replicas");
    for (const auto& c : curves)
        if (c.size() != t_grid.size()) throw std::invalid_argument("fit_trace_curve: curve length mismatch");

    FitResult out;
    out.t_grid = t_grid;
    const std::size_t n = curves.size();
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = curves[r][k];
        const auto m = estimate_mean(col);
        out.means.push_back(m.mean);
        out.std_errors.push_back(m.std_error);
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(t_grid.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const auto row = design_row(t_grid[k], options);
        for (std::size_t j = 0; j < cols; ++j)
            x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[j];
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
    const double condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                      : std::numeric_limits<double>::infinity();
    out.ill_conditioned = !(condition <= options.condition_limit);

    const auto c = solve(t_grid, out.means, options);
    out.leading = c.leading;
    out.constant = c.constant;
    out.corrections = c.corrections;

    Rng rng(seed);
    std::vector<double> leads, consts;
    std::vector<std::size_t> rows(n);
    for (std::size_t b = 0; b < options.bootstrap; ++b) {
        for (auto& r : rows) r = rng.index(n);
        const auto cb = solve(t_grid, column_means(curves, rows, t_grid.size()), options);
        leads.push_back(cb.leading);
        consts.push_back(cb.constant);
    }
    out.leading_ci = percentile_interval(leads);
    out.constant_ci = percentile_interval(consts);
    return out;
}

FitResult trace_constant_fit(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                             const sao::GridSpec& grid, const std::vector<double>& t_grid, std::size_t replicas,
                             std::uint64_t seed, const FitOptions& options, unsigned threads) {
    const auto curves = trace_replicas(theta, eta, grid, t_grid, replicas, seed, threads);
    return fit_trace_curve(curves, t_grid, options, derive_seed(seed, 0xB007));
}

FitResult trace_delta_fit(const sao::SaoParams& first, const sao::GeneralizedParams& eta_first,
                          const sao::SaoParams& second, const sao::GeneralizedParams& eta_second,
                          const sao::GridSpec& grid, const std::vector<double>& t_grid, std::size_t replicas,
                          std::uint64_t seed, const FitOptions& options, unsigned threads) {
    if (first.r != second.r) throw std::invalid_argument("trace_delta_fit: dimensions must match for paired noise");
    const auto a = trace_replicas(first, eta_first, grid, t_grid, replicas, seed, threads);
    const auto b = trace_replicas(second, eta_second, grid, t_grid, replicas, seed, threads);
    std::vector<std::vector<double>> diff(a.size(), std::vector<double>(t_grid.size()));
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t k = 0; k < t_grid.size(); ++k) diff[r][k] = a[r][k] - b[r][k];
    FitOptions o = options;
    const double lead_gap = estimators::trace_leading_coefficient(first, eta_first) -
                            estimators::trace_leading_coefficient(second, eta_second);
    if (std::abs(lead_gap) < 1e-12) o.include_leading = false;
    return fit_trace_curve(diff, t_grid, o, derive_seed(seed, 0xB007));
}

namespace {

struct CovarianceSummary {
    std::vector<CovariancePair> pairs;
    double slope = 0.0;
};

CovarianceSummary summarize(const std::vector<std::vector<double>>& curves, const std::vector<std::size_t>& rows,
                            const std::vector<double>& t_grid) {
    const std::size_t m = t_grid.size();
    std::vector<std::vector<double>> cols(m, std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < m; ++k) cols[k][i] = curves[rows[i]][k];
    CovarianceSummary s;
    std::vector<double> design, y;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            CovariancePair p;
            p.s = t_grid[a];
            p.t = t_grid[b];
            p.covariance = sample_covariance(cols[a], cols[b]);
            p.ratio = std::min(p.s, p.t) / std::max(p.s, p.t);
            p.normalized = p.covariance / std::pow(p.ratio, 0.25);
            s.pairs.push_back(p);
            design.push_back(1.0);
            design.push_back(-std::log(p.ratio));
            y.push_back(p.normalized);
        }
    s.slope = least_squares(design, y.size(), 2, y).coefficients[1];
    return s;
}

} // namespace

CovarianceReport covariance_from_curves(const std::vector<std::vector<double>>& curves,
                                        const std::vector<double>& t_grid, std::size_t bootstrap,
                                        std::uint64_t seed) {
    check_grid(t_grid, 2);
    if (curves.size() < 3) throw std::invalid_argument("covariance_from_curves: need at least three replicas");
    std::vector<std::size_t> rows(curves.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const auto base = summarize(curves, rows, t_grid);
    CovarianceReport out;
    out.pairs = base.pairs;
    out.slope = base.slope;
    for (const auto& p : out.pairs) out.max_normalized = std::max(out.max_normalized, p.normalized);
    Rng rng(seed);
    std::vector<double> slopes;
    for (std::size_t b = 0; b < bootstrap; ++b) {
        for (auto& r : rows) r = rng.index(curves.size());
        slopes.push_back(summarize(curves, rows, t_grid).slope);
    }
    out.slope_ci = slopes.empty() ? Interval95{out.slope, out.slope} : percentile_interval(slopes);
    out.bounded = out.slope_ci.lower <= 0.0;
    return out;
}

CovarianceReport trace_covariance_check(const sao::SaoParams& theta, const sao::GeneralizedParams& eta,
                                        const sao::GridSpec& grid, const std::vector<double>& t_grid,
                                        std::size_t replicas, std::uint64_t seed, unsigned threads) {
    const auto curves = trace_replicas(theta, eta, grid, t_grid, replicas, seed, threads);
    return covariance_from_curves(curves, t_grid, 500, derive_seed(seed, 0xC0F));
}

} // namespace edgelab::fk
