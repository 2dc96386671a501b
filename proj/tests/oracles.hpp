#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Value at x_end of the solution of f'' = 2 (kappa x - lambda) f started from (f, f') at 0, by RK4.
inline double shoot(double lambda, double kappa, double f0, double df0, double x_end = 14.0, int steps = 14000) {
    const double h = x_end / steps;
    double x = 0.0, f = f0, g = df0;
    auto acc = [&](double xx, double ff) { return 2.0 * (kappa * xx - lambda) * ff; };
    for (int i = 0; i < steps; ++i) {
        const double k1f = g, k1g = acc(x, f);
        const double k2f = g + 0.5 * h * k1g, k2g = acc(x + 0.5 * h, f + 0.5 * h * k1f);
        const double k3f = g + 0.5 * h * k2g, k3g = acc(x + 0.5 * h, f + 0.5 * h * k2f);
        const double k4f = g + h * k3g, k4g = acc(x + h, f + h * k3f);
        f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
        x += h;
    }
    return f;
}

/// Eigenvalues of -1/2 f'' + kappa x f on the half-line below lambda_max, found as sign changes of the
/// shooting endpoint refined by bisection. w = infinity means f(0) = 0, otherwise f'(0) = w f(0).
inline std::vector<double> airy_levels(double kappa, double w, double lambda_max, double scan = 1e-3) {
    const bool dirichlet = std::isinf(w);
    auto end = [&](double lam) { return dirichlet ? shoot(lam, kappa, 0.0, 1.0) : shoot(lam, kappa, 1.0, w); };
    std::vector<double> out;
    double lo = -3.0, flo = end(lo);
    for (double hi = lo + scan; hi <= lambda_max; hi += scan) {
        const double fhi = end(hi);
        if ((flo < 0) != (fhi < 0)) {
            double a = hi - scan, b = hi, fa = flo;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b), fm = end(m);
                if ((fa < 0) != (fm < 0)) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        flo = fhi;
    }
    return out;
}

/// CDF of the semicircle law on [-2, 2].
inline double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + (x * std::sqrt(4.0 - x * x) / 4.0 + std::asin(x / 2.0)) / std::numbers::pi;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace oracle
