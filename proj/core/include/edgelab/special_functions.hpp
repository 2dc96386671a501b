#pragma once

namespace edgelab {

/// Digamma function psi(x) for x > 0.
double digamma(double x);

/// Trigamma function psi'(x) for x > 0.
double trigamma(double x);

/// Scaled complementary error function exp(x^2) erfc(x), stable for large x.
double erfcx(double x);

/// Density of standard Brownian motion at time t from a to b.
double heat_kernel(double t, double a, double b);

} // namespace edgelab
