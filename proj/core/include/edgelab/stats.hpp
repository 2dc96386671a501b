#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace edgelab {

/// Streaming mean and variance (Welford).
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; zero for fewer than two samples.
    double variance() const;
    double stderr_of_mean() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

MeanEstimate estimate_mean(std::span<const double> xs);

double sample_covariance(std::span<const double> xs, std::span<const double> ys);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous or atom-bearing cdf.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double rss = 0.0;
};

/// Ordinary least squares y ~ X beta. X is row-major rows x cols.
LinearFit least_squares(std::span<const double> design, std::size_t rows, std::size_t cols,
                        std::span<const double> y);

/// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> xs, double q);

} // namespace edgelab
