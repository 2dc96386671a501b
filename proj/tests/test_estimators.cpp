#include "edgelab/ensembles.hpp"
#include "edgelab/estimators.hpp"
#include "edgelab/feynman_kac.hpp"
#include "edgelab/sao_operator.hpp"
#include "edgelab/stats.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

using namespace edgelab;
using namespace edgelab::estimators;

namespace {
const double kInf = sao::kInfinity;
double leading(double t) { return std::sqrt(2.0 / std::numbers::pi) * std::pow(t, -1.5); }
} // namespace

TEST(ExpTrace, DirectEvaluation) {
    EXPECT_DOUBLE_EQ(exp_trace(make_configuration({0.0}), 0.37).value, 1.0);
    EXPECT_DOUBLE_EQ(exp_trace(make_configuration({}), 0.37).value, 0.0);
    EXPECT_NEAR(exp_trace(make_configuration({0.0, 2.0, 4.0}), 1.0).value, 1.0 + std::exp(-1.0) + std::exp(-2.0),
                1e-15);
    EXPECT_NEAR(1.0 + std::exp(-1.0) + std::exp(-2.0), 1.50321, 1e-5);
    EXPECT_THROW(exp_trace(make_configuration({1.0}), 0.0), std::invalid_argument);
}

TEST(ExpTrace, TailBoundAndFlag) {
    const auto c = make_configuration({1.0, 3.0, 5.0});
    const auto tv = exp_trace(c, 1.0, 1e-6);
    EXPECT_NEAR(tv.tail_bound, std::exp(-2.5) * (1.0 + 2.0 / 2.0), 1e-15);
    EXPECT_TRUE(tv.tail_flag);
    EXPECT_FALSE(exp_trace(c, 1.0, 1.0).tail_flag);
}

TEST(ExpTrace, MonotoneInTimeAndPoints) {
    const auto c = make_configuration({0.5, 1.0, 2.0, 7.0});
    const auto more = make_configuration({0.5, 1.0, 2.0, 7.0, 9.0});
    double prev = 1e300;
    for (double t = 0.1; t < 3.0; t += 0.1) {
        const double v = exp_trace(c, t).value;
        EXPECT_LT(v, prev);
        EXPECT_LT(v, exp_trace(more, t).value);
        prev = v;
    }
}

TEST(EstimatorT, SyntheticCurvesAreExact) {
    for (double c : {-1.0, 0.0, 0.25, 0.75}) {
        for (double c1 : {0.05, 0.1, 0.3}) {
            for (double c2 : {0.2, 0.5, 1.0}) {
                for (int m : {1, 2, 5}) {
                    const EstimatorSettings s{c1, c2, m};
                    const auto est = estimator_T_from_trace([&](double t) { return leading(t) + c; }, s);
                    EXPECT_NEAR(est.value, 0.5 + 2.0 * c, 1e-10);
                }
            }
        }
    }
    EXPECT_NEAR(estimator_T_from_trace(leading, {}).value, 0.5, 1e-10);
    EXPECT_NEAR(estimator_T_from_trace([](double t) { return leading(t) + 0.75; }, {}).value, 2.0, 1e-10);
}

TEST(EstimatorT, AffineInConstantOffset) {
    auto base = [](double t) { return leading(t) + std::sin(3.0 * t) + t * t; };
    const EstimatorSettings s{0.1, 0.5, 4};
    const double v0 = estimator_T_from_trace(base, s).value;
    for (double c : {-2.0, 0.1, 3.0})
        EXPECT_NEAR(estimator_T_from_trace([&](double t) { return base(t) + c; }, s).value, v0 + 2.0 * c, 1e-9);
}

TEST(EstimatorT, NoisyCurveWithinCltBound) {
    Rng rng(4);
    const EstimatorSettings s{0.05, 0.5, 10};
    const double nm = static_cast<double>(s.block_end(s.M));
    const auto est = estimator_T_from_trace([&](double t) { return leading(t) + 0.3 + rng.normal(0.0, 0.1); }, s);
    EXPECT_NEAR(est.value, 1.1, 3.0 * 0.2 / std::sqrt(nm));
}

TEST(EstimatorT, BlockDiagnostics) {
    const EstimatorSettings s{0.05, 0.5, 4};
    EXPECT_EQ(s.block_end(1), 1u);
    EXPECT_EQ(s.block_end(4), 8u);
    const EstimatorSettings quad{0.05, 1.0, 4};
    const auto est = estimator_T_from_trace([](double t) { return leading(t) + 1.0 / t; }, quad);
    ASSERT_EQ(est.block_averages.size(), 4u);
    EXPECT_TRUE(est.divergence_flag);
    EXPECT_NEAR(est.last_increment, std::abs(est.block_averages[3] - est.block_averages[2]), 1e-15);
    EXPECT_THROW(estimator_T_from_trace(leading, {0.0, 0.5, 2}), std::invalid_argument);
    EXPECT_THROW(estimator_T_from_trace(leading, {0.1, 0.5, 0}), std::invalid_argument);
    EXPECT_THROW(estimator_T(make_configuration({}), {}), std::invalid_argument);
}

TEST(EstimatorT, SingleTermConfiguration) {
    const EstimatorSettings s{1.0, 1.0, 1};
    const double t1 = std::exp(-1.0);
    const auto est = estimator_T(make_configuration({0.0, 2.0, 4.0}), s);
    const double expected = 0.5 + 2.0 * (1.0 + std::exp(-t1) + std::exp(-2.0 * t1) - leading(t1));
    EXPECT_NEAR(est.value, expected, 1e-12);
    EXPECT_TRUE(est.tail_flag);
}

TEST(EstimatorT, DiscretizedOperatorEnsembleMean) {
    // t_n >= 0.3 for n <= 24; M = 8 gives N_M = 23.
    const EstimatorSettings s{0.05, 0.5, 8};
    ASSERT_GE(s.time(s.block_end(s.M)), 0.3);
    RunningStats values;
    const sao::GridSpec grid{0.05, 60.0};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto op = sao::build_sao({1, 2.0, {kInf}}, grid, derive_seed(77, seed));
        const auto eigs = sao::eigenvalues_below(op, 200.0);
        values.add(estimator_T(sao::spectrum_to_configuration(eigs, eigs.size(), grid), s).value);
    }
    EXPECT_NEAR(values.mean(), 0.5, 0.15);
}

TEST(Rigidity, SyntheticExactConfigurationsRecoverRemovedCount) {
    const EstimatorSettings s{0.05, 0.5, 6};
    for (int r0 : {0, 1}) {
        for (double beta : {1.0, 2.0, 4.0}) {
            const double c = 0.5 * (r0 + 1.0 / beta) - 0.25;
            for (int j = 0; j <= 5; ++j) {
                // Full trace leading(t) + c; j points at the origin lie in B = [-1, 1).
                auto outside = [&](double t) { return leading(t) + c - j; };
                const auto est = rigidity_count_from_trace(outside, r0, beta, s);
                EXPECT_NEAR(est.value, j, 1e-10);
                EXPECT_EQ(est.nearest, j);
                // Removed points spread inside B = [-1, 1): the count is still recovered after rounding.
                auto spread = [&](double t) {
                    double v = leading(t) + c;
                    for (int k = 0; k < j; ++k) v -= std::exp(-0.5 * t * (-0.3 + 0.15 * k));
                    return v;
                };
                EXPECT_EQ(rigidity_count_from_trace(spread, r0, beta, s).nearest, j);
            }
        }
    }
}

TEST(Rigidity, RejectsPointsInsideInterval) {
    const auto cfg = make_configuration({0.5, 3.0});
    EXPECT_THROW(rigidity_count(cfg, {0.0, 1.0}, 0, 2.0, {}), std::invalid_argument);
    EXPECT_THROW(rigidity_count(cfg, {2.0, 1.0}, 0, 2.0, {}), std::invalid_argument);
    EXPECT_NO_THROW(rigidity_count(cfg, {1.0, 2.0}, 0, 2.0, {}));
}

TEST(Energy, DirectEvaluationAndSymmetry) {
    EXPECT_NEAR(hamiltonian_energy({-1.0, 1.0}), 0.5 - 0.5 * std::log(2.0), 1e-15);
    EXPECT_NEAR(hamiltonian_energy({-1.0, 1.0}), 0.15343, 1e-5);
    EXPECT_DOUBLE_EQ(hamiltonian_energy({0.0}), 0.0);
    EXPECT_NEAR(hamiltonian_energy({0.3, -1.2, 2.0, 0.9}), hamiltonian_energy({2.0, 0.9, -1.2, 0.3}), 1e-14);
    EXPECT_THROW(hamiltonian_energy({1.0, 1.0}), std::invalid_argument);
}

TEST(Energy, FBetaValuesAndMonotonicity) {
    EXPECT_NEAR(F_beta(2.0), -2.0 * (1.0 - 0.57721566490153286), 1e-12);
    EXPECT_NEAR(F_beta(2.0), -0.8455686702, 1e-9);
    double prev = -1e300;
    for (int i = 0; i <= 1000; ++i) {
        const double b = 0.01 * std::pow(1e4, i / 1000.0);
        const double f = F_beta(b);
        EXPECT_GT(f, prev);
        prev = f;
        double tail = 0.0;
        for (int k = 0; k < 100000; ++k) tail += 1.0 / ((k + 1.0 + b / 2.0) * (k + 1.0 + b / 2.0));
        EXPECT_GT(2.0 / b - tail, 0.0);
        if (i % 100 == 0) {
            const double fd = (F_beta(b * (1 + 1e-6)) - F_beta(b * (1 - 1e-6))) / (2e-6 * b);
            EXPECT_NEAR(F_beta_derivative(b), fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
    EXPECT_THROW(F_beta(0.0), std::invalid_argument);
}

TEST(Energy, BetaFromEnergyRoundTrip) {
    for (std::size_t n : {2u, 10u, 1000u})
        for (double b : {0.05, 0.7, 1.0, 2.0, 4.0, 37.0, 500.0})
            EXPECT_NEAR(beta_from_energy(energy_limit(b, n), n), b, 1e-8 * b);
    EXPECT_THROW(beta_from_energy(1e9, 100), std::range_error);
    EXPECT_THROW(beta_from_energy(0.0, 1), std::invalid_argument);
}

TEST(PartitionFunction, OneDimensionalGaussianNormalization) {
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        const double quad = oracle::simpson([&](double x) { return std::exp(-beta * x * x / 4.0); }, -40.0, 40.0, 8000);
        EXPECT_NEAR(log_Z_gbe(1, beta), std::log(quad), 1e-10);
        EXPECT_NEAR(log_Z_gbe(1, beta), 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(beta / 2.0), 1e-12);
    }
}

TEST(PartitionFunction, TwoDimensionalQuadrature) {
    // Ordered-free integral over R^2 of |x - y|^beta exp(-beta n (x^2 + y^2) / 4) with n = 2.
    const double beta = 2.0;
    const double inner = oracle::simpson(
        [&](double x) {
            return oracle::simpson(
                [&](double y) { return std::pow(std::abs(x - y), beta) * std::exp(-beta * (x * x + y * y) / 2.0); },
                -10.0, 10.0, 800);
        },
        -10.0, 10.0, 800);
    EXPECT_NEAR(log_Z_gbe(2, beta), std::log(inner), 1e-6);
}

TEST(PartitionFunction, DerivativeMatchesEnergyLimit) {
    const std::size_t n = 2000;
    const double d = 1e-3;
    const double deriv = -(log_Z_gbe(n, 2.0 + d) - log_Z_gbe(n, 2.0 - d)) / (2.0 * d) / n;
    EXPECT_NEAR(deriv, energy_limit(2.0, n), 1e-2);
}

TEST(PartitionFunction, MonteCarloEnergyMeanAndVariance) {
    const std::size_t n = 200;
    const double beta = 2.0, d = 1e-3;
    RunningStats h;
    for (std::uint64_t s = 0; s < 400; ++s)
        h.add(hamiltonian_energy(ensembles::sample_beta_hermite({n, beta}, derive_seed(3, s)).eigenvalues));
    const double mean = -(log_Z_gbe(n, beta + d) - log_Z_gbe(n, beta - d)) / (2.0 * d) / n;
    const double var = (log_Z_gbe(n, beta + d) - 2.0 * log_Z_gbe(n, beta) + log_Z_gbe(n, beta - d)) / (d * d) /
                       (static_cast<double>(n) * n);
    EXPECT_NEAR(h.mean(), mean, 2.0 * h.stderr_of_mean());
    // Sample variance of 400 draws has relative standard error about sqrt(2/399).
    EXPECT_NEAR(h.variance(), var, 2.0 * std::sqrt(2.0 / 399.0) * var);
}

TEST(TraceConstant, CanonicalReduction) {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const int r = 1 + static_cast<int>(rng.index(5));
        const double beta = std::array<double, 3>{1.0, 2.0, 4.0}[rng.index(3)];
        const int r0 = static_cast<int>(rng.index(static_cast<std::size_t>(r + 1)));
        sao::SaoParams th{r, beta, std::vector<double>(static_cast<std::size_t>(r), kInf)};
        for (int k = 0; k < r0; ++k) th.w[static_cast<std::size_t>(k)] = rng.normal();
        EXPECT_NEAR(trace_constant_formula(th, sao::GeneralizedParams::canonical(th)), 0.5 * (r0 + 1.0 / beta) - 0.25,
                    1e-14);
    }
}

TEST(TraceConstant, Examples) {
    EXPECT_NEAR(trace_constant_formula({1, 2.0, {kInf}}, {1.0, 1.0, 0.37}), 0.0, 1e-15);
    // With kappa = r upsilon^2 the constant depends on r only through r0.
    for (int r : {1, 2, 3, 5}) {
        const double u2 = 0.3, s2 = 0.8;
        const sao::GeneralizedParams eta{r * u2, std::sqrt(s2), std::sqrt(u2)};
        sao::SaoParams th{r, 2.0, std::vector<double>(static_cast<std::size_t>(r), kInf)};
        th.w[0] = 0.0;
        EXPECT_NEAR(trace_constant_formula(th, eta), 0.25 * (2.0 * 1 - 1.0 + s2 / u2), 1e-12);
    }
    EXPECT_NEAR(trace_leading_coefficient({1, 2.0, {kInf}}, {0.5, 1.0, 1.0}), 2.0 / std::sqrt(2.0 * std::numbers::pi),
                1e-15);
}

TEST(TraceFit, NoiselessCurveIsRecoveredExactly) {
    const std::vector<double> tg{0.3, 0.4, 0.55, 0.7, 0.85, 1.0};
    std::vector<std::vector<double>> curves(5, std::vector<double>(tg.size()));
    for (std::size_t r = 0; r < curves.size(); ++r)
        for (std::size_t k = 0; k < tg.size(); ++k) curves[r][k] = 0.7979 * std::pow(tg[k], -1.5) + 0.25;
    fk::FitOptions o;
    o.corrections = {};
    const auto f = fk::fit_trace_curve(curves, tg, o, 1);
    EXPECT_NEAR(f.leading, 0.7979, 1e-10);
    EXPECT_NEAR(f.constant, 0.25, 1e-10);
    EXPECT_FALSE(f.ill_conditioned);
    EXPECT_NEAR(f.constant_ci.lower, 0.25, 1e-10);
    EXPECT_NEAR(f.constant_ci.upper, 0.25, 1e-10);
}

TEST(TraceFit, DefaultBasisAddsHalfPowerOnlyForNonzeroRobin) {
    EXPECT_EQ(fk::default_fit_options({1, 2.0, {kInf}}).corrections, std::vector<double>{1.5});
    EXPECT_EQ(fk::default_fit_options({1, 2.0, {0.0}}).corrections, std::vector<double>{1.5});
    EXPECT_EQ(fk::default_fit_options({1, 2.0, {0.5}}).corrections, (std::vector<double>{0.5, 1.5}));
}

TEST(TraceFit, IllConditionedFitIsFlagged) {
    const std::vector<double> tg{0.5, 0.5001, 0.5002, 0.5003};
    std::vector<std::vector<double>> curves(3, std::vector<double>(tg.size(), 1.0));
    curves[1][2] = 1.1;
    fk::FitOptions o;
    o.bootstrap = 10;
    EXPECT_TRUE(fk::fit_trace_curve(curves, tg, o, 1).ill_conditioned);
    EXPECT_THROW(fk::fit_trace_curve(curves, {0.5, 0.6}, o, 1), std::invalid_argument);
}

TEST(TraceCovariance, DiagonalIsVarianceAndIndependentSeedsDecorrelate) {
    Rng rng(2);
    std::vector<std::vector<double>> curves(2000, std::vector<double>(3));
    for (auto& c : curves) {
        const double z = rng.normal();
        c = {z + 0.1 * rng.normal(), rng.normal(), z};
    }
    const auto rep = fk::covariance_from_curves(curves, {0.25, 0.5, 1.0}, 50, 3);
    ASSERT_EQ(rep.pairs.size(), 6u);
    for (const auto& p : rep.pairs) {
        if (p.s == p.t) {
            EXPECT_GT(p.covariance, 0.0);
            EXPECT_DOUBLE_EQ(p.normalized, p.covariance);
        }
        if (p.s == 0.5 && p.t != 0.5) {
            EXPECT_NEAR(p.covariance, 0.0, 4.0 / std::sqrt(2000.0));
        }
    }
}

TEST(TraceCovariance, OperatorNormalizedCovarianceStaysBoundedAsRatioShrinks) {
    const sao::SaoParams th{1, 2.0, {std::numeric_limits<double>::infinity()}};
    const auto rep = fk::trace_covariance_check(th, sao::GeneralizedParams::canonical(th), sao::GridSpec{0.05, 40.0},
                                                {0.25, 0.5, 1.0}, 200, 41, 0);
    double at_half = 0.0;
    double at_quarter = 0.0;
    for (const auto& p : rep.pairs) {
        if (p.ratio == 0.5) at_half = std::max(at_half, p.normalized);
        if (p.ratio == 0.25) at_quarter = p.normalized;
    }
    ASSERT_GT(at_half, 0.0);
    EXPECT_GT(at_quarter, 0.0);
    EXPECT_LT(at_quarter, 3.0 * at_half);
}
