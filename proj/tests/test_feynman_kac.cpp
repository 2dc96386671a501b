#include "edgelab/bridge.hpp"
#include "edgelab/feynman_kac.hpp"
#include "edgelab/stats.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>

using namespace edgelab;
using namespace edgelab::fk;

namespace {

const double kInf = sao::kInfinity;

using Jumps = std::vector<std::pair<int, int>>;

/// Unit-variance quaternion entry q in its 2x2 complex representation [[a, b], [-conj b, conj a]], written as
/// coefficients of (a, conj a, b, conj b). E[a conj a] = E[b conj b] = 1/2 and all other second moments vanish.
using Coeffs = std::array<std::complex<double>, 4>;
using QMatrix = std::array<std::array<Coeffs, 2>, 2>;

QMatrix quaternion_entry() {
    QMatrix q{};
    q[0][0] = {1, 0, 0, 0};
    q[0][1] = {0, 0, 1, 0};
    q[1][0] = {0, 0, 0, -1};
    q[1][1] = {0, 1, 0, 0};
    return q;
}

/// Adjoint: (Q^dagger)_{mn} = conj(Q_{nm}); conjugation swaps a with conj a and b with conj b.
QMatrix adjoint(const QMatrix& q) {
    QMatrix out{};
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
            const auto& c = q[n][m];
            out[m][n] = {std::conj(c[1]), std::conj(c[0]), std::conj(c[3]), std::conj(c[2])};
        }
    return out;
}

std::complex<double> pair_moment(const Coeffs& x, const Coeffs& y) {
    return 0.5 * (x[0] * y[1] + x[1] * y[0] + x[2] * y[3] + x[3] * y[2]);
}

/// Normalized trace expectation (1/2) E tr prod_k Q_k with the given pairing, where the second member of a pair
/// equals the first for equal jumps and its adjoint for reversed jumps.
double quaternion_constant(const Matching& p, const Jumps& jumps) {
    const int n = p.n;
    const auto q = quaternion_entry();
    const auto qa = adjoint(q);
    std::complex<double> total = 0.0;
    for (unsigned long bits = 0; bits < (1ul << n); ++bits) {
        std::vector<int> m(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k)] = static_cast<int>((bits >> k) & 1ul);
        m[static_cast<std::size_t>(n)] = m[0];
        std::complex<double> prod = 1.0;
        for (const auto& [a, b] : p.pairs) {
            const auto ja = jumps[static_cast<std::size_t>(a)], jb = jumps[static_cast<std::size_t>(b)];
            const bool equal = ja == jb;
            const bool reverse = ja.first == jb.second && ja.second == jb.first;
            if (!equal && !reverse) return 0.0;
            const auto& second = equal ? q : qa;
            prod *= pair_moment(q[m[a]][m[a + 1]], second[m[b]][m[b + 1]]);
        }
        total += prod;
    }
    return 0.5 * total.real();
}

/// Closed jump sequence i -> ... -> i visiting the given states.
Jumps cycle(const std::vector<int>& states) {
    Jumps out;
    for (std::size_t k = 0; k + 1 < states.size(); ++k) out.emplace_back(states[k], states[k + 1]);
    return out;
}

/// Magnitudes of the Airy zeros from the asymptotic expansion.
double airy_zero(int k) {
    const double z = 3.0 * std::numbers::pi * (4.0 * k - 1.0) / 8.0;
    const double z2 = 1.0 / (z * z);
    return std::pow(z, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 * z2 - 5.0 / 36.0 * z2 * z2 + 77125.0 / 82944.0 * z2 * z2 * z2);
}

} // namespace

TEST(Matchings, CountsAndCanonicalEnumeration) {
    EXPECT_EQ(double_factorial_count(0), 1);
    EXPECT_EQ(double_factorial_count(2), 1);
    EXPECT_EQ(double_factorial_count(4), 3);
    EXPECT_EQ(double_factorial_count(6), 15);
    EXPECT_EQ(double_factorial_count(12), 10395);
    EXPECT_THROW(double_factorial_count(3), std::invalid_argument);
    for (int n = 0; n <= 10; n += 2) {
        const auto all = enumerate_matchings(n);
        ASSERT_EQ(static_cast<long>(all.size()), double_factorial_count(n));
        std::set<std::vector<std::pair<int, int>>> distinct;
        for (const auto& m : all) {
            EXPECT_TRUE(m.valid());
            for (const auto& [a, b] : m.pairs) {
                EXPECT_LT(a, b);
                EXPECT_EQ(m.partner(a), b);
                EXPECT_EQ(m.partner(b), a);
            }
            distinct.insert(m.pairs);
        }
        EXPECT_EQ(distinct.size(), all.size());
    }
    const auto four = enumerate_matchings(4);
    EXPECT_EQ(four[0].pairs, (Jumps{{0, 1}, {2, 3}}));
    EXPECT_EQ(four[1].pairs, (Jumps{{0, 2}, {1, 3}}));
    EXPECT_EQ(four[2].pairs, (Jumps{{0, 3}, {1, 2}}));
    EXPECT_THROW(enumerate_matchings(14), std::invalid_argument);
}

TEST(Matchings, ValidityChecks) {
    EXPECT_TRUE((Matching{0, {}}).valid());
    EXPECT_FALSE((Matching{2, {{0, 0}}}).valid());
    EXPECT_FALSE((Matching{4, {{0, 1}, {1, 2}}}).valid());
    EXPECT_FALSE((Matching{4, {{0, 1}}}).valid());
    EXPECT_FALSE((Matching{3, {{0, 1}}}).valid());
    EXPECT_THROW((Matching{2, {{0, 1}}}).partner(5), std::out_of_range);
}

TEST(Matchings, UniformSamplerChiSquare) {
    const auto all = enumerate_matchings(6);
    std::map<std::vector<std::pair<int, int>>, int> counts;
    Rng rng(21);
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        auto m = sample_uniform_matching(6, rng);
        ASSERT_TRUE(m.valid());
        for (auto& [a, b] : m.pairs)
            if (a > b) std::swap(a, b);
        std::sort(m.pairs.begin(), m.pairs.end());
        ++counts[m.pairs];
    }
    ASSERT_EQ(counts.size(), all.size());
    const double expected = static_cast<double>(n) / 15.0;
    double chi2 = 0.0;
    for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 99.9% quantile of chi-square with 14 degrees of freedom.
    EXPECT_LT(chi2, 36.12);
}

TEST(JumpCount, EvenWithPoissonMean) {
    Rng rng(3);
    RunningStats counts;
    for (int i = 0; i < 50000; ++i) {
        const unsigned c = sample_jump_count(0.8, 3, rng);
        ASSERT_EQ(c % 2, 0u);
        counts.add(c);
    }
    // 2 Poisson(lambda) with lambda = (r-1)^2 ||L||^2 / 2 = 1.6.
    EXPECT_NEAR(counts.mean(), 3.2, 4.0 * counts.stderr_of_mean());
    EXPECT_NEAR(counts.variance(), 4.0 * 1.6, 0.15);
    EXPECT_EQ(sample_jump_count(5.0, 1, rng), 0u);
    EXPECT_THROW(sample_jump_count(-1.0, 2, rng), std::invalid_argument);
}

TEST(SelfIntersectionTimes, CellLawFollowsInnerProducts) {
    const auto path = bridge::sample_bridge(0.0, 0.3, 1.0, 256, 14);
    const auto field = bridge::local_time_field(path, 0.05, 4);
    Rng rng(15);
    const Matching q{2, {{0, 1}}};
    std::array<std::array<int, 4>, 4> counts{};
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto t = sample_si_times(field, q, rng);
        ASSERT_EQ(t.size(), 2u);
        const auto a = static_cast<std::size_t>(std::min(3.0, std::floor(t[0] * 4.0)));
        const auto b = static_cast<std::size_t>(std::min(3.0, std::floor(t[1] * 4.0)));
        ++counts[a][b];
    }
    double total = 0.0;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) total += std::max(0.0, field.inner(a, b));
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            const double p = std::max(0.0, field.inner(a, b)) / total;
            EXPECT_NEAR(static_cast<double>(counts[a][b]) / n, p, 4.0 * std::sqrt(p * (1 - p) / n) + 1e-4);
        }
    EXPECT_THROW(sample_si_times(field, Matching{2, {{0, 0}}}, rng), std::invalid_argument);
}

TEST(JumpPaths, StructureAndTransportedMatching) {
    Rng rng(16);
    const std::vector<double> times{0.7, 0.1, 0.4, 0.9};
    const Matching q{4, {{0, 2}, {1, 3}}};
    const auto js = build_jump_path(1, times, q, 3, 1.0, rng);
    EXPECT_EQ(js.path.times, (std::vector<double>{0.1, 0.4, 0.7, 0.9}));
    ASSERT_EQ(js.path.states.size(), 5u);
    EXPECT_EQ(js.path.states[0], 1);
    for (std::size_t k = 1; k < js.path.states.size(); ++k) {
        EXPECT_NE(js.path.states[k], js.path.states[k - 1]);
        EXPECT_GE(js.path.states[k], 0);
        EXPECT_LT(js.path.states[k], 3);
    }
    // Original positions 0 (t=0.7) and 2 (t=0.4) become ranks 2 and 1; positions 1 (0.1) and 3 (0.9) become 0 and 3.
    EXPECT_EQ(js.sorted_matching.pairs, (Jumps{{0, 3}, {1, 2}}));
    EXPECT_EQ(js.path.state_at(0.05), 1);
    EXPECT_EQ(js.path.state_at(0.5), js.path.states[2]);
    EXPECT_EQ(js.path.state_at(0.95), js.path.final_state());
    EXPECT_EQ(js.path.jump_pairs().size(), 4u);
    EXPECT_THROW(build_jump_path(0, {0.5}, Matching{2, {{0, 1}}}, 2, 1.0, rng), std::invalid_argument);
    EXPECT_THROW(build_jump_path(3, {}, Matching{}, 3, 1.0, rng), std::invalid_argument);
}

TEST(JumpPaths, TwoStateWalkAlternates) {
    Rng rng(17);
    const auto js = build_jump_path(0, {0.2, 0.3, 0.6, 0.8}, Matching{4, {{0, 1}, {2, 3}}}, 2, 1.0, rng);
    EXPECT_EQ(js.path.states, (std::vector<int>{0, 1, 0, 1, 0}));
}

TEST(LocalTimesByState, PiecesAddUpToTotals) {
    Rng rng(18);
    const auto path = bridge::sample_reflected_bridge(0.2, 0.6, 512, rng);
    const auto js = build_jump_path(0, {0.05, 0.21, 0.33, 0.5}, Matching{4, {{0, 3}, {1, 2}}}, 3, 0.6, rng);
    const double delta = 0.04;
    const auto lt = combined_local_times(js.path, path, delta, 3);
    ASSERT_EQ(lt.bulk.size(), 3u);
    double boundary = 0.0;
    for (std::size_t b = 0; b < lt.total_bulk.size(); ++b) {
        double s = 0.0;
        for (const auto& row : lt.bulk) s += row[b];
        EXPECT_NEAR(s, lt.total_bulk[b], 1e-12);
    }
    for (double v : lt.boundary) boundary += v;
    EXPECT_NEAR(boundary, lt.total_boundary, 1e-12);
    EXPECT_NEAR(lt.total_boundary, bridge::expected_local_time(path, 0.0), 1e-12);
    double mass = 0.0;
    for (double v : lt.bulk[static_cast<std::size_t>(js.path.states[0])]) mass += v * delta;
    EXPECT_GE(mass, 0.05 - 1e-12);

    const JumpPath still{0, 0.6, {}, {0}};
    const auto one = combined_local_times(still, path, delta, 3);
    EXPECT_EQ(one.bulk[0], one.total_bulk);
    EXPECT_EQ(one.boundary[1], 0.0);
    const JumpPath wrong{0, 0.5, {}, {0}};
    EXPECT_THROW(combined_local_times(wrong, path, delta, 3), std::invalid_argument);
}

TEST(LocalTimesByState, BoundaryWeightReducesToSingleState) {
    Rng rng(19);
    const auto path = bridge::sample_reflected_bridge(0.1, 0.5, 512, rng);
    const JumpPath still{1, 0.5, {}, {1}};
    EXPECT_NEAR(boundary_weight(still, path, {kInf, 0.7}), bridge::expected_boundary_weight(path, 0.7), 1e-14);
    const JumpPath moving{0, 0.5, {0.1, 0.3}, {0, 1, 0}};
    EXPECT_NEAR(boundary_weight(moving, path, {0.7, 0.7}), bridge::expected_boundary_weight(path, 0.7), 1e-12);
    const double mixed = boundary_weight(moving, path, {0.0, 2.0});
    EXPECT_GE(mixed, bridge::expected_boundary_weight(path, 2.0) - 1e-14);
    EXPECT_LE(mixed, 1.0);
    if (bridge::hit_probability(path, 0.0) > 0.999) {
        EXPECT_LT(boundary_weight(moving, path, {kInf, kInf}), 1e-3);
    }
}

TEST(CombinatorialConstant, OrthogonalAndUnitary) {
    const Matching pair{2, {{0, 1}}};
    const auto back = cycle({0, 1, 0});
    EXPECT_EQ(combinatorial_constant(pair, back, ensembles::Field::Real), 1.0);
    EXPECT_EQ(combinatorial_constant(pair, back, ensembles::Field::Complex), 1.0);
    const Jumps same{{0, 1}, {0, 1}};
    EXPECT_EQ(combinatorial_constant(pair, same, ensembles::Field::Real), 1.0);
    EXPECT_EQ(combinatorial_constant(pair, same, ensembles::Field::Complex), 0.0);
    const auto tri = cycle({0, 1, 2, 0});
    const Matching none{0, {}};
    EXPECT_EQ(combinatorial_constant(none, {}, ensembles::Field::Quaternion), 1.0);
    EXPECT_THROW(combinatorial_constant(pair, tri, ensembles::Field::Real), std::invalid_argument);
    // Pairs must share an edge of the walk.
    const auto square = cycle({0, 1, 2, 1, 0});
    EXPECT_EQ(combinatorial_constant(Matching{4, {{0, 3}, {1, 2}}}, square, ensembles::Field::Complex), 1.0);
    EXPECT_EQ(combinatorial_constant(Matching{4, {{0, 1}, {2, 3}}}, square, ensembles::Field::Complex), 0.0);
}

TEST(CombinatorialConstant, QuaternionMatchesMatrixRepresentation) {
    const std::vector<std::vector<int>> walks{{0, 1, 0},          {0, 1, 0, 1, 0},    {0, 1, 2, 1, 0},
                                              {0, 1, 0, 1, 0, 1, 0}, {0, 2, 1, 2, 0, 1, 0}, {1, 0, 1, 2, 1, 0, 1},
                                              {0, 1, 0, 1, 0, 1, 0, 1, 0}};
    int nonzero = 0;
    for (const auto& w : walks) {
        const auto jumps = cycle(w);
        for (const auto& m : enumerate_matchings(static_cast<int>(jumps.size()))) {
            const double expected = quaternion_constant(m, jumps);
            EXPECT_NEAR(combinatorial_constant(m, jumps, ensembles::Field::Quaternion), expected, 1e-12);
            if (expected != 0.0) ++nonzero;
        }
    }
    EXPECT_GT(nonzero, 10);
}

TEST(CombinatorialConstant, QuaternionSignsAppear) {
    // Three equal-direction pairs on the alternating walk give a negative contribution for some matching.
    const auto jumps = cycle({0, 1, 0, 1, 0, 1, 0});
    bool negative = false;
    for (const auto& m : enumerate_matchings(6))
        if (combinatorial_constant(m, jumps, ensembles::Field::Quaternion) < 0.0) negative = true;
    EXPECT_TRUE(negative);
}

TEST(FeynmanKac, ScalarDirichletMatchesAiryTrace) {
    const double kappa = 1.0, t = 0.8;
    double exact = 0.0;
    const double scale = std::pow(kappa * kappa / 2.0, 1.0 / 3.0);
    for (int k = 1; k < 400; ++k) exact += std::exp(-t * scale * airy_zero(k));
    FkSettings s;
    s.steps = 512;
    const auto est = mc_expected_trace({1, 2.0, {kInf}}, {kappa, 1e-4, 1.0}, t, s, 20000, 31);
    EXPECT_NEAR(est.mean, exact, 4.0 * est.std_error + 0.01 * exact) << exact;
    EXPECT_EQ(est.t2.value, 0.0);
    EXPECT_EQ(est.t4.value, 0.0);
    EXPECT_FALSE(est.variance_flag);
}

TEST(FeynmanKac, ScalarRobinMatchesShootingLevels) {
    const double kappa = 2.0, t = 0.8, w = 1.0;
    double exact = 0.0;
    for (double lam : oracle::airy_levels(kappa, w, 25.0, 0.01)) exact += std::exp(-t * lam);
    FkSettings s;
    s.steps = 512;
    const auto est = mc_expected_trace({1, 2.0, {w}}, {kappa, 1e-4, 1.0}, t, s, 20000, 32);
    EXPECT_NEAR(est.mean, exact, 4.0 * est.std_error + 0.01 * exact) << exact;
}

TEST(FeynmanKac, MatrixOperatorMatchesEigenvalueTrace) {
    const sao::SaoParams th{2, 2.0, {kInf, 0.0}};
    const auto eta = sao::GeneralizedParams::canonical(th);
    const double t = 0.5;
    FkSettings s;
    s.steps = 256;
    const auto fk = mc_expected_trace(th, eta, t, s, 4000, 33);
    const auto eig = mean_trace(th, eta, sao::GridSpec{0.05, 40.0}, t, 300, 34);
    const double se = std::hypot(fk.std_error, eig.std_error);
    EXPECT_NEAR(fk.mean, eig.value, 4.0 * se + 0.02 * eig.value) << fk.mean << " vs " << eig.value;
    EXPECT_GT(fk.t2.value, 0.0);
    EXPECT_LE(fk.truncated_mass, 1e-3);
}

TEST(FeynmanKac, Validation) {
    const sao::SaoParams th{1, 2.0, {kInf}};
    const sao::GeneralizedParams eta{0.5, 1.0, 1.0};
    EXPECT_THROW(mc_expected_trace(th, eta, 0.1, {}, 10, 1), std::invalid_argument);
    EXPECT_THROW(mc_expected_trace(th, eta, 1.5, {}, 10, 1), std::invalid_argument);
    EXPECT_THROW(mc_expected_trace({4, 2.0, {kInf, kInf, kInf, kInf}}, eta, 0.5, {}, 10, 1), std::invalid_argument);
    EXPECT_THROW(mc_expected_trace(th, eta, 0.5, {}, 1, 1), std::invalid_argument);
    FkSettings bad;
    bad.max_jumps = 18;
    EXPECT_THROW(mc_expected_trace(th, eta, 0.5, bad, 10, 1), std::invalid_argument);
}

TEST(FeynmanKac, TimeCellRefinementIsStable) {
    const sao::SaoParams th{2, 2.0, {kInf, kInf}};
    const auto eta = sao::GeneralizedParams::canonical(th);
    FkSettings coarse;
    coarse.steps = 256;
    coarse.time_cells = 32;
    FkSettings fine = coarse;
    fine.time_cells = 64;
    const auto a = mc_expected_trace(th, eta, 0.5, coarse, 4000, 35);
    const auto b = mc_expected_trace(th, eta, 0.5, fine, 4000, 35);
    EXPECT_LT(std::abs(a.mean - b.mean), std::max(a.std_error, b.std_error)) << a.mean << " vs " << b.mean;
}

TEST(FeynmanKac, DeterministicGivenSeed) {
    const sao::SaoParams th{2, 1.0, {kInf, kInf}};
    const auto eta = sao::GeneralizedParams::canonical(th);
    FkSettings s;
    s.steps = 64;
    const auto a = mc_expected_trace(th, eta, 0.5, s, 50, 9);
    const auto b = mc_expected_trace(th, eta, 0.5, s, 50, 9);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.t2.value, b.t2.value);
    s.threads = 1;
    const auto single = mc_expected_trace(th, eta, 0.5, s, 50, 9);
    s.threads = 4;
    const auto multi = mc_expected_trace(th, eta, 0.5, s, 50, 9);
    EXPECT_EQ(single.mean, multi.mean);
    EXPECT_EQ(single.t4.value, multi.t4.value);
}

TEST(TraceStudies, ReplicasAreSeedMatchedAndMonotoneInTime) {
    const sao::SaoParams th{1, 2.0, {kInf}};
    const auto eta = sao::GeneralizedParams::canonical(th);
    const std::vector<double> tg{0.3, 0.6, 1.0};
    const auto a = trace_replicas(th, eta, sao::GridSpec{0.05, 40.0}, tg, 6, 3);
    const auto b = trace_replicas(th, eta, sao::GridSpec{0.05, 40.0}, tg, 6, 3);
    EXPECT_EQ(a, b);
    for (const auto& row : a) {
        ASSERT_EQ(row.size(), 3u);
        EXPECT_GT(row[0], row[1]);
        EXPECT_GT(row[1], row[2]);
    }
}
