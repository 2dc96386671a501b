#include "edgelab/feynman_kac.hpp"

#include "edgelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <stdexcept>
#include <string>

namespace edgelab::fk {

bool Matching::valid() const {
    if (n < 0 || n % 2 != 0 || pairs.size() * 2 != static_cast<std::size_t>(n)) return false;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : pairs) {
        if (a == b || a < 0 || b < 0 || a >= n || b >= n) return false;
        if (seen[static_cast<std::size_t>(a)]++ || seen[static_cast<std::size_t>(b)]++) return false;
    }
    return true;
}

int Matching::partner(int position) const {
    for (const auto& [a, b] : pairs) {
        if (a == position) return b;
        if (b == position) return a;
    }
    throw std::out_of_range("Matching::partner: position not matched");
}

long double_factorial_count(int n) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("double_factorial_count: n must be even and nonnegative");
    long c = 1;
    for (int k = n - 1; k > 1; k -= 2) c *= k;
    return c;
}

namespace {

void enumerate_rec(std::vector<int>& free, std::vector<std::pair<int, int>>& acc, int n, std::vector<Matching>& out) {
    if (free.empty()) {
        out.push_back(Matching{n, acc});
        return;
    }
    const int first = free.front();
    for (std::size_t k = 1; k < free.size(); ++k) {
        const int other = free[k];
        std::vector<int> rest;
        rest.reserve(free.size() - 2);
        for (std::size_t j = 1; j < free.size(); ++j)
            if (j != k) rest.push_back(free[j]);
        acc.emplace_back(first, other);
        enumerate_rec(rest, acc, n, out);
        acc.pop_back();
    }
}

} // namespace

std::vector<Matching> enumerate_matchings(int n) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("enumerate_matchings: n must be even and nonnegative");
    if (n > 12) throw std::invalid_argument("enumerate_matchings: n must not exceed 12");
    std::vector<Matching> out;
    out.reserve(static_cast<std::size_t>(double_factorial_count(n)));
    std::vector<int> free(static_cast<std::size_t>(n));
    std::iota(free.begin(), free.end(), 0);
    std::vector<std::pair<int, int>> acc;
    enumerate_rec(free, acc, n, out);
    return out;
}

Matching sample_uniform_matching(int n, Rng& rng) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("sample_uniform_matching: n must be even and nonnegative");
    std::vector<int> free(static_cast<std::size_t>(n));
    std::iota(free.begin(), free.end(), 0);
    Matching m{n, {}};
    while (!free.empty()) {
        const int first = free.front();
        free.erase(free.begin());
        const std::size_t k = rng.index(free.size());
        m.pairs.emplace_back(first, free[k]);
        free.erase(free.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return m;
}

unsigned sample_jump_count(double l2norm2, int r, Rng& rng) {
    if (!(l2norm2 >= 0.0)) throw std::invalid_argument("sample_jump_count: squared norm must be nonnegative");
    const double lambda = 0.5 * (r - 1.0) * (r - 1.0) * l2norm2;
    return 2u * rng.poisson(lambda);
}

std::vector<double> sample_si_times(const bridge::LocalTimeField& field, const Matching& q, Rng& rng) {
    if (!q.valid()) throw std::invalid_argument("sample_si_times: invalid matching");
    const std::size_t c = field.intervals();
    std::vector<double> cumulative(c * c);
    double acc = 0.0;
    for (std::size_t a = 0; a < c; ++a)
        for (std::size_t b = 0; b < c; ++b) {
            acc += std::max(0.0, field.inner(a, b));
            cumulative[a * c + b] = acc;
        }
    if (!(acc > 0.0)) throw std::invalid_argument("sample_si_times: degenerate local-time field");
    std::vector<double> times(static_cast<std::size_t>(q.n));
    auto uniform_in = [&](std::size_t cell) {
        const double lo = field.time_edges[cell], hi = field.time_edges[cell + 1];
        return lo + (hi - lo) * rng.uniform();
    };
    for (const auto& [l1, l2] : q.pairs) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                            static_cast<std::ptrdiff_t>(c * c - 1)));
        times[static_cast<std::size_t>(l1)] = uniform_in(idx / c);
        times[static_cast<std::size_t>(l2)] = uniform_in(idx % c);
    }
    return times;
}

int JumpPath::state_at(double s) const {
    const auto k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
    return states[k];
}

std::vector<std::pair<int, int>> JumpPath::jump_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t k = 1; k < states.size(); ++k) out.emplace_back(states[k - 1], states[k]);
    return out;
}

JumpSample build_jump_path(int i, const std::vector<double>& times, const Matching& q, int r, double horizon,
                           Rng& rng) {
    if (i < 0 || i >= r) throw std::invalid_argument("build_jump_path: start state out of range");
    if (!times.empty() && r < 2) throw std::invalid_argument("build_jump_path: jumps need r >= 2");
    if (static_cast<int>(times.size()) != q.n) throw std::invalid_argument("build_jump_path: matching size mismatch");
    const std::size_t n = times.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    std::vector<int> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<int>(k);

    JumpSample out;
    out.path.start = i;
    out.path.horizon = horizon;
    out.path.states.push_back(i);
    for (std::size_t k = 0; k < n; ++k) {
        out.path.times.push_back(times[order[k]]);
        const int prev = out.path.states.back();
        int next = static_cast<int>(rng.index(static_cast<std::size_t>(r - 1)));
        if (next >= prev) ++next;
        out.path.states.push_back(next);
    }
    out.sorted_matching.n = q.n;
    for (const auto& [a, b] : q.pairs) {
        const int ra = rank[static_cast<std::size_t>(a)];
        const int rb = rank[static_cast<std::size_t>(b)];
        out.sorted_matching.pairs.emplace_back(std::min(ra, rb), std::max(ra, rb));
    }
    std::sort(out.sorted_matching.pairs.begin(), out.sorted_matching.pairs.end());
    return out;
}

namespace {

/// Calls fn(step, state, fraction) for every share of a grid step spent in a state.
template <class Fn>
void for_each_share(const JumpPath& jump, std::size_t steps, double dt, Fn&& fn) {
    std::size_t next = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double s0 = static_cast<double>(k) * dt;
        const double s1 = k + 1 == steps ? jump.horizon : static_cast<double>(k + 1) * dt;
        while (next < jump.times.size() && jump.times[next] <= s0) ++next;
        double from = s0;
        std::size_t cursor = next;
        while (cursor < jump.times.size() && jump.times[cursor] < s1) {
            const double to = jump.times[cursor];
            if (to > from) fn(k, jump.states[cursor], (to - from) / (s1 - s0));
            from = to;
            ++cursor;
        }
        fn(k, jump.states[cursor], (s1 - from) / (s1 - s0));
    }
}

} // namespace

StateLocalTimes combined_local_times(const JumpPath& jump, const bridge::BridgePath& path, double delta, int r) {
    if (std::abs(jump.horizon - path.t) > 1e-12 * std::max(1.0, path.t))
        throw std::invalid_argument("combined_local_times: horizons differ");
    std::vector<double> edges{0.0};
    for (double s : jump.times) edges.push_back(s);
    edges.push_back(path.t);
    const auto field = bridge::local_time_field(path, delta, edges);
    StateLocalTimes out;
    out.delta = delta;
    out.bulk.assign(static_cast<std::size_t>(r), std::vector<double>(field.bins, 0.0));
    for (std::size_t k = 0; k < field.intervals(); ++k) {
        auto& dst = out.bulk[static_cast<std::size_t>(jump.states[k])];
        const double* src = field.row(k);
        for (std::size_t b = 0; b < field.bins; ++b) dst[b] += src[b];
    }
    out.total_bulk = field.total();
    out.boundary.assign(static_cast<std::size_t>(r), 0.0);
    const auto& sk = path.skeleton();
    const double dt = path.step();
    std::vector<double> per_step(path.steps());
    for (std::size_t k = 0; k < path.steps(); ++k) {
        per_step[k] = bridge::step_expected_local_time(sk[k], sk[k + 1], 0.0, dt);
        out.total_boundary += per_step[k];
    }
    for_each_share(jump, path.steps(), dt, [&](std::size_t k, int state, double frac) {
        out.boundary[static_cast<std::size_t>(state)] += frac * per_step[k];
    });
    return out;
}

double boundary_weight(const JumpPath& jump, const bridge::BridgePath& path, const std::vector<double>& w) {
    const auto& sk = path.skeleton();
    const double dt = path.step();
    double log_weight = 0.0;
    bool zero = false;
    for_each_share(jump, path.steps(), dt, [&](std::size_t k, int state, double frac) {
        if (zero || frac <= 0.0) return;
        const double f = bridge::step_exp_local_time(sk[k], sk[k + 1], 0.0, dt, w[static_cast<std::size_t>(state)]);
        if (f <= 0.0)
            zero = true;
        else
            log_weight += frac * std::log(f);
    });
    return zero ? 0.0 : std::exp(log_weight);
}

double combinatorial_constant(const Matching& p, const std::vector<std::pair<int, int>>& jumps,
                              ensembles::Field field) {
    if (!p.valid()) throw std::invalid_argument("combinatorial_constant: invalid matching");
    if (static_cast<std::size_t>(p.n) != jumps.size())
        throw std::invalid_argument("combinatorial_constant: matching size differs from jump count");
    if (p.n > 16) throw std::invalid_argument("combinatorial_constant: more than 16 jumps");
    if (p.n == 0) return 1.0;
    auto reversed = [](std::pair<int, int> j) { return std::make_pair(j.second, j.first); };
    for (const auto& [a, b] : p.pairs) {
        const auto ja = jumps[static_cast<std::size_t>(a)];
        const auto jb = jumps[static_cast<std::size_t>(b)];
        const bool equal = ja == jb;
        const bool reverse = ja == reversed(jb);
        if (field == ensembles::Field::Complex ? !reverse : !(equal || reverse)) return 0.0;
    }
    if (field != ensembles::Field::Quaternion) return 1.0;

    const int n = p.n;
    long total = 0;
    const unsigned long interior = 1ul << (n - 1);
    std::vector<int> m(static_cast<std::size_t>(n) + 1, 0);
    for (unsigned long bits = 0; bits < interior; ++bits) {
        for (int k = 1; k < n; ++k) m[static_cast<std::size_t>(k)] = static_cast<int>((bits >> (k - 1)) & 1ul);
        m[0] = 0;
        m[static_cast<std::size_t>(n)] = 0;
        bool respects = true;
        int flips = 0;
        for (const auto& [a, b] : p.pairs) {
            const int a0 = m[static_cast<std::size_t>(a)], a1 = m[static_cast<std::size_t>(a) + 1];
            const int b0 = m[static_cast<std::size_t>(b)], b1 = m[static_cast<std::size_t>(b) + 1];
            const bool crossing = (a0 != a1) && (b0 == a1) && (b1 == a0);
            const bool equal = jumps[static_cast<std::size_t>(a)] == jumps[static_cast<std::size_t>(b)];
            bool ok = false;
            if (equal) {
                const bool opposite_flat = a0 == a1 && b0 == b1 && a0 != b0;
                ok = opposite_flat || crossing;
                if (crossing) ++flips;
            } else {
                const bool same_flat = a0 == a1 && b0 == b1 && a0 == b0;
                ok = same_flat || crossing;
            }
            if (!ok) {
                respects = false;
                break;
            }
        }
        if (respects) total += (flips % 2 == 0) ? 1 : -1;
    }
    return static_cast<double>(total) * std::pow(2.0, -0.5 * n);
}

namespace {

/// sum_{m >= 2} lambda^m / m! without cancellation.
double poisson_tail_weight(double lambda) {
    double term = 0.5 * lambda * lambda;
    double sum = 0.0;
    for (int m = 2; m < 400 && term > 1e-300; ++m) {
        sum += term;
        if (term < 1e-17 * sum) break;
        term *= lambda / (m + 1.0);
    }
    return sum;
}

/// m >= 2 with probability proportional to lambda^m / m!.
int sample_conditional_poisson(double lambda, double tail, Rng& rng) {
    const double u = rng.uniform() * tail;
    double term = 0.5 * lambda * lambda;
    double acc = 0.0;
    for (int m = 2; m < 400; ++m) {
        acc += term;
        if (u < acc) return m;
        term *= lambda / (m + 1.0);
    }
    return 400;
}

/// P[N/2 > limit] for a Poisson(lambda) count.
double poisson_beyond(double lambda, int limit) {
    double term = std::exp(-lambda);
    double cdf = 0.0;
    for (int m = 0; m <= limit; ++m) {
        cdf += term;
        term *= lambda / (m + 1.0);
    }
    return std::max(0.0, 1.0 - cdf);
}

struct SampleTerms {
    double t0 = 0.0;
    double t2 = 0.0;
    double t4 = 0.0;
    double truncated = 0.0;
};

double state_norm(const StateLocalTimes& lt) {
    double s = 0.0;
    for (const auto& row : lt.bulk) s += bridge::squared_norm_extrapolated(row, lt.delta);
    return s;
}

} // namespace

FkEstimate mc_expected_trace(const sao::SaoParams& theta, const sao::GeneralizedParams& eta, double t,
                             const FkSettings& settings, std::size_t samples, std::uint64_t seed) {
    theta.validate();
    eta.validate();
    if (!(t > 0.2 && t <= 1.0)) throw std::invalid_argument("mc_expected_trace: t must lie in (0.2, 1]");
    if (theta.r > 3) throw std::invalid_argument("mc_expected_trace: r must not exceed 3");
    if (samples < 2) throw std::invalid_argument("mc_expected_trace: need at least two samples");
    if (settings.max_jumps < 2 || settings.max_jumps > 16)
        throw std::invalid_argument("mc_expected_trace: max_jumps must lie in [2, 16]");
    const int r = theta.r;
    const auto field_tag = r == 1 ? ensembles::Field::Real : ensembles::field_from_beta(static_cast<int>(theta.beta));
    const double kt = eta.kappa * t;
    const double delta = settings.delta > 0.0 ? settings.delta
                                              : 2.5 * std::sqrt(t / static_cast<double>(settings.steps));
    const double s2 = eta.sigma * eta.sigma;
    const double u2 = eta.upsilon * eta.upsilon;

    const auto terms = parallel_map<SampleTerms>(
        samples,
        [&](std::size_t idx) {
            Rng rng(derive_seed(seed, idx));
            SampleTerms out;
            const double x = rng.exponential(kt);
            const auto path = bridge::sample_reflected_bridge(x, t, settings.steps, rng);
            const double weight = bridge::reflected_kernel(t, x) / kt *
                                  std::exp(-eta.kappa * (bridge::path_integral(path) - x * t));
            const auto cells = bridge::local_time_field(path, delta, settings.time_cells);
            const double l2 = bridge::squared_norm_extrapolated(cells.total(), delta);
            const double lambda = 0.5 * (r - 1.0) * (r - 1.0) * l2;
            const double tail = r > 1 ? poisson_tail_weight(lambda) : 0.0;
            const int max_pairs = settings.max_jumps / 2;

            for (int i = 0; i < r; ++i) {
                const double boundary = bridge::expected_boundary_weight(path, theta.w[static_cast<std::size_t>(i)]);
                out.t0 += weight * std::exp(0.5 * s2 * l2) * boundary;
                if (r == 1 || lambda <= 0.0) continue;

                auto jump_term = [&](int pairs) {
                    Matching q = pairs == 1 ? Matching{2, {{0, 1}}} : sample_uniform_matching(2 * pairs, rng);
                    const auto times = sample_si_times(cells, q, rng);
                    const auto js = build_jump_path(i, times, q, r, t, rng);
                    if (js.path.final_state() != i) return 0.0;
                    const double c = combinatorial_constant(js.sorted_matching, js.path.jump_pairs(), field_tag);
                    if (c == 0.0) return 0.0;
                    const auto lt = combined_local_times(js.path, path, delta, r);
                    const double bw = boundary_weight(js.path, path, theta.w);
                    return weight * std::pow(u2, pairs) * c * std::exp(0.5 * s2 * state_norm(lt)) * bw;
                };
                out.t2 += lambda * jump_term(1);
                const int m = sample_conditional_poisson(lambda, tail, rng);
                if (m > max_pairs)
                    out.truncated += poisson_beyond(lambda, max_pairs);
                else
                    out.t4 += tail * jump_term(m);
            }
            return out;
        },
        settings.threads);

    RunningStats s0, s2s, s4, tot;
    double trunc = 0.0;
    for (const auto& v : terms) {
        s0.add(v.t0);
        s2s.add(v.t2);
        s4.add(v.t4);
        tot.add(v.t0 + v.t2 + v.t4);
        trunc += v.truncated;
    }
    FkEstimate est;
    est.mean = tot.mean();
    est.std_error = tot.stderr_of_mean();
    est.t0 = {s0.mean(), s0.stderr_of_mean()};
    est.t2 = {s2s.mean(), s2s.stderr_of_mean()};
    est.t4 = {s4.mean(), s4.stderr_of_mean()};
    est.truncated_mass = trunc / static_cast<double>(samples);
    est.variance_flag = !(est.std_error <= 0.1 * std::abs(est.mean));
    est.samples = samples;
    return est;
}

} // namespace edgelab::fk
