#include "edgelab/runner.hpp"

#include "edgelab/bridge.hpp"
#include "edgelab/ensembles.hpp"
#include "edgelab/estimators.hpp"
#include "edgelab/feynman_kac.hpp"
#include "edgelab/sao_operator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#ifndef EDGE_LAB_BUILD_ID
#define EDGE_LAB_BUILD_ID "unknown"
#endif

namespace edgelab::runner {

using nlohmann::json;

namespace {

/// Raised when a verification report contains failing items; carries the artifact.
struct BreachReport {
    std::string artifact;
    json summary;
};

std::string format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw std::invalid_argument("unknown format '" + s + "'");
}

std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return sao::kInfinity;
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
        return d;
    }
    throw std::invalid_argument("expected a number, got " + v.dump());
}

json encode_double(double v) { return std::isinf(v) ? json(v > 0 ? "inf" : "-inf") : json(v); }

template <class T>
T param(const json& p, const std::string& key, T fallback) {
    if (!p.contains(key) || p.at(key).is_null()) return fallback;
    if constexpr (std::is_same_v<T, double>)
        return parse_double(p.at(key));
    else
        return p.at(key).get<T>();
}

std::vector<double> double_list(const json& p, const std::string& key, std::vector<double> fallback) {
    if (!p.contains(key)) return fallback;
    const auto& v = p.at(key);
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(parse_double(e));
    } else if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(parse_double(json(tok)));
    } else {
        out.push_back(parse_double(v));
    }
    return out;
}

/// Operator parameters from a block {r, beta, w} or a string "r,beta,w_1,...,w_r".
sao::SaoParams parse_theta(const json& v) {
    sao::SaoParams th;
    if (v.is_string()) {
        const auto xs = double_list(json{{"x", v}}, "x", {});
        if (xs.size() < 3) throw std::invalid_argument("theta needs r,beta,w_1..w_r");
        th.r = static_cast<int>(xs[0]);
        th.beta = xs[1];
        th.w.assign(xs.begin() + 2, xs.end());
    } else {
        th.r = param<int>(v, "r", 1);
        th.beta = param<double>(v, "beta", 2.0);
        th.w = double_list(v, "w", std::vector<double>(static_cast<std::size_t>(th.r), sao::kInfinity));
    }
    if (th.w.size() == 1 && th.r > 1) th.w.assign(static_cast<std::size_t>(th.r), th.w[0]);
    th.validate();
    return th;
}

json theta_json(const sao::SaoParams& th) {
    json w = json::array();
    for (double x : th.w) w.push_back(encode_double(x));
    return {{"r", th.r}, {"beta", th.beta}, {"w", w}};
}

/// Generalized parameters from {kappa, sigma, upsilon}, "kappa,sigma,upsilon" or "canonical".
sao::GeneralizedParams parse_eta(const json& p, const sao::SaoParams& th) {
    if (!p.contains("eta") || (p.at("eta").is_string() && p.at("eta").get<std::string>() == "canonical"))
        return sao::GeneralizedParams::canonical(th);
    const auto& v = p.at("eta");
    sao::GeneralizedParams eta = sao::GeneralizedParams::canonical(th);
    if (v.is_string()) {
        const auto xs = double_list(json{{"x", v}}, "x", {});
        if (xs.size() != 3) throw std::invalid_argument("eta needs kappa,sigma,upsilon");
        eta = {xs[0], xs[1], xs[2]};
    } else {
        eta.kappa = param<double>(v, "kappa", eta.kappa);
        eta.sigma = param<double>(v, "sigma", eta.sigma);
        eta.upsilon = param<double>(v, "upsilon", eta.upsilon);
    }
    eta.validate();
    return eta;
}

json eta_json(const sao::GeneralizedParams& e) {
    return {{"kappa", e.kappa}, {"sigma", e.sigma}, {"upsilon", e.upsilon}};
}

sao::GridSpec parse_grid(const json& p, double h, double length) {
    sao::GridSpec g{param<double>(p, "h", h), param<double>(p, "L", length)};
    g.validate();
    return g;
}

estimators::EstimatorSettings parse_settings(const json& p) {
    estimators::EstimatorSettings s;
    s.c1 = param<double>(p, "c1", s.c1);
    s.c2 = param<double>(p, "c2", s.c2);
    s.M = param<int>(p, "M", s.M);
    s.tail_policy = param<double>(p, "tail_policy", s.tail_policy);
    return s;
}

std::vector<double> read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read points file '" + path + "'");
    std::vector<double> pts;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line.substr(first), &used);
        } catch (const std::exception&) {
            continue; // header line
        }
        pts.push_back(v);
    }
    if (pts.empty()) throw std::runtime_error("no points in '" + path + "'");
    return pts;
}

/// Points from a file, or the k smallest eigenvalues of a freshly sampled operator (scaled to the
/// stochastic Airy normalization).
PointConfiguration points_from(const json& p, std::uint64_t seed, json& source) {
    if (p.contains("points")) {
        const auto path = p.at("points").get<std::string>();
        source = {{"points", path}};
        return make_configuration(read_points(path), "file:" + path);
    }
    const auto th = parse_theta(p.value("theta", json("1,2,inf")));
    const auto grid = parse_grid(p, 0.01, 10.0);
    const auto k = param<std::size_t>(p, "k", 200);
    const auto op = sao::build_sao(th, grid, seed);
    const auto eig = sao::smallest_eigenvalues(op, k);
    source = {{"theta", theta_json(th)}, {"h", grid.h}, {"L", grid.L}, {"k", k}};
    return sao::spectrum_to_configuration(eig.values, k, grid);
}

std::string csv_spectrum(const std::vector<double>& v) {
    std::string out = "index,eigenvalue\n";
    for (std::size_t i = 0; i < v.size(); ++i) out += std::to_string(i) + "," + number(v[i]) + "\n";
    return out;
}

ensembles::SpikedModelSpec parse_spiked(const json& p, ensembles::ModelKind kind) {
    ensembles::SpikedModelSpec s;
    s.kind = kind;
    s.n = param<std::size_t>(p, "n", 200);
    s.p = param<std::size_t>(p, "p", kind == ensembles::ModelKind::Wishart ? s.n : 0);
    s.field = ensembles::field_from_beta(param<int>(p, "beta", 2));
    s.spikes.values = double_list(p, "spikes", {});
    s.validate();
    return s;
}

struct Outcome {
    std::string artifact;
    json summary;
    bool breach = false;
};

Outcome run_sample(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto model = param<std::string>(p, "model", "hermite");
    ensembles::SpectrumSample s;
    json spec;
    if (model == "hermite") {
        ensembles::BetaHermiteSpec h{param<std::size_t>(p, "n", 200), param<double>(p, "beta", 2.0)};
        h.validate();
        s = ensembles::sample_beta_hermite(h, c.seed);
        spec = {{"model", model}, {"n", h.n}, {"beta", h.beta}};
    } else if (model == "wishart" || model == "gaussian") {
        const auto kind = model == "wishart" ? ensembles::ModelKind::Wishart : ensembles::ModelKind::Gaussian;
        const auto m = parse_spiked(p, kind);
        s = ensembles::sample_spiked(m, c.seed);
        spec = {{"model", model}, {"n", m.n}, {"p", m.p}, {"beta", ensembles::dyson_index(m.field)},
                {"spikes", m.spikes.values}};
        if (param<bool>(p, "edge_rescale", false)) {
            s.eigenvalues = ensembles::edge_rescale(s, m).points;
            spec["edge_rescale"] = true;
        }
    } else {
        throw std::invalid_argument("unknown model '" + model + "'");
    }
    Outcome o;
    o.summary = {{"spec", spec}, {"seed", c.seed}, {"count", s.eigenvalues.size()}};
    if (c.format == Format::Csv) {
        o.artifact = csv_spectrum(s.eigenvalues);
    } else {
        o.artifact = json{{"spec", spec}, {"seed", c.seed}, {"eigenvalues", s.eigenvalues}}.dump(2) + "\n";
    }
    return o;
}

Outcome run_sao_spec(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto th = parse_theta(p.value("theta", json(theta_json(sao::SaoParams{}))));
    const auto grid = parse_grid(p, 0.01, 10.0);
    const auto k = param<std::size_t>(p, "k", 10);
    const std::size_t reps = c.replicas == 0 ? 1 : c.replicas;
    std::string csv = "replica,index,eigenvalue\n";
    json all = json::array();
    for (std::size_t r = 0; r < reps; ++r) {
        const auto op = sao::build_sao(th, grid, derive_seed(c.seed, r));
        const auto eig = sao::smallest_eigenvalues(op, k);
        for (std::size_t i = 0; i < eig.values.size(); ++i)
            csv += std::to_string(r) + "," + std::to_string(i) + "," + number(eig.values[i]) + "\n";
        all.push_back(eig.values);
    }
    Outcome o;
    o.summary = {{"theta", theta_json(th)}, {"h", grid.h}, {"L", grid.L}, {"k", k}, {"replicas", reps}};
    o.artifact = c.format == Format::Csv ? csv : json{{"eigenvalues", all}}.dump(2) + "\n";
    return o;
}

json estimate_json(double value, json diagnostics, json flags) {
    return {{"value", value}, {"diagnostics", std::move(diagnostics)}, {"flags", std::move(flags)}};
}

Outcome json_outcome(json body) {
    Outcome o;
    o.artifact = body.dump(2) + "\n";
    o.summary = std::move(body);
    return o;
}

Outcome run_estimate_t(const ExperimentConfig& c) {
    json source;
    const auto config = points_from(c.params, c.seed, source);
    const auto s = parse_settings(c.params);
    const auto t = estimators::estimator_T(config, s);
    return json_outcome(estimate_json(
        t.value,
        {{"block_averages", t.block_averages}, {"last_increment", t.last_increment}, {"source", source},
         {"points", config.points.size()}},
        {{"divergence", t.divergence_flag}, {"tail", t.tail_flag}}));
}

Outcome run_recover_beta(const ExperimentConfig& c) {
    const auto& p = c.params;
    std::vector<double> pts;
    json source;
    if (p.contains("points")) {
        pts = read_points(p.at("points").get<std::string>());
        source = {{"points", p.at("points")}};
    } else {
        ensembles::BetaHermiteSpec h{param<std::size_t>(p, "n", 1000), param<double>(p, "beta", 2.0)};
        h.validate();
        pts = ensembles::sample_beta_hermite(h, c.seed).eigenvalues;
        source = {{"model", "hermite"}, {"n", h.n}, {"beta", h.beta}};
    }
    const double energy = estimators::hamiltonian_energy(pts);
    bool out_of_range = false;
    double beta = std::nan("");
    try {
        beta = estimators::beta_from_energy(energy, pts.size());
    } catch (const std::range_error&) {
        out_of_range = true;
    }
    return json_outcome(estimate_json(beta, {{"energy", energy}, {"n", pts.size()}, {"source", source}},
                                      {{"out_of_range", out_of_range}}));
}

fk::FitOptions parse_fit_options(const json& p, const sao::SaoParams& th) {
    auto o = fk::default_fit_options(th);
    if (p.contains("corrections")) o.corrections = double_list(p, "corrections", {});
    o.bootstrap = param<std::size_t>(p, "bootstrap", o.bootstrap);
    return o;
}

json fit_json(const fk::FitResult& f) {
    return {{"leading", f.leading},
            {"leading_ci", {f.leading_ci.lower, f.leading_ci.upper}},
            {"constant", f.constant},
            {"constant_ci", {f.constant_ci.lower, f.constant_ci.upper}},
            {"corrections", f.corrections},
            {"ill_conditioned", f.ill_conditioned}};
}

std::vector<double> default_t_grid() { return {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

struct DeltaSetup {
    sao::SaoParams first;
    sao::SaoParams second;
    sao::GeneralizedParams eta_first;
    sao::GeneralizedParams eta_second;
    sao::GridSpec grid;
    std::vector<double> t_grid;
    std::size_t replicas = 0;
};

DeltaSetup parse_delta(const ExperimentConfig& c, const json& default_second) {
    const auto& p = c.params;
    DeltaSetup d;
    d.first = parse_theta(p.value("theta", json("1,2,0")));
    d.second = parse_theta(p.value("paired_with", default_second));
    d.eta_first = parse_eta(p, d.first);
    d.eta_second = p.contains("eta") ? parse_eta(p, d.second) : sao::GeneralizedParams::canonical(d.second);
    d.grid = parse_grid(p, 0.05, 60.0);
    d.t_grid = double_list(p, "t_grid", default_t_grid());
    d.replicas = c.replicas == 0 ? 300 : c.replicas;
    return d;
}

Outcome delta_outcome(const ExperimentConfig& c, const DeltaSetup& d, bool as_r0) {
    const auto fit = fk::trace_delta_fit(d.first, d.eta_first, d.second, d.eta_second, d.grid, d.t_grid,
                                         d.replicas, c.seed, parse_fit_options(c.params, d.first));
    const double predicted = estimators::trace_constant_formula(d.first, d.eta_first) -
                             estimators::trace_constant_formula(d.second, d.eta_second);
    const double tolerance = param<double>(c.params, "tolerance", 0.1);
    json body = {{"first", theta_json(d.first)},   {"second", theta_json(d.second)},
                 {"fit", fit_json(fit)},           {"delta_constant", fit.constant},
                 {"predicted", predicted},         {"tolerance", tolerance},
                 {"pass", std::abs(fit.constant - predicted) <= tolerance}};
    if (as_r0) {
        const double canonical_shift = 0.5 * (1.0 / d.first.beta - 1.0 / d.second.beta);
        body["r0_difference"] = 2.0 * (fit.constant - canonical_shift);
        body["r0_difference_rounded"] = std::lround(2.0 * (fit.constant - canonical_shift));
        body["r0_difference_expected"] = d.first.robin_count() - d.second.robin_count();
    }
    auto o = json_outcome(body);
    o.breach = !body["pass"].get<bool>() || fit.ill_conditioned;
    return o;
}

Outcome run_trace_delta(const ExperimentConfig& c) {
    return delta_outcome(c, parse_delta(c, json("1,2,inf")), false);
}

Outcome run_recover_r0(const ExperimentConfig& c) {
    auto d = parse_delta(c, json());
    if (!c.params.contains("paired_with")) {
        d.second = d.first;
        d.second.w.assign(static_cast<std::size_t>(d.first.r), sao::kInfinity);
        d.eta_second = sao::GeneralizedParams::canonical(d.second);
    }
    return delta_outcome(c, d, true);
}

Outcome run_rigidity(const ExperimentConfig& c) {
    const auto& p = c.params;
    json source;
    const auto full = points_from(p, c.seed, source);
    const auto th = parse_theta(p.value("theta", json("1,2,inf")));
    const auto bounds = double_list(p, "interval", {});
    estimators::Interval b;
    if (bounds.size() == 2) {
        b = {bounds[0], bounds[1]};
    } else {
        if (full.points.size() < 3) throw std::invalid_argument("rigidity-count needs at least three points");
        b = {std::min(0.0, full.points[0]) - 1.0, full.points[2] + 1e-9};
    }
    std::vector<double> outside;
    std::size_t inside = 0;
    for (double x : full.points) {
        if (b.contains(x))
            ++inside;
        else
            outside.push_back(x);
    }
    const auto out_cfg = make_configuration(outside, full.truncation.source, full.truncation.grid_step,
                                            full.truncation.grid_length);
    const auto est = estimators::rigidity_count(out_cfg, b, th.robin_count(), th.beta, parse_settings(p));
    return json_outcome(estimate_json(
        est.value,
        {{"nearest", est.nearest}, {"true_inside", inside}, {"interval", {b.lower, b.upper}},
         {"block_averages", est.block_averages}, {"source", source}},
        {{"divergence", est.divergence_flag}, {"correct", est.nearest == static_cast<long>(inside)}}));
}

std::string trace_csv_row(double t, double mean, double se, double t0, double t2, double t4) {
    return number(t) + "," + number(mean) + "," + number(se) + "," + number(t0) + "," + number(t2) + "," +
           number(t4) + "\n";
}

Outcome run_trace_verify(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto th = parse_theta(p.value("theta", json("1,2,inf")));
    const auto eta = parse_eta(p, th);
    const auto grid = parse_grid(p, 0.05, 60.0);
    const auto t_grid = double_list(p, "t_grid", default_t_grid());
    const std::size_t reps = c.replicas == 0 ? 300 : c.replicas;
    const bool paired = p.contains("paired_with");
    fk::FitResult fit;
    double predicted_constant = 0.0;
    double predicted_leading = 0.0;
    const auto options = parse_fit_options(p, th);
    if (paired) {
        const auto second = parse_theta(p.at("paired_with"));
        const auto eta2 = sao::GeneralizedParams::canonical(second);
        fit = fk::trace_delta_fit(th, eta, second, eta2, grid, t_grid, reps, c.seed, options);
        predicted_constant =
            estimators::trace_constant_formula(th, eta) - estimators::trace_constant_formula(second, eta2);
        predicted_leading = estimators::trace_leading_coefficient(th, eta) -
                            estimators::trace_leading_coefficient(second, eta2);
    } else {
        fit = fk::trace_constant_fit(th, eta, grid, t_grid, reps, c.seed, options);
        predicted_constant = estimators::trace_constant_formula(th, eta);
        predicted_leading = estimators::trace_leading_coefficient(th, eta);
    }
    const double tol_b = param<double>(p, "tolerance", 0.1);
    const double tol_a = param<double>(p, "leading_tolerance", 0.05);
    const bool lead_ok = std::abs(predicted_leading) < 1e-12
                             ? true
                             : std::abs(fit.leading - predicted_leading) <= tol_a * std::abs(predicted_leading);
    const bool const_ok = std::abs(fit.constant - predicted_constant) <= tol_b;
    json body = {{"theta", theta_json(th)},
                 {"eta", eta_json(eta)},
                 {"fit", fit_json(fit)},
                 {"predicted_leading", predicted_leading},
                 {"predicted_constant", predicted_constant},
                 {"pass", lead_ok && const_ok}};
    Outcome o;
    o.summary = body;
    o.breach = !(lead_ok && const_ok);
    if (c.format == Format::Csv) {
        o.artifact = "t,mean,stderr,T0,T2,T4plus\n";
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            o.artifact += trace_csv_row(t_grid[k], fit.means[k], fit.std_errors[k], std::nan(""), std::nan(""),
                                        std::nan(""));
    } else {
        body["t_grid"] = t_grid;
        body["means"] = fit.means;
        body["std_errors"] = fit.std_errors;
        o.artifact = body.dump(2) + "\n";
    }
    return o;
}

Outcome run_fk_verify(const ExperimentConfig& c) {
    const auto& p = c.params;
    const auto th = parse_theta(p.value("theta", json("1,2,inf")));
    const auto eta = parse_eta(p, th);
    const auto t_grid = double_list(p, "t_grid", {1.0});
    fk::FkSettings s;
    s.steps = param<std::size_t>(p, "steps", s.steps);
    s.delta = param<double>(p, "delta", s.delta);
    s.time_cells = param<std::size_t>(p, "time_cells", s.time_cells);
    s.max_jumps = param<int>(p, "max_jumps", s.max_jumps);
    const auto samples = param<std::size_t>(p, "samples", c.replicas == 0 ? 20000 : c.replicas);
    const auto oracle_reps = param<std::size_t>(p, "oracle_replicas", 0);
    const double tolerance = param<double>(p, "tolerance", 0.05);
    const auto grid = parse_grid(p, 0.02, 40.0);
    std::string csv = "t,mean,stderr,T0,T2,T4plus\n";
    json rows = json::array();
    bool breach = false;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const auto e = fk::mc_expected_trace(th, eta, t_grid[k], s, samples, derive_seed(c.seed, k));
        csv += trace_csv_row(t_grid[k], e.mean, e.std_error, e.t0.value, e.t2.value, e.t4.value);
        json row = {{"t", t_grid[k]},          {"mean", e.mean},
                    {"stderr", e.std_error},   {"T0", e.t0.value},
                    {"T2", e.t2.value},        {"T4plus", e.t4.value},
                    {"T2_stderr", e.t2.std_error}, {"T4plus_stderr", e.t4.std_error},
                    {"truncated_mass", e.truncated_mass}, {"variance_flag", e.variance_flag}};
        breach = breach || e.variance_flag;
        if (oracle_reps > 0) {
            const auto oracle =
                fk::mean_trace(th, eta, grid, t_grid[k], oracle_reps, derive_seed(c.seed, 1000 + k));
            const bool ok = std::abs(e.mean - oracle.value) <= tolerance * std::abs(oracle.value);
            row["oracle"] = oracle.value;
            row["oracle_stderr"] = oracle.std_error;
            row["pass"] = ok;
            breach = breach || !ok;
        }
        rows.push_back(row);
    }
    Outcome o;
    o.summary = {{"theta", theta_json(th)}, {"eta", eta_json(eta)}, {"samples", samples}, {"rows", rows}};
    o.breach = breach;
    o.artifact = c.format == Format::Csv ? csv : o.summary.dump(2) + "\n";
    return o;
}

json report_json(const bridge::ReportItem& r) {
    return {{"item", r.item},     {"t", r.t},           {"estimate", r.estimate},
            {"target", r.target}, {"stderr", r.std_error}, {"tolerance", r.tolerance},
            {"pass", r.pass},     {"note", r.note}};
}

Outcome run_bridge_verify(const ExperimentConfig& c) {
    const auto& p = c.params;
    bridge::BudgetSettings b;
    b.paths = param<std::size_t>(p, "paths", c.replicas == 0 ? b.paths : c.replicas);
    b.steps = param<std::size_t>(p, "steps", b.steps);
    b.delta = param<double>(p, "delta", b.delta);
    b.seed = c.seed;
    const auto item = param<std::string>(p, "item", "all");
    const std::vector<std::string> known{"self-intersection-mean", "self-intersection-integral", "hit-probability",
                                         "boundary-local-time",    "local-time-second-moment",   "pitman",
                                         "asymptotics"};
    if (item != "all" && std::find(known.begin(), known.end(), item) == known.end())
        throw std::invalid_argument("unknown bridge item '" + item + "'");
    auto want = [&](const std::string& name) { return item == "all" || item == name; };
    json report = json::array();
    bool breach = false;
    auto push = [&](const bridge::ReportItem& r) {
        report.push_back(report_json(r));
        breach = breach || !r.pass;
    };
    if (want("self-intersection-mean")) push(bridge::check_self_intersection_mean(b));
    if (want("self-intersection-integral")) push(bridge::check_self_intersection_integral(b));
    if (want("hit-probability"))
        push(bridge::check_hit_probability(param<double>(p, "x", 0.5), param<double>(p, "t", 1.0), b));
    if (want("boundary-local-time")) push(bridge::check_boundary_local_time(param<double>(p, "x", 0.5), b));
    if (want("local-time-second-moment")) push(bridge::check_local_time_second_moment(param<double>(p, "y", 0.0), b));
    if (want("pitman")) {
        const auto pc = bridge::pitman_density_check(0.0, 0.0, 1.0, b);
        report.push_back({{"item", "pitman"}, {"estimate", pc.ks.statistic}, {"target", 0.0},
                          {"stderr", nullptr}, {"tolerance", 0.02}, {"pass", pc.pass}});
        breach = breach || !pc.pass;
    }
    if (item == "asymptotics") {
        for (const auto& r : bridge::verify_bridge_asymptotics(param<double>(p, "kappa", 1.0),
                                                               double_list(p, "t_grid", {0.5, 0.25, 0.125}), b))
            push(r);
    }
    auto o = json_outcome(json{{"report", report}});
    o.breach = breach;
    return o;
}

using Handler = Outcome (*)(const ExperimentConfig&);

Handler handler_for(const std::string& name) {
    if (name == "sample") return run_sample;
    if (name == "sao-spec") return run_sao_spec;
    if (name == "estimate-T") return run_estimate_t;
    if (name == "recover-beta") return run_recover_beta;
    if (name == "recover-r0") return run_recover_r0;
    if (name == "rigidity-count") return run_rigidity;
    if (name == "trace-verify") return run_trace_verify;
    if (name == "trace-delta") return run_trace_delta;
    if (name == "bridge-verify") return run_bridge_verify;
    if (name == "fk-verify") return run_fk_verify;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

} // namespace

json ExperimentConfig::to_json() const {
    return {{"experiment", experiment}, {"seed", seed},          {"replicas", replicas},
            {"output", output},         {"format", format_name(format)}, {"params", params}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    c.experiment = j.value("experiment", std::string{});
    c.seed = j.value("seed", std::uint64_t{1});
    c.replicas = j.value("replicas", std::size_t{0});
    c.output = j.value("output", std::string{});
    c.format = parse_format(j.value("format", std::string{"csv"}));
    c.params = j.value("params", json::object());
    return c;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"sample",        "sao-spec",       "estimate-T",   "recover-beta",
                                                "recover-r0",    "rigidity-count", "trace-verify", "trace-delta",
                                                "bridge-verify", "fk-verify"};
    return names;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, std::uint64_t fallback) {
    if (explicit_seed) return *explicit_seed;
    if (const char* env = std::getenv("EDGE_LAB_SEED"); env != nullptr && *env != '\0') {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("EDGE_LAB_SEED is not an integer");
        return v;
    }
    return fallback;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config '" + path + "'");
    const json j = json::parse(in);
    return ExperimentConfig::from_json(j.contains("config") ? j.at("config") : j);
}

std::string build_id() { return EDGE_LAB_BUILD_ID; }

RunResult execute(const ExperimentConfig& config) {
    RunResult r;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto handler = handler_for(config.experiment);
        auto outcome = handler(config);
        r.artifact = std::move(outcome.artifact);
        r.exit_code = outcome.breach ? kExitBreach : kExitSuccess;
        r.message = outcome.breach ? "tolerance breach" : "ok";
        r.manifest["summary"] = std::move(outcome.summary);
    } catch (const std::exception& e) {
        r.exit_code = kExitError;
        r.message = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.manifest["config"] = config.to_json();
    r.manifest["seed"] = config.seed;
    r.manifest["build_id"] = build_id();
    r.manifest["wall_time_seconds"] = wall;
    r.manifest["exit_code"] = r.exit_code;
    r.manifest["message"] = r.message;
    return r;
}

int run(const ExperimentConfig& config) {
    if (!config.output.empty()) {
        std::ofstream probe(config.output, std::ios::app);
        if (!probe) {
            std::cerr << "edge-lab: cannot write '" << config.output << "'\n";
            return kExitError;
        }
    }
    const auto r = execute(config);
    if (r.exit_code == kExitError) {
        std::cerr << "edge-lab: " << r.message << "\n";
        return kExitError;
    }
    if (config.output.empty()) {
        std::cout << r.artifact;
    } else {
        std::ofstream(config.output, std::ios::trunc) << r.artifact;
        std::ofstream(config.output + ".manifest.json", std::ios::trunc) << r.manifest.dump(2) << "\n";
    }
    if (r.exit_code == kExitBreach) std::cerr << "edge-lab: tolerance breach reported\n";
    return r.exit_code;
}

} // namespace edgelab::runner
