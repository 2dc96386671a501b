#include "edgelab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using edgelab::runner::ExperimentConfig;

/// Command-line values that override the config file; unset options keep the file's values.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::string out;
    std::string format;
    std::vector<std::pair<std::string, std::string>> params;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--config", o.config, "JSON config or manifest");
    cmd->add_option("--seed", o.seed, "Master seed (falls back to EDGE_LAB_SEED)");
    cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--replicas", o.replicas, "Number of replicas");
}

/// Registers --name as a string parameter stored under key.
void add_param(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&o, key](const std::string& v) { o.params.emplace_back(key, v); }, help);
}

nlohmann::json typed(const std::string& v) {
    try {
        return nlohmann::json::parse(v);
    } catch (const nlohmann::json::exception&) {
        return v;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edge-lab: soft-edge random matrix laboratory"};
    app.require_subcommand(1);
    Overrides o;

    struct Spec {
        const char* name;
        const char* help;
        std::vector<std::pair<std::string, std::string>> flags;
    };
    const std::vector<Spec> specs{
        {"sample", "Sample an ensemble spectrum",
         {{"--model", "model"}, {"--n", "n"}, {"--p", "p"}, {"--beta", "beta"}, {"--spikes", "spikes"},
          {"--edge-rescale", "edge_rescale"}}},
        {"sao-spec", "Smallest eigenvalues of the discretized operator",
         {{"--r", "r"}, {"--beta", "beta"}, {"--w", "w"}, {"--h", "h"}, {"--L", "L"}, {"--k", "k"}}},
        {"estimate-T", "Recovery functional of a point configuration",
         {{"--points", "points"}, {"--theta", "theta"}, {"--h", "h"}, {"--L", "L"}, {"--k", "k"}, {"--c1", "c1"},
          {"--c2", "c2"}, {"--M", "M"}}},
        {"recover-beta", "Dyson index from the Hamiltonian energy",
         {{"--points", "points"}, {"--n", "n"}, {"--beta", "beta"}}},
        {"recover-r0", "Robin count from a paired trace-constant fit",
         {{"--theta", "theta"}, {"--paired-with", "paired_with"}, {"--t-grid", "t_grid"}, {"--h", "h"},
          {"--L", "L"}, {"--tolerance", "tolerance"}}},
        {"rigidity-count", "Points inside an interval predicted from the points outside",
         {{"--points", "points"}, {"--theta", "theta"}, {"--interval", "interval"}, {"--h", "h"}, {"--L", "L"},
          {"--k", "k"}, {"--c1", "c1"}, {"--c2", "c2"}, {"--M", "M"}}},
        {"trace-verify", "Eigenvalue-based trace curve and asymptotic fit",
         {{"--theta", "theta"}, {"--eta", "eta"}, {"--t-grid", "t_grid"}, {"--paired-with", "paired_with"},
          {"--h", "h"}, {"--L", "L"}, {"--tolerance", "tolerance"}}},
        {"trace-delta", "Paired trace-constant difference",
         {{"--theta", "theta"}, {"--eta", "eta"}, {"--paired-with", "paired_with"}, {"--t-grid", "t_grid"},
          {"--h", "h"}, {"--L", "L"}, {"--tolerance", "tolerance"}}},
        {"bridge-verify", "Brownian bridge identity checks",
         {{"--item", "item"}, {"--paths", "paths"}, {"--steps", "steps"}, {"--delta", "delta"}}},
        {"fk-verify", "Feynman-Kac Monte Carlo of the expected trace",
         {{"--theta", "theta"}, {"--eta", "eta"}, {"--t-grid", "t_grid"}, {"--paired-with", "paired_with"},
          {"--steps", "steps"}, {"--samples", "samples"}, {"--oracle-replicas", "oracle_replicas"},
          {"--h", "h"}, {"--L", "L"}}},
    };
    for (const auto& s : specs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, o);
        for (const auto& [flag, key] : s.flags) add_param(cmd, o, flag, key, key);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : edgelab::runner::kExitError;
    }

    try {
        ExperimentConfig config;
        if (!o.config.empty()) config = edgelab::runner::load_config(o.config);
        const std::string name = app.get_subcommands().front()->get_name();
        if (!config.experiment.empty() && config.experiment != name) {
            std::cerr << "edge-lab: config is for '" << config.experiment << "', not '" << name << "'\n";
            return edgelab::runner::kExitError;
        }
        config.experiment = name;
        if (o.seed)
            config.seed = *o.seed;
        else if (o.config.empty())
            config.seed = edgelab::runner::resolve_seed(std::nullopt, 1);
        if (o.replicas) config.replicas = *o.replicas;
        if (!o.out.empty()) config.output = o.out;
        if (!o.format.empty()) config.format = o.format == "json" ? edgelab::runner::Format::Json
                                                                 : edgelab::runner::Format::Csv;
        // Single-component operator flags are folded into a theta block.
        for (const auto& [key, value] : o.params) config.params[key] = typed(value);
        if (name == "sao-spec" && (config.params.contains("r") || config.params.contains("w") ||
                                   config.params.contains("beta"))) {
            auto& p = config.params;
            nlohmann::json theta = p.value("theta", nlohmann::json::object());
            for (const char* k : {"r", "beta", "w"})
                if (p.contains(k)) {
                    theta[k] = p[k];
                    p.erase(k);
                }
            p["theta"] = theta;
        }
        return edgelab::runner::run(config);
    } catch (const std::exception& e) {
        std::cerr << "edge-lab: " << e.what() << "\n";
        return edgelab::runner::kExitError;
    }
}
