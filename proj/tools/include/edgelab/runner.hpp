#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edgelab::runner {

enum class Format { Csv, Json };

/// One fully specified experiment. params holds the experiment-specific block.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::size_t replicas = 0;
    std::string output;
    Format format = Format::Csv;
    nlohmann::json params = nlohmann::json::object();

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBreach = 2;

struct RunResult {
    int exit_code = kExitSuccess;
    std::string message;
    /// Primary artifact (CSV or JSON text).
    std::string artifact;
    nlohmann::json manifest;
};

const std::vector<std::string>& experiment_names();

/// Seed precedence: explicit value, then the EDGE_LAB_SEED environment variable, then the fallback.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, std::uint64_t fallback = 1);

/// Reads a config document; a manifest is accepted in place of a config.
ExperimentConfig load_config(const std::string& path);

/// Runs the experiment and returns its artifact and manifest without touching the filesystem.
RunResult execute(const ExperimentConfig& config);

/// Runs the experiment and writes the artifact to config.output (stdout when empty) plus
/// a manifest next to it.
int run(const ExperimentConfig& config);

/// Build identifier recorded in manifests.
std::string build_id();

} // namespace edgelab::runner
