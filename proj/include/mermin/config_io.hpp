#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "mermin/core_model.hpp"

namespace mermin {

/// A file could not be read or written.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct LoadedConfig
{
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_trials;
    /// Canonical form of the parsed config, for manifests and reports.
    nlohmann::json snapshot;
};

/// Parses a config document:
///
///   {
///     "source": {"builtin": "table1_uniform"}
///            | {"entries": [{"state": "GNR-GGR", "weight": 0.5 | "1/2"}, ...]},
///     "detector_a": {"failure_probability": 0.2 | "1/5"},   (optional)
///     "detector_b": {...},                                   (optional)
///     "seed": 1, "n_trials": 1000000                         (optional)
///   }
///
/// Numeric weights are read as the exact decimal they were written as.
/// Throws ConfigError naming `origin` and the offending field; the source
/// distribution and detectors are fully validated.
LoadedConfig parse_config(const nlohmann::json& doc, const std::string& origin = "<config>");

/// Throws IoError if the file cannot be read, ConfigError if it does not
/// parse or validate.
LoadedConfig load_config(const std::filesystem::path& path);

/// Canonical JSON for a config (weights and probabilities as "num/den").
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace mermin
