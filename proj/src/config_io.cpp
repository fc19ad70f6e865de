#include "mermin/config_io.hpp"

#include <fstream>
#include <sstream>

namespace mermin {
namespace {

using nlohmann::json;

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& origin, const std::string& field,
                       const std::string& detail)
{
    throw ConfigError(kind, origin + ": field '" + field + "': " + detail);
}

Rational read_number(const json& value, const std::string& origin, const std::string& field)
{
    try {
        if (value.is_number_unsigned()) return Rational(value.get<std::uint64_t>());
        if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
        if (value.is_number_float()) return rational_from_double(value.get<double>());
        if (value.is_string()) return parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
        fail(ConfigErrorKind::Malformed, origin, field, e.what());
    }
    fail(ConfigErrorKind::Malformed, origin, field, "expected a number or a \"num/den\" string");
}

std::optional<std::uint64_t> read_count(const json& doc, const char* key, const std::string& origin)
{
    if (!doc.contains(key)) return std::nullopt;
    const json& v = doc.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && d <= 1.8e19 && d == static_cast<double>(static_cast<std::uint64_t>(d))) {
            return static_cast<std::uint64_t>(d);
        }
    }
    fail(ConfigErrorKind::Malformed, origin, key, "expected a non-negative integer");
}

DetectorModel read_detector(const json& doc, const char* key, const std::string& origin)
{
    DetectorModel d;
    if (!doc.contains(key)) return d;
    const json& node = doc.at(key);
    if (!node.is_object()) {
        fail(ConfigErrorKind::Malformed, origin, key, "expected an object");
    }
    const std::string field = std::string(key) + ".failure_probability";
    if (node.contains("failure_probability")) {
        d.failure_probability = read_number(node.at("failure_probability"), origin, field);
    }
    if (d.failure_probability < 0 || d.failure_probability > 1) {
        fail(ConfigErrorKind::InvalidProbability, origin, field,
             to_fraction_string(d.failure_probability) + " is outside [0,1]");
    }
    return d;
}

SourceDistribution read_source(const json& doc, const std::string& origin)
{
    if (!doc.contains("source")) {
        fail(ConfigErrorKind::Malformed, origin, "source", "missing");
    }
    const json& node = doc.at("source");
    if (node.is_string()) return builtin_distribution(node.get<std::string>());
    if (!node.is_object()) {
        fail(ConfigErrorKind::Malformed, origin, "source", "expected an object or builtin name");
    }
    if (node.contains("builtin")) {
        if (!node.at("builtin").is_string()) {
            fail(ConfigErrorKind::Malformed, origin, "source.builtin", "expected a string");
        }
        try {
            return builtin_distribution(node.at("builtin").get<std::string>());
        } catch (const ConfigError& e) {
            fail(e.kind(), origin, "source.builtin", e.what());
        }
    }
    if (!node.contains("entries") || !node.at("entries").is_array()) {
        fail(ConfigErrorKind::Malformed, origin, "source", "needs 'builtin' or an 'entries' array");
    }

    SourceDistribution d;
    const json& entries = node.at("entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string field = "source.entries[" + std::to_string(i) + "]";
        const json& e = entries[i];
        if (!e.is_object() || !e.contains("state") || !e.at("state").is_string()
            || !e.contains("weight")) {
            fail(ConfigErrorKind::Malformed, origin, field, "needs 'state' string and 'weight'");
        }
        WeightedState ws;
        try {
            ws.state = PairState::parse(e.at("state").get<std::string>());
        } catch (const ConfigError& err) {
            fail(err.kind(), origin, field + ".state", err.what());
        }
        ws.weight = read_number(e.at("weight"), origin, field + ".weight");
        d.entries.push_back(std::move(ws));
    }
    return d;
}

}  // namespace

json config_to_json(const ExperimentConfig& config)
{
    json entries = json::array();
    for (const auto& e : config.source.entries) {
        entries.push_back({{"state", e.state.to_string()}, {"weight", to_fraction_string(e.weight)}});
    }
    return {
        {"source", {{"entries", entries}}},
        {"detector_a", {{"failure_probability", to_fraction_string(config.detector_a.failure_probability)}}},
        {"detector_b", {{"failure_probability", to_fraction_string(config.detector_b.failure_probability)}}},
        {"settings_law", std::string(ExperimentConfig::settings_law)},
    };
}

LoadedConfig parse_config(const json& doc, const std::string& origin)
{
    if (!doc.is_object()) {
        throw ConfigError(ConfigErrorKind::Malformed, origin + ": top level must be a JSON object");
    }
    LoadedConfig loaded;
    loaded.config.source = read_source(doc, origin);
    if (auto err = validate(loaded.config.source)) {
        throw ConfigError(err->kind(), origin + ": field 'source': " + err->what());
    }
    loaded.config.detector_a = read_detector(doc, "detector_a", origin);
    loaded.config.detector_b = read_detector(doc, "detector_b", origin);
    loaded.seed = read_count(doc, "seed", origin);
    loaded.n_trials = read_count(doc, "n_trials", origin);

    loaded.snapshot = config_to_json(loaded.config);
    if (loaded.seed) loaded.snapshot["seed"] = *loaded.seed;
    if (loaded.n_trials) loaded.snapshot["n_trials"] = *loaded.n_trials;
    return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading config file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(ConfigErrorKind::Malformed, path.string() + ": " + e.what());
    }
    return parse_config(doc, path.string());
}

}  // namespace mermin
