#include "mermin/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mermin {

char to_char(Outcome o) noexcept
{
    switch (o) {
        case Outcome::Green: return 'G';
        case Outcome::Red: return 'R';
        case Outcome::NoFlash: return 'N';
    }
    return '?';
}

char to_char(SwitchPosition p) noexcept
{
    return static_cast<char>('0' + static_cast<int>(p));
}

std::optional<Outcome> outcome_from_char(char c) noexcept
{
    switch (c) {
        case 'G': return Outcome::Green;
        case 'R': return Outcome::Red;
        case 'N': return Outcome::NoFlash;
        default: return std::nullopt;
    }
}

std::string_view to_string(InstructionClass c) noexcept
{
    switch (c) {
        case InstructionClass::Homogeneous: return "Homogeneous";
        case InstructionClass::TwoOne: return "TwoOne";
        case InstructionClass::WithNoFlash: return "WithNoFlash";
    }
    return "?";
}

InstructionSet InstructionSet::parse(std::string_view text)
{
    if (text.size() != kSettingCount) {
        throw ConfigError(ConfigErrorKind::Malformed,
                          "instruction set '" + std::string(text) + "' must have 3 characters");
    }
    std::array<Outcome, kSettingCount> outcomes{};
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        auto o = outcome_from_char(text[i]);
        if (!o) {
            throw ConfigError(ConfigErrorKind::Malformed, "instruction set '" + std::string(text)
                                                              + "' contains a symbol other than G/R/N");
        }
        outcomes[i] = *o;
    }
    return InstructionSet(outcomes);
}

std::vector<InstructionSet> InstructionSet::all()
{
    std::vector<InstructionSet> sets;
    sets.reserve(27);
    for (Outcome a : kAllOutcomes) {
        for (Outcome b : kAllOutcomes) {
            for (Outcome c : kAllOutcomes) {
                sets.emplace_back(std::array{a, b, c});
            }
        }
    }
    return sets;
}

bool InstructionSet::has_no_flash() const noexcept
{
    return std::find(outcomes_.begin(), outcomes_.end(), Outcome::NoFlash) != outcomes_.end();
}

std::string InstructionSet::to_string() const
{
    std::string s;
    for (Outcome o : outcomes_) s.push_back(to_char(o));
    return s;
}

InstructionClass classify(const InstructionSet& s) noexcept
{
    if (s.has_no_flash()) return InstructionClass::WithNoFlash;
    const auto& o = s.outcomes();
    if (o[0] == o[1] && o[1] == o[2]) return InstructionClass::Homogeneous;
    return InstructionClass::TwoOne;
}

PairState PairState::parse(std::string_view text)
{
    if (text.size() != 7 || text[3] != '-') {
        throw ConfigError(ConfigErrorKind::Malformed,
                          "pair state '" + std::string(text) + "' must look like XXX-YYY");
    }
    return {InstructionSet::parse(text.substr(0, 3)), InstructionSet::parse(text.substr(4, 3))};
}

std::string PairState::to_string() const
{
    return alice.to_string() + "-" + bob.to_string();
}

Rational SourceDistribution::total_weight() const
{
    Rational total{0};
    for (const auto& e : entries) total += e.weight;
    return total;
}

std::string_view to_string(ConfigErrorKind kind) noexcept
{
    switch (kind) {
        case ConfigErrorKind::NegativeWeight: return "NegativeWeight";
        case ConfigErrorKind::WeightSumMismatch: return "WeightSumMismatch";
        case ConfigErrorKind::EmptyDistribution: return "EmptyDistribution";
        case ConfigErrorKind::DuplicateState: return "DuplicateState";
        case ConfigErrorKind::InvalidProbability: return "InvalidProbability";
        case ConfigErrorKind::UnknownBuiltin: return "UnknownBuiltin";
        case ConfigErrorKind::Malformed: return "Malformed";
    }
    return "?";
}

ConfigError::ConfigError(ConfigErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind)
{
}

std::optional<ConfigError> validate(const SourceDistribution& d)
{
    if (d.entries.empty()) {
        return ConfigError(ConfigErrorKind::EmptyDistribution, "source has no entries");
    }
    std::set<PairState> seen;
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
        const auto& e = d.entries[i];
        const std::string where = "entry " + std::to_string(i) + " (" + e.state.to_string() + ")";
        if (e.weight < 0) {
            return ConfigError(ConfigErrorKind::NegativeWeight,
                               where + " has weight " + to_fraction_string(e.weight));
        }
        if (!seen.insert(e.state).second) {
            return ConfigError(ConfigErrorKind::DuplicateState, where + " repeats an earlier state");
        }
    }
    const Rational total = d.total_weight();
    const Rational deviation = abs(total - Rational(1));
    if (deviation > rational_from_double(kWeightSumTolerance)) {
        return ConfigError(ConfigErrorKind::WeightSumMismatch,
                           "weights sum to " + to_fraction_string(total) + " (~"
                               + std::to_string(to_double(total)) + "), expected 1; last entry "
                               + std::to_string(d.entries.size() - 1) + " ("
                               + d.entries.back().state.to_string() + ")");
    }
    return std::nullopt;
}

const std::vector<PairState>& table1_states()
{
    static const std::vector<PairState> states = [] {
        const char* rows[] = {"NRG-GRG", "NGR-RGR", "RNG-RRG", "GNR-GGR", "RGN-RGG", "GRN-GRR",
                              "GRG-NRG", "RGR-NGR", "RRG-RNG", "GGR-GNR", "RGG-RGN", "GRR-GRN"};
        std::vector<PairState> v;
        for (const char* r : rows) v.push_back(PairState::parse(r));
        return v;
    }();
    return states;
}

const std::vector<InstructionSet>& two_one_sets()
{
    static const std::vector<InstructionSet> sets = [] {
        std::vector<InstructionSet> v;
        for (const char* s : {"RRG", "RGR", "RGG", "GRR", "GRG", "GGR"}) {
            v.push_back(InstructionSet::parse(s));
        }
        return v;
    }();
    return sets;
}

const std::vector<InstructionSet>& no_flash_free_sets()
{
    static const std::vector<InstructionSet> sets = [] {
        std::vector<InstructionSet> v;
        for (const char* s : {"RRR", "RRG", "RGR", "RGG", "GRR", "GRG", "GGR", "GGG"}) {
            v.push_back(InstructionSet::parse(s));
        }
        return v;
    }();
    return sets;
}

namespace {

SourceDistribution uniform_over(const std::vector<PairState>& states)
{
    SourceDistribution d;
    const Rational w(1, static_cast<long long>(states.size()));
    for (const auto& s : states) d.entries.push_back({s, w});
    return d;
}

std::vector<PairState> identical_pairs(const std::vector<InstructionSet>& sets)
{
    std::vector<PairState> v;
    for (const auto& s : sets) v.push_back(identical_pair(s));
    return v;
}

}  // namespace

SourceDistribution builtin_distribution(std::string_view name)
{
    if (name == "table1_uniform") return uniform_over(table1_states());
    if (name == "two_one_uniform") return uniform_over(identical_pairs(two_one_sets()));
    if (name == "all_eight_uniform") return uniform_over(identical_pairs(no_flash_free_sets()));

    constexpr std::string_view prefix = "single(";
    if (name.starts_with(prefix) && name.ends_with(")")) {
        auto inner = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        PairState state;
        try {
            state = PairState::parse(inner);
        } catch (const ConfigError& e) {
            throw ConfigError(ConfigErrorKind::UnknownBuiltin,
                              "builtin '" + std::string(name) + "': " + e.what());
        }
        return uniform_over({state});
    }
    throw ConfigError(ConfigErrorKind::UnknownBuiltin, "no builtin source named '" + std::string(name)
                                                           + "'");
}

Rational DetectorModel::position_probability(SwitchPosition pos) const
{
    if (pos == SwitchPosition::Failure) return failure_probability;
    return fair_efficiency() / 3;
}

void require_valid(const ExperimentConfig& config)
{
    if (auto err = validate(config.source)) throw *err;
    auto check = [](const DetectorModel& d, const char* name) {
        if (d.failure_probability < 0 || d.failure_probability > 1) {
            throw ConfigError(ConfigErrorKind::InvalidProbability,
                              std::string(name) + ".failure_probability = "
                                  + to_fraction_string(d.failure_probability) + " is outside [0,1]");
        }
    };
    check(config.detector_a, "detector_a");
    check(config.detector_b, "detector_b");
}

std::string TrialRecord::to_string() const
{
    return {to_char(setting_a), to_char(setting_b), to_char(outcome_a), to_char(outcome_b)};
}

}  // namespace mermin
