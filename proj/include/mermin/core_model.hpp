#pragma once

// Vocabulary shared by every module: lamp outcomes, switch settings,
// instruction sets carried by particles, pair states emitted by the source,
// and the detector-side failure model.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mermin/rational.hpp"

namespace mermin {

enum class Outcome : std::uint8_t { Green = 0, Red = 1, NoFlash = 2 };

inline constexpr std::size_t kOutcomeCount = 3;
inline constexpr std::array<Outcome, kOutcomeCount> kAllOutcomes{Outcome::Green, Outcome::Red,
                                                                 Outcome::NoFlash};

/// The three switch positions of a detector.
enum class Setting : std::uint8_t { S1 = 0, S2 = 1, S3 = 2 };

inline constexpr std::size_t kSettingCount = 3;
inline constexpr std::array<Setting, kSettingCount> kAllSettings{Setting::S1, Setting::S2,
                                                                 Setting::S3};

/// Where a detector's switch actually landed on one trial. `Failure` is the
/// apparatus-side "position 0"; it is deliberately not a Setting.
enum class SwitchPosition : std::uint8_t { Failure = 0, S1 = 1, S2 = 2, S3 = 3 };

inline constexpr std::size_t kSwitchPositionCount = 4;
inline constexpr std::array<SwitchPosition, kSwitchPositionCount> kAllSwitchPositions{
    SwitchPosition::Failure, SwitchPosition::S1, SwitchPosition::S2, SwitchPosition::S3};

constexpr SwitchPosition to_position(Setting s) noexcept
{
    return static_cast<SwitchPosition>(static_cast<std::uint8_t>(s) + 1);
}

constexpr std::optional<Setting> to_setting(SwitchPosition p) noexcept
{
    if (p == SwitchPosition::Failure) return std::nullopt;
    return static_cast<Setting>(static_cast<std::uint8_t>(p) - 1);
}

constexpr bool is_flash(Outcome o) noexcept { return o != Outcome::NoFlash; }

char to_char(Outcome o) noexcept;
/// '1'..'3' for settings, '0' for the failure position.
char to_char(SwitchPosition p) noexcept;
std::optional<Outcome> outcome_from_char(char c) noexcept;

enum class InstructionClass { Homogeneous, TwoOne, WithNoFlash };

std::string_view to_string(InstructionClass c) noexcept;

/// Hidden variable of one particle: the outcome it produces at each setting.
class InstructionSet
{
  public:
    constexpr InstructionSet() noexcept = default;
    constexpr explicit InstructionSet(std::array<Outcome, kSettingCount> outcomes) noexcept
        : outcomes_(outcomes)
    {
    }

    /// Parses the 3-character encoding over {G,R,N}, ordered S1,S2,S3.
    static InstructionSet parse(std::string_view text);

    /// Every one of the 27 possible instruction sets, in lexicographic
    /// order over (Green, Red, NoFlash).
    static std::vector<InstructionSet> all();

    constexpr Outcome outcome_at(Setting k) const noexcept
    {
        return outcomes_[static_cast<std::size_t>(k)];
    }

    constexpr const std::array<Outcome, kSettingCount>& outcomes() const noexcept
    {
        return outcomes_;
    }

    bool has_no_flash() const noexcept;
    std::string to_string() const;

    friend constexpr bool operator==(const InstructionSet&, const InstructionSet&) = default;
    friend constexpr auto operator<=>(const InstructionSet&, const InstructionSet&) = default;

  private:
    std::array<Outcome, kSettingCount> outcomes_{Outcome::Green, Outcome::Green, Outcome::Green};
};

constexpr Outcome outcome_for(const InstructionSet& s, Setting k) noexcept
{
    return s.outcome_at(k);
}

InstructionClass classify(const InstructionSet& s) noexcept;

struct PairState
{
    InstructionSet alice;
    InstructionSet bob;

    /// Parses "XXX-YYY" (Alice-Bob).
    static PairState parse(std::string_view text);
    std::string to_string() const;

    /// Same instruction sets with the particles exchanged.
    PairState swapped() const noexcept { return {bob, alice}; }

    friend constexpr bool operator==(const PairState&, const PairState&) = default;
    friend constexpr auto operator<=>(const PairState&, const PairState&) = default;
};

/// Both particles carry the same instruction set.
inline PairState identical_pair(const InstructionSet& s) noexcept { return {s, s}; }

struct WeightedState
{
    PairState state;
    Rational weight;
};

/// Probability distribution over pair states emitted by the source. May hold
/// invalid data; see validate().
struct SourceDistribution
{
    std::vector<WeightedState> entries;

    Rational total_weight() const;
};

enum class ConfigErrorKind {
    NegativeWeight,
    WeightSumMismatch,
    EmptyDistribution,
    DuplicateState,
    InvalidProbability,
    UnknownBuiltin,
    Malformed,
};

std::string_view to_string(ConfigErrorKind kind) noexcept;

/// A configuration that cannot be used for an experiment.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(ConfigErrorKind kind, const std::string& detail);

    ConfigErrorKind kind() const noexcept { return kind_; }

  private:
    ConfigErrorKind kind_;
};

/// Absolute tolerance on |sum of weights - 1|.
inline constexpr double kWeightSumTolerance = 1e-12;

/// Returns the first violated invariant, or nullopt when `d` is a valid
/// distribution. The error message names the offending entry.
std::optional<ConfigError> validate(const SourceDistribution& d);

/// Builtin sources: "table1_uniform", "two_one_uniform", "all_eight_uniform",
/// and "single(XXX-YYY)". Throws ConfigError(UnknownBuiltin) otherwise.
SourceDistribution builtin_distribution(std::string_view name);

/// The twelve pair states that reproduce both perfect same-setting correlation
/// and a 1/4 different-setting same-colour rate, in canonical row order.
const std::vector<PairState>& table1_states();

/// RRG, RGR, RGG, GRR, GRG, GGR.
const std::vector<InstructionSet>& two_one_sets();

/// The eight instruction sets without a no-flash entry.
const std::vector<InstructionSet>& no_flash_free_sets();

/// Detector-side loss: with probability `failure_probability` the switch lands
/// on position 0 and the detector stays dark; otherwise each setting has
/// probability (1 - p)/3.
struct DetectorModel
{
    Rational failure_probability{0};

    Rational fair_efficiency() const { return Rational(1) - failure_probability; }
    /// Probability that the switch lands on `pos`.
    Rational position_probability(SwitchPosition pos) const;
};

struct ExperimentConfig
{
    SourceDistribution source;
    DetectorModel detector_a;
    DetectorModel detector_b;
    /// Fixed law: each side picks its setting independently and uniformly.
    static constexpr std::string_view settings_law = "independent_uniform";
};

/// Throws ConfigError if the source or either detector is invalid.
void require_valid(const ExperimentConfig& config);

struct TrialRecord
{
    SwitchPosition setting_a;
    SwitchPosition setting_b;
    Outcome outcome_a;
    Outcome outcome_b;

    /// Two digits and two letters, e.g. "21GR"; position 0 renders as '0'.
    std::string to_string() const;

    friend constexpr bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Deterministic outcome of one side given where its switch landed.
constexpr Outcome detect(const InstructionSet& s, SwitchPosition pos) noexcept
{
    auto setting = to_setting(pos);
    return setting ? outcome_for(s, *setting) : Outcome::NoFlash;
}

constexpr TrialRecord evaluate_trial(const PairState& state, SwitchPosition a,
                                     SwitchPosition b) noexcept
{
    return {a, b, detect(state.alice, a), detect(state.bob, b)};
}

}  // namespace mermin
