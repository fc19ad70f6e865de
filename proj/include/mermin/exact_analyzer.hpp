#pragma once

// Exact enumeration of the joint distribution over
// (switch position pair, outcome pair) for an ExperimentConfig, and the
// conditional statistics computed from it. All arithmetic is rational.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mermin/core_model.hpp"

namespace mermin {

/// Flat index of a (position_a, position_b, outcome_a, outcome_b) cell.
inline constexpr std::size_t kCellCount =
    kSwitchPositionCount * kSwitchPositionCount * kOutcomeCount * kOutcomeCount;

constexpr std::size_t cell_index(SwitchPosition a, SwitchPosition b, Outcome oa, Outcome ob) noexcept
{
    return ((static_cast<std::size_t>(a) * kSwitchPositionCount + static_cast<std::size_t>(b))
                * kOutcomeCount
            + static_cast<std::size_t>(oa))
               * kOutcomeCount
           + static_cast<std::size_t>(ob);
}

constexpr TrialRecord cell_record(std::size_t index) noexcept
{
    const auto ob = static_cast<Outcome>(index % kOutcomeCount);
    index /= kOutcomeCount;
    const auto oa = static_cast<Outcome>(index % kOutcomeCount);
    index /= kOutcomeCount;
    const auto b = static_cast<SwitchPosition>(index % kSwitchPositionCount);
    const auto a = static_cast<SwitchPosition>(index / kSwitchPositionCount);
    return {a, b, oa, ob};
}

/// Joint probability of every (position pair, outcome pair) cell.
class JointTable
{
  public:
    JointTable() = default;

    const Rational& prob(SwitchPosition a, SwitchPosition b, Outcome oa, Outcome ob) const
    {
        return cells_[cell_index(a, b, oa, ob)];
    }
    const Rational& prob(const TrialRecord& r) const
    {
        return prob(r.setting_a, r.setting_b, r.outcome_a, r.outcome_b);
    }
    std::span<const Rational, kCellCount> cells() const noexcept { return cells_; }

    void add(const TrialRecord& r, const Rational& p)
    {
        cells_[cell_index(r.setting_a, r.setting_b, r.outcome_a, r.outcome_b)] += p;
    }

    Rational total() const;

  private:
    std::array<Rational, kCellCount> cells_{};
};

/// A probability that may be undefined because its conditioning event has
/// probability zero.
using MaybeRational = std::optional<Rational>;

using SettingPairTable = std::array<std::array<MaybeRational, kSettingCount>, kSettingCount>;

struct CaseStats
{
    /// P(same colour | equal settings, both flashed).
    MaybeRational p_same_case_a;
    /// P(same colour | different settings, both flashed).
    MaybeRational p_same_case_b;
    /// P(detector flashes).
    MaybeRational eta_a, eta_b;
    /// P(detector flashes | switch not on position 0).
    MaybeRational eta_u_a, eta_u_b;
    /// P(switch not on position 0) = 1 - p.
    MaybeRational eta_f_a, eta_f_b;
    /// P(both flash | nominal setting pair (i, j)), with the nominal pair drawn
    /// uniformly and detector failure independent of it.
    SettingPairTable coincidence_rate;

    /// Every field as (name, value) in a fixed order; coincidence cells are
    /// named "coincidence_rate_ij".
    std::vector<std::pair<std::string, MaybeRational>> fields() const;

    /// Mean of the nine coincidence rates, or nullopt if any is undefined.
    MaybeRational mean_coincidence_rate() const;

    friend bool operator==(const CaseStats&, const CaseStats&) = default;
};

/// A conditioning event had probability zero where a value was required.
class DegenerateConditioning : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Enumerates every source entry against every pair of switch positions.
/// Weights are renormalized by their exact sum. Throws ConfigError if the
/// config is invalid.
JointTable enumerate_joint(const ExperimentConfig& config);

/// Conditional statistics on the double-flash sub-ensemble. Throws
/// std::invalid_argument if the table does not sum to exactly 1.
CaseStats conditional_stats(const JointTable& table);

/// Fraction of the six different-setting pairs that give equal colours when
/// both particles carry `s`. Throws std::domain_error if `s` has a no-flash
/// entry.
Rational case_b_same_fraction(const InstructionSet& s);

struct CaseBMinimum
{
    Rational value;
    /// Identical-pair instruction sets attaining the minimum.
    std::vector<InstructionSet> support;
    /// Per-vertex values, in no_flash_free_sets() order.
    std::vector<std::pair<InstructionSet, Rational>> vertices;
};

/// Minimum different-setting same-colour rate over all sources that emit
/// identical no-flash-free pairs. The objective is linear in the weights, so
/// it is attained on a set of vertices.
CaseBMinimum min_case_b_no_noflash();

struct InvariancePoint
{
    Rational failure_probability;
    CaseStats stats;
};

struct DetectorInvarianceReport
{
    std::vector<InvariancePoint> points;
    bool conditionals_invariant = false;     ///< p_same_case_a, p_same_case_b
    bool eta_u_invariant = false;
    /// coincidence_rate(p) == coincidence_rate(p0) * (1-p)^2 / (1-p0)^2 cellwise.
    bool coincidence_scales = false;
    /// eta == eta_u * eta_f on both detectors at every point.
    bool eta_factorizes = false;

    bool invariant() const noexcept
    {
        return conditionals_invariant && eta_u_invariant && coincidence_scales && eta_factorizes;
    }
};

/// Re-evaluates `config` with both detectors' failure probability set to each
/// value of `p_values`. Throws DegenerateConditioning if any p is >= 1 and
/// std::invalid_argument if any p is negative or the list is empty.
DetectorInvarianceReport detector_invariance_check(const ExperimentConfig& config,
                                                   std::span<const Rational> p_values);

}  // namespace mermin
