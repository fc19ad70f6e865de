#pragma once

// Seeded Monte Carlo simulation of an ExperimentConfig. Trial i draws only
// from counter positions owned by i, so a tally is a pure function of
// (config, n_trials, seed) no matter how the trial range is partitioned.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mermin/counter_rng.hpp"
#include "mermin/exact_analyzer.hpp"

namespace mermin {

/// Histogram of trial records. Forms a commutative monoid under merge().
class TallyCounts
{
  public:
    TallyCounts() = default;

    std::uint64_t count(SwitchPosition a, SwitchPosition b, Outcome oa, Outcome ob) const noexcept
    {
        return counts_[cell_index(a, b, oa, ob)];
    }
    std::uint64_t count(const TrialRecord& r) const noexcept
    {
        return count(r.setting_a, r.setting_b, r.outcome_a, r.outcome_b);
    }
    const std::array<std::uint64_t, kCellCount>& cells() const noexcept { return counts_; }
    std::uint64_t n_trials() const noexcept { return n_trials_; }

    void record(const TrialRecord& r, std::uint64_t times = 1);

    /// Builds a tally from raw cell counts; n_trials is their sum. Throws
    /// std::overflow_error if the sum does not fit in 64 bits.
    static TallyCounts from_cells(const std::array<std::uint64_t, kCellCount>& cells);

    friend bool operator==(const TallyCounts&, const TallyCounts&) = default;

  private:
    friend TallyCounts merge(const TallyCounts& t1, const TallyCounts& t2);
    friend class TrialSampler;

    std::array<std::uint64_t, kCellCount> counts_{};
    std::uint64_t n_trials_ = 0;
};

/// Entrywise sum. Throws std::overflow_error if any count would wrap.
TallyCounts merge(const TallyCounts& t1, const TallyCounts& t2);

/// Precomputed sampling tables for one config.
class TrialSampler
{
  public:
    static constexpr std::uint64_t kDrawsPerTrial = 5;

    /// Throws ConfigError if the config is invalid.
    explicit TrialSampler(const ExperimentConfig& config);

    TrialRecord trial(const CounterRng& rng, std::uint64_t index) const noexcept;

    /// Runs trials [first, last) into `tally`.
    void run_range(const CounterRng& rng, std::uint64_t first, std::uint64_t last,
                   TallyCounts& tally) const;

  private:
    std::size_t pick_state(double u) const noexcept;
    SwitchPosition pick_position(const CounterRng& rng, std::uint64_t base, double failure) const noexcept;

    std::vector<double> cumulative_;  // upper thresholds, last one is 1
    std::vector<std::array<Outcome, kSwitchPositionCount>> alice_;  // by SwitchPosition
    std::vector<std::array<Outcome, kSwitchPositionCount>> bob_;
    double failure_a_ = 0;
    double failure_b_ = 0;
};

struct SimulationPlan
{
    ExperimentConfig config;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    /// Number of trial-range partitions; does not affect the result.
    std::uint32_t n_streams = 1;
    /// Worker thread cap; 0 means worker_cap_from_environment().
    std::uint32_t max_workers = 0;
};

/// MERMIN_SIM_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
std::uint32_t worker_cap_from_environment();

/// Throws ConfigError on an invalid config and std::invalid_argument if
/// n_streams is 0.
TallyCounts run_trials(const SimulationPlan& plan);

/// A binomial proportion estimate, optionally scaled by a known constant.
struct Estimate
{
    double value = 0;
    double std_error = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

using MaybeEstimate = std::optional<Estimate>;

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = kZ95);

/// k/n with standard error sqrt(q(1-q)/n) and a Wilson interval, all
/// multiplied by `scale`; nullopt when n is 0.
MaybeEstimate proportion_estimate(std::uint64_t k, std::uint64_t n, double scale = 1.0);

/// Same fields as CaseStats, estimated from relative frequencies.
struct EstimatedStats
{
    MaybeEstimate p_same_case_a;
    MaybeEstimate p_same_case_b;
    MaybeEstimate eta_a, eta_b;
    MaybeEstimate eta_u_a, eta_u_b;
    MaybeEstimate eta_f_a, eta_f_b;
    std::array<std::array<MaybeEstimate, kSettingCount>, kSettingCount> coincidence_rate;

    /// Same names and order as CaseStats::fields().
    std::vector<std::pair<std::string, MaybeEstimate>> fields() const;
};

/// Coincidence rates are 9 * (double flashes at (i, j)) / n_trials, since the
/// nominal setting pair has known probability 1/9.
EstimatedStats estimate_stats(const TallyCounts& t);

}  // namespace mermin
