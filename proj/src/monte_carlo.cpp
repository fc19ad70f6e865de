#include "mermin/monte_carlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <thread>

namespace mermin {
namespace {

std::uint64_t checked_add(std::uint64_t x, std::uint64_t y)
{
    if (x > std::numeric_limits<std::uint64_t>::max() - y) {
        throw std::overflow_error("tally count overflows 64 bits");
    }
    return x + y;
}

}  // namespace

void TallyCounts::record(const TrialRecord& r, std::uint64_t times)
{
    auto& c = counts_[cell_index(r.setting_a, r.setting_b, r.outcome_a, r.outcome_b)];
    c = checked_add(c, times);
    n_trials_ = checked_add(n_trials_, times);
}

TallyCounts TallyCounts::from_cells(const std::array<std::uint64_t, kCellCount>& cells)
{
    TallyCounts t;
    t.counts_ = cells;
    for (auto c : cells) t.n_trials_ = checked_add(t.n_trials_, c);
    return t;
}

TallyCounts merge(const TallyCounts& t1, const TallyCounts& t2)
{
    TallyCounts out;
    for (std::size_t i = 0; i < kCellCount; ++i) {
        out.counts_[i] = checked_add(t1.counts_[i], t2.counts_[i]);
    }
    out.n_trials_ = checked_add(t1.n_trials_, t2.n_trials_);
    return out;
}

TrialSampler::TrialSampler(const ExperimentConfig& config)
{
    require_valid(config);
    const auto& entries = config.source.entries;
    const Rational total = config.source.total_weight();

    Rational running{0};
    for (const auto& e : entries) {
        running += e.weight;
        cumulative_.push_back(to_double(running / total));
        std::array<Outcome, kSwitchPositionCount> a{}, b{};
        for (SwitchPosition pos : kAllSwitchPositions) {
            a[static_cast<std::size_t>(pos)] = detect(e.state.alice, pos);
            b[static_cast<std::size_t>(pos)] = detect(e.state.bob, pos);
        }
        alice_.push_back(a);
        bob_.push_back(b);
    }
    // Zero-weight tail entries must stay unreachable; the last positive
    // entry absorbs the top of the unit interval.
    for (std::size_t i = cumulative_.size(); i-- > 0;) {
        cumulative_[i] = 2.0;
        if (entries[i].weight > 0) break;
    }
    failure_a_ = to_double(config.detector_a.failure_probability);
    failure_b_ = to_double(config.detector_b.failure_probability);
}

std::size_t TrialSampler::pick_state(double u) const noexcept
{
    if (cumulative_.size() <= 16) {
        std::size_t k = 0;
        while (u >= cumulative_[k]) ++k;
        return k;
    }
    return static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
}

SwitchPosition TrialSampler::pick_position(const CounterRng& rng, std::uint64_t base,
                                           double failure) const noexcept
{
    if (failure > 0 && CounterRng::to_unit(rng.draw(base)) < failure) {
        return SwitchPosition::Failure;
    }
    return static_cast<SwitchPosition>(1 + CounterRng::to_below(rng.draw(base + 1), 3));
}

TrialRecord TrialSampler::trial(const CounterRng& rng, std::uint64_t index) const noexcept
{
    // Draw layout: 0 state, 1-2 side A (failure, setting), 3-4 side B.
    const std::uint64_t base = index * kDrawsPerTrial;
    const std::size_t k = pick_state(CounterRng::to_unit(rng.draw(base)));
    const SwitchPosition a = pick_position(rng, base + 1, failure_a_);
    const SwitchPosition b = pick_position(rng, base + 3, failure_b_);
    return {a, b, alice_[k][static_cast<std::size_t>(a)], bob_[k][static_cast<std::size_t>(b)]};
}

void TrialSampler::run_range(const CounterRng& rng, std::uint64_t first, std::uint64_t last,
                             TallyCounts& tally) const
{
    std::array<std::uint64_t, kCellCount> local{};
    for (std::uint64_t i = first; i < last; ++i) {
        const TrialRecord r = trial(rng, i);
        ++local[cell_index(r.setting_a, r.setting_b, r.outcome_a, r.outcome_b)];
    }
    tally = merge(tally, TallyCounts::from_cells(local));
}

std::uint32_t worker_cap_from_environment()
{
    if (const char* env = std::getenv("MERMIN_SIM_THREADS")) {
        std::string_view text(env);
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TallyCounts run_trials(const SimulationPlan& plan)
{
    if (plan.n_streams == 0) {
        throw std::invalid_argument("n_streams must be at least 1");
    }
    const TrialSampler sampler(plan.config);
    const CounterRng rng(plan.seed);

    const std::uint64_t streams = plan.n_streams;
    auto bound = [&](std::uint64_t s) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(plan.n_trials) * s) / streams);
    };

    std::vector<TallyCounts> partial(streams);
    const std::uint32_t cap = plan.max_workers ? plan.max_workers : worker_cap_from_environment();
    const std::uint64_t workers = std::min<std::uint64_t>(cap, streams);

    auto work = [&](std::uint64_t worker) {
        for (std::uint64_t s = worker; s < streams; s += workers) {
            sampler.run_range(rng, bound(s), bound(s + 1), partial[s]);
        }
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::uint64_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
    }

    TallyCounts total;
    for (const auto& t : partial) total = merge(total, t);
    return total;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z)
{
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    const double low = k == 0 ? 0.0 : std::max(0.0, centre - half);
    const double high = k == n ? 1.0 : std::min(1.0, centre + half);
    return {low, high};
}

MaybeEstimate proportion_estimate(std::uint64_t k, std::uint64_t n, double scale)
{
    if (n == 0) return std::nullopt;
    const double q = static_cast<double>(k) / static_cast<double>(n);
    const auto [lo, hi] = wilson_interval(k, n);
    Estimate e;
    e.value = scale * q;
    e.std_error = scale * std::sqrt(q * (1.0 - q) / static_cast<double>(n));
    e.ci_low = scale * lo;
    e.ci_high = scale * hi;
    e.successes = k;
    e.trials = n;
    return e;
}

std::vector<std::pair<std::string, MaybeEstimate>> EstimatedStats::fields() const
{
    std::vector<std::pair<std::string, MaybeEstimate>> out{
        {"p_same_case_a", p_same_case_a}, {"p_same_case_b", p_same_case_b},
        {"eta_a", eta_a},                 {"eta_b", eta_b},
        {"eta_u_a", eta_u_a},             {"eta_u_b", eta_u_b},
        {"eta_f_a", eta_f_a},             {"eta_f_b", eta_f_b},
    };
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        for (std::size_t j = 0; j < kSettingCount; ++j) {
            out.emplace_back("coincidence_rate_" + std::to_string(i + 1) + std::to_string(j + 1),
                             coincidence_rate[i][j]);
        }
    }
    return out;
}

EstimatedStats estimate_stats(const TallyCounts& t)
{
    std::uint64_t flash_a = 0, flash_b = 0, armed_a = 0, armed_b = 0;
    std::uint64_t same_a = 0, both_a = 0, same_b = 0, both_b = 0;
    std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount> coincidences{};

    const auto& cells = t.cells();
    for (std::size_t idx = 0; idx < kCellCount; ++idx) {
        const std::uint64_t c = cells[idx];
        if (c == 0) continue;
        const TrialRecord r = cell_record(idx);
        const auto sa = to_setting(r.setting_a);
        const auto sb = to_setting(r.setting_b);
        if (sa) armed_a += c;
        if (sb) armed_b += c;
        // A flash on a failed switch is impossible; such cells are ignored
        // rather than trusted.
        const bool fa = sa && is_flash(r.outcome_a);
        const bool fb = sb && is_flash(r.outcome_b);
        if (fa) flash_a += c;
        if (fb) flash_b += c;
        if (!fa || !fb) continue;
        coincidences[static_cast<std::size_t>(*sa)][static_cast<std::size_t>(*sb)] += c;
        const bool same_colour = r.outcome_a == r.outcome_b;
        if (*sa == *sb) {
            both_a += c;
            if (same_colour) same_a += c;
        } else {
            both_b += c;
            if (same_colour) same_b += c;
        }
    }

    const std::uint64_t n = t.n_trials();
    EstimatedStats s;
    s.p_same_case_a = proportion_estimate(same_a, both_a);
    s.p_same_case_b = proportion_estimate(same_b, both_b);
    s.eta_a = proportion_estimate(flash_a, n);
    s.eta_b = proportion_estimate(flash_b, n);
    s.eta_u_a = proportion_estimate(flash_a, armed_a);
    s.eta_u_b = proportion_estimate(flash_b, armed_b);
    s.eta_f_a = proportion_estimate(armed_a, n);
    s.eta_f_b = proportion_estimate(armed_b, n);
    const double nominal_scale = static_cast<double>(kSettingCount * kSettingCount);
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        for (std::size_t j = 0; j < kSettingCount; ++j) {
            s.coincidence_rate[i][j] = proportion_estimate(coincidences[i][j], n, nominal_scale);
        }
    }
    return s;
}

}  // namespace mermin
