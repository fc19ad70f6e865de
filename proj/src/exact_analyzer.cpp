#include "mermin/exact_analyzer.hpp"

#include <algorithm>

namespace mermin {
namespace {

MaybeRational ratio(const Rational& num, const Rational& den)
{
    if (den == 0) return std::nullopt;
    return num / den;
}

std::string setting_pair_name(std::size_t i, std::size_t j)
{
    return "coincidence_rate_" + std::to_string(i + 1) + std::to_string(j + 1);
}

}  // namespace

Rational JointTable::total() const
{
    Rational sum{0};
    for (const auto& c : cells_) sum += c;
    return sum;
}

std::vector<std::pair<std::string, MaybeRational>> CaseStats::fields() const
{
    std::vector<std::pair<std::string, MaybeRational>> out{
        {"p_same_case_a", p_same_case_a}, {"p_same_case_b", p_same_case_b},
        {"eta_a", eta_a},                 {"eta_b", eta_b},
        {"eta_u_a", eta_u_a},             {"eta_u_b", eta_u_b},
        {"eta_f_a", eta_f_a},             {"eta_f_b", eta_f_b},
    };
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        for (std::size_t j = 0; j < kSettingCount; ++j) {
            out.emplace_back(setting_pair_name(i, j), coincidence_rate[i][j]);
        }
    }
    return out;
}

MaybeRational CaseStats::mean_coincidence_rate() const
{
    Rational sum{0};
    for (const auto& row : coincidence_rate) {
        for (const auto& c : row) {
            if (!c) return std::nullopt;
            sum += *c;
        }
    }
    return sum / static_cast<int>(kSettingCount * kSettingCount);
}

JointTable enumerate_joint(const ExperimentConfig& config)
{
    require_valid(config);
    const Rational total_weight = config.source.total_weight();

    std::array<Rational, kSwitchPositionCount> pa, pb;
    for (SwitchPosition pos : kAllSwitchPositions) {
        pa[static_cast<std::size_t>(pos)] = config.detector_a.position_probability(pos);
        pb[static_cast<std::size_t>(pos)] = config.detector_b.position_probability(pos);
    }

    JointTable table;
    for (const auto& entry : config.source.entries) {
        if (entry.weight == 0) continue;
        const Rational w = entry.weight / total_weight;
        for (SwitchPosition a : kAllSwitchPositions) {
            const Rational& prob_a = pa[static_cast<std::size_t>(a)];
            if (prob_a == 0) continue;
            for (SwitchPosition b : kAllSwitchPositions) {
                const Rational& prob_b = pb[static_cast<std::size_t>(b)];
                if (prob_b == 0) continue;
                table.add(evaluate_trial(entry.state, a, b), w * prob_a * prob_b);
            }
        }
    }
    return table;
}

CaseStats conditional_stats(const JointTable& table)
{
    if (table.total() != 1) {
        throw std::invalid_argument("joint table sums to " + to_fraction_string(table.total())
                                    + ", expected exactly 1");
    }

    Rational flash_a{0}, flash_b{0}, armed_a{0}, armed_b{0};
    Rational same_a{0}, both_a{0}, same_b{0}, both_b{0};
    std::array<std::array<Rational, kSettingCount>, kSettingCount> coincidences{};

    const auto cells = table.cells();
    for (std::size_t idx = 0; idx < kCellCount; ++idx) {
        const Rational& p = cells[idx];
        if (p == 0) continue;
        const TrialRecord r = cell_record(idx);
        const auto sa = to_setting(r.setting_a);
        const auto sb = to_setting(r.setting_b);
        if (sa) armed_a += p;
        if (sb) armed_b += p;
        if (is_flash(r.outcome_a)) flash_a += p;
        if (is_flash(r.outcome_b)) flash_b += p;

        if (!is_flash(r.outcome_a) || !is_flash(r.outcome_b)) continue;
        // A flash implies the switch was on a real setting.
        coincidences[static_cast<std::size_t>(*sa)][static_cast<std::size_t>(*sb)] += p;
        const bool same_colour = r.outcome_a == r.outcome_b;
        if (*sa == *sb) {
            both_a += p;
            if (same_colour) same_a += p;
        } else {
            both_b += p;
            if (same_colour) same_b += p;
        }
    }

    CaseStats stats;
    stats.p_same_case_a = ratio(same_a, both_a);
    stats.p_same_case_b = ratio(same_b, both_b);
    stats.eta_a = flash_a;
    stats.eta_b = flash_b;
    stats.eta_u_a = ratio(flash_a, armed_a);
    stats.eta_u_b = ratio(flash_b, armed_b);
    stats.eta_f_a = armed_a;
    stats.eta_f_b = armed_b;
    const Rational nominal_pair(1, static_cast<int>(kSettingCount * kSettingCount));
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        for (std::size_t j = 0; j < kSettingCount; ++j) {
            stats.coincidence_rate[i][j] = coincidences[i][j] / nominal_pair;
        }
    }
    return stats;
}

Rational case_b_same_fraction(const InstructionSet& s)
{
    if (s.has_no_flash()) {
        throw std::domain_error("case_b_same_fraction: instruction set " + s.to_string()
                                + " contains a no-flash entry");
    }
    int same = 0;
    int pairs = 0;
    for (Setting a : kAllSettings) {
        for (Setting b : kAllSettings) {
            if (a == b) continue;
            ++pairs;
            if (outcome_for(s, a) == outcome_for(s, b)) ++same;
        }
    }
    return Rational(same, pairs);
}

CaseBMinimum min_case_b_no_noflash()
{
    CaseBMinimum result;
    for (const auto& s : no_flash_free_sets()) {
        result.vertices.emplace_back(s, case_b_same_fraction(s));
    }
    result.value = std::min_element(result.vertices.begin(), result.vertices.end(),
                                    [](const auto& x, const auto& y) { return x.second < y.second; })
                       ->second;
    for (const auto& [s, v] : result.vertices) {
        if (v == result.value) result.support.push_back(s);
    }
    return result;
}

DetectorInvarianceReport detector_invariance_check(const ExperimentConfig& config,
                                                   std::span<const Rational> p_values)
{
    if (p_values.empty()) {
        throw std::invalid_argument("detector_invariance_check: no failure probabilities given");
    }
    for (const auto& p : p_values) {
        if (p < 0) {
            throw std::invalid_argument("detector_invariance_check: negative failure probability "
                                        + to_fraction_string(p));
        }
        if (p >= 1) {
            throw DegenerateConditioning("detector_invariance_check: failure probability "
                                         + to_fraction_string(p)
                                         + " leaves no detected pairs to condition on");
        }
    }

    DetectorInvarianceReport report;
    for (const auto& p : p_values) {
        ExperimentConfig c = config;
        c.detector_a.failure_probability = p;
        c.detector_b.failure_probability = p;
        report.points.push_back({p, conditional_stats(enumerate_joint(c))});
    }

    const auto& base = report.points.front();
    const Rational base_keep = (1 - base.failure_probability) * (1 - base.failure_probability);
    report.conditionals_invariant = true;
    report.eta_u_invariant = true;
    report.coincidence_scales = true;
    report.eta_factorizes = true;
    for (const auto& point : report.points) {
        const CaseStats& s = point.stats;
        report.conditionals_invariant = report.conditionals_invariant
                                        && s.p_same_case_a == base.stats.p_same_case_a
                                        && s.p_same_case_b == base.stats.p_same_case_b;
        report.eta_u_invariant = report.eta_u_invariant && s.eta_u_a == base.stats.eta_u_a
                                 && s.eta_u_b == base.stats.eta_u_b;

        const Rational keep = (1 - point.failure_probability) * (1 - point.failure_probability);
        for (std::size_t i = 0; i < kSettingCount; ++i) {
            for (std::size_t j = 0; j < kSettingCount; ++j) {
                const auto& now = s.coincidence_rate[i][j];
                const auto& then = base.stats.coincidence_rate[i][j];
                if (!now || !then || *now * base_keep != *then * keep) {
                    report.coincidence_scales = false;
                }
            }
        }

        auto factorizes = [](const MaybeRational& eta, const MaybeRational& u, const MaybeRational& f) {
            return eta && u && f && *eta == *u * *f;
        };
        report.eta_factorizes = report.eta_factorizes && factorizes(s.eta_a, s.eta_u_a, s.eta_f_a)
                                && factorizes(s.eta_b, s.eta_u_b, s.eta_f_b);
    }
    return report;
}

}  // namespace mermin
