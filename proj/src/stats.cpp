#include "mermin/stats.hpp"

#include <cmath>
#include <limits>

namespace mermin {
namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Lower series: P(a, x) = e^{-x} x^a / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n)).
double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), modified Lentz evaluation.
double gamma_q_continued_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

bool ComparisonReport::all_pass() const noexcept
{
    for (const auto& r : rows) {
        if (!r.pass) return false;
    }
    return true;
}

std::optional<ComparisonRow> compare_field(const std::string& name, const MaybeRational& exact,
                                           const MaybeEstimate& estimate, double threshold)
{
    if (!exact && !estimate) return std::nullopt;

    ComparisonRow row;
    row.name = name;
    row.exact = exact;
    row.estimate = estimate;
    if (!exact || !estimate) {
        row.note = exact ? "estimate undefined" : "exact value undefined";
        row.z = std::numeric_limits<double>::quiet_NaN();
        return row;
    }

    const double target = to_double(*exact);
    const double diff = estimate->value - target;
    row.exact_match = diff == 0.0;
    if (row.exact_match) {
        row.z = 0.0;
    } else if (estimate->std_error > 0.0) {
        row.z = diff / estimate->std_error;
    } else {
        row.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    row.pass = row.exact_match || std::fabs(row.z) <= threshold;
    return row;
}

ComparisonReport compare(const CaseStats& exact, const EstimatedStats& estimate, double threshold)
{
    if (!(threshold > 0)) {
        throw std::invalid_argument("comparison threshold must be positive");
    }
    ComparisonReport report;
    report.threshold = threshold;
    const auto exact_fields = exact.fields();
    const auto est_fields = estimate.fields();
    for (std::size_t i = 0; i < exact_fields.size(); ++i) {
        if (auto row = compare_field(exact_fields[i].first, exact_fields[i].second,
                                     est_fields[i].second, threshold)) {
            report.rows.push_back(std::move(*row));
        }
    }
    return report;
}

IndependenceTestResult settings_independence_test(
    const std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount>& observed)
{
    std::uint64_t total = 0;
    for (const auto& row : observed) {
        for (auto c : row) total += c;
    }
    if (total == 0) {
        throw NoCoincidences("settings independence test needs at least one coincidence");
    }

    IndependenceTestResult result;
    result.observed = observed;
    const double expected = static_cast<double>(total) / (kSettingCount * kSettingCount);
    double statistic = 0.0;
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        for (std::size_t j = 0; j < kSettingCount; ++j) {
            result.expected[i][j] = expected;
            const double diff = static_cast<double>(observed[i][j]) - expected;
            statistic += diff * diff / expected;
        }
    }
    result.statistic = statistic;
    result.degrees_of_freedom = static_cast<int>(kSettingCount * kSettingCount) - 1;
    result.p_value = chi_square_survival(statistic, result.degrees_of_freedom);
    return result;
}

IndependenceTestResult settings_independence_test(const TallyCounts& t)
{
    std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount> observed{};
    for (Setting a : kAllSettings) {
        for (Setting b : kAllSettings) {
            std::uint64_t c = 0;
            for (Outcome oa : {Outcome::Green, Outcome::Red}) {
                for (Outcome ob : {Outcome::Green, Outcome::Red}) {
                    c += t.count(to_position(a), to_position(b), oa, ob);
                }
            }
            observed[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = c;
        }
    }
    return settings_independence_test(observed);
}

double regularized_gamma_q(double a, double x)
{
    if (!(a > 0) || !(x >= 0) || std::isnan(a) || std::isnan(x)) {
        throw std::domain_error("regularized_gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

}  // namespace mermin
