#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mermin/exact_analyzer.hpp"
#include "mermin/monte_carlo.hpp"

namespace mermin {

inline constexpr double kDefaultZThreshold = 5.0;

struct ComparisonRow
{
    std::string name;
    MaybeRational exact;
    MaybeEstimate estimate;
    /// (estimate - exact) / std_error; infinite when the estimate has zero
    /// variance and differs from the exact value, 0 when they are equal.
    double z = 0;
    bool exact_match = false;
    bool pass = false;
    /// Set when only one side is defined.
    std::string note;
};

struct ComparisonReport
{
    double threshold = kDefaultZThreshold;
    std::vector<ComparisonRow> rows;

    bool all_pass() const noexcept;
};

/// One field: pass iff |z| <= threshold or both values are exactly equal.
/// Returns nullopt when both sides are undefined.
std::optional<ComparisonRow> compare_field(const std::string& name, const MaybeRational& exact,
                                           const MaybeEstimate& estimate, double threshold);

/// Throws std::invalid_argument if threshold <= 0.
ComparisonReport compare(const CaseStats& exact, const EstimatedStats& estimate,
                         double threshold = kDefaultZThreshold);

class NoCoincidences : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

struct IndependenceTestResult
{
    double statistic = 0;
    int degrees_of_freedom = 8;
    double p_value = 1;
    std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount> observed{};
    std::array<std::array<double, kSettingCount>, kSettingCount> expected{};
};

/// Pearson chi-square of double-flash counts per setting pair against a
/// uniform split of the total. Throws NoCoincidences on an empty table.
IndependenceTestResult settings_independence_test(const TallyCounts& t);

/// Chi-square test on an explicit 3x3 table of coincidence counts.
IndependenceTestResult settings_independence_test(
    const std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount>& observed);

/// Upper regularized incomplete gamma function Q(a, x) = Gamma(a, x) / Gamma(a).
/// Throws std::domain_error if a <= 0 or x < 0.
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_survival(double statistic, int dof)
{
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace mermin
