#pragma once

// Machine-readable renderings of analyzer and simulator results. Column
// orders are fixed; floats use the shortest round-trip representation so
// identical inputs give byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "mermin/exact_analyzer.hpp"
#include "mermin/monte_carlo.hpp"
#include "mermin/stats.hpp"

namespace mermin {

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

/// {"exact": "num/den", "float": x} or {"undefined": true}.
nlohmann::json to_json(const MaybeRational& value);
nlohmann::json to_json(const MaybeEstimate& value);
nlohmann::json to_json(const CaseStats& stats);
nlohmann::json to_json(const EstimatedStats& stats);
/// Non-zero cells only, in cell-index order.
nlohmann::json to_json(const JointTable& table);
nlohmann::json to_json(const TallyCounts& tally);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const IndependenceTestResult& result);
nlohmann::json to_json(const DetectorInvarianceReport& report);

/// setting_a,setting_b,outcome_a,outcome_b,probability,probability_float
std::string joint_table_csv(const JointTable& table);
/// field,exact,float
std::string case_stats_csv(const CaseStats& stats);
/// setting_a,setting_b,outcome_a,outcome_b,count
std::string tally_csv(const TallyCounts& tally);
/// field,estimate,std_error,ci_low,ci_high,successes,trials
std::string estimates_csv(const EstimatedStats& stats);
/// field,exact,estimate,std_error,z,pass
std::string comparison_csv(const ComparisonReport& report);

struct ScanRow
{
    Rational p;
    CaseStats stats;
};

/// p,eta_a,eta_b,eta_u_a,eta_u_b,p_same_a,p_same_b,mean_coincidence_rate
std::string scan_csv(const std::vector<ScanRow>& rows);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mermin
