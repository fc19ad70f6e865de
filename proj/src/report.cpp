#include "mermin/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mermin/config_io.hpp"

namespace mermin {
namespace {

using nlohmann::json;

std::string float_or_nan(const MaybeRational& v)
{
    return v ? format_double(to_double(*v)) : "nan";
}

std::string cell_prefix(const TrialRecord& r)
{
    std::string s;
    s += to_char(r.setting_a);
    s += ',';
    s += to_char(r.setting_b);
    s += ',';
    s += to_char(r.outcome_a);
    s += ',';
    s += to_char(r.outcome_b);
    return s;
}

}  // namespace

std::string format_double(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

json to_json(const MaybeRational& value)
{
    if (!value) return {{"undefined", true}};
    return {{"exact", to_fraction_string(*value)}, {"float", to_double(*value)}};
}

json to_json(const MaybeEstimate& value)
{
    if (!value) return {{"undefined", true}};
    return {{"estimate", value->value},   {"std_error", value->std_error},
            {"ci_low", value->ci_low},    {"ci_high", value->ci_high},
            {"successes", value->successes}, {"trials", value->trials}};
}

json to_json(const CaseStats& stats)
{
    json out = json::object();
    for (const auto& [name, value] : stats.fields()) out[name] = to_json(value);
    out["mean_coincidence_rate"] = to_json(stats.mean_coincidence_rate());
    return out;
}

json to_json(const EstimatedStats& stats)
{
    json out = json::object();
    for (const auto& [name, value] : stats.fields()) out[name] = to_json(value);
    return out;
}

json to_json(const JointTable& table)
{
    json cells = json::array();
    const auto all = table.cells();
    for (std::size_t i = 0; i < kCellCount; ++i) {
        if (all[i] == 0) continue;
        cells.push_back({{"cell", cell_record(i).to_string()},
                         {"exact", to_fraction_string(all[i])},
                         {"float", to_double(all[i])}});
    }
    return {{"total", to_fraction_string(table.total())}, {"cells", cells}};
}

json to_json(const TallyCounts& tally)
{
    json cells = json::object();
    for (std::size_t i = 0; i < kCellCount; ++i) {
        if (tally.cells()[i] != 0) cells[cell_record(i).to_string()] = tally.cells()[i];
    }
    return {{"n_trials", tally.n_trials()}, {"cells", cells}};
}

json to_json(const ComparisonReport& report)
{
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row = {{"field", r.name},
                    {"exact", to_json(r.exact)},
                    {"estimate", to_json(r.estimate)},
                    {"z", format_double(r.z)},
                    {"exact_match", r.exact_match},
                    {"pass", r.pass}};
        if (!r.note.empty()) row["note"] = r.note;
        rows.push_back(std::move(row));
    }
    return {{"threshold", report.threshold}, {"all_pass", report.all_pass()}, {"rows", rows}};
}

json to_json(const IndependenceTestResult& result)
{
    json observed = json::array();
    json expected = json::array();
    for (std::size_t i = 0; i < kSettingCount; ++i) {
        observed.push_back(result.observed[i]);
        expected.push_back(result.expected[i]);
    }
    return {{"statistic", result.statistic},
            {"degrees_of_freedom", result.degrees_of_freedom},
            {"p_value", result.p_value},
            {"observed", observed},
            {"expected", expected}};
}

json to_json(const DetectorInvarianceReport& report)
{
    json points = json::array();
    for (const auto& p : report.points) {
        points.push_back({{"failure_probability", to_fraction_string(p.failure_probability)},
                          {"stats", to_json(p.stats)}});
    }
    return {{"conditionals_invariant", report.conditionals_invariant},
            {"eta_u_invariant", report.eta_u_invariant},
            {"coincidence_scales", report.coincidence_scales},
            {"eta_factorizes", report.eta_factorizes},
            {"invariant", report.invariant()},
            {"points", points}};
}

std::string joint_table_csv(const JointTable& table)
{
    std::ostringstream out;
    out << "setting_a,setting_b,outcome_a,outcome_b,probability,probability_float\n";
    const auto all = table.cells();
    for (std::size_t i = 0; i < kCellCount; ++i) {
        out << cell_prefix(cell_record(i)) << ',' << to_fraction_string(all[i]) << ','
            << format_double(to_double(all[i])) << '\n';
    }
    return out.str();
}

std::string case_stats_csv(const CaseStats& stats)
{
    std::ostringstream out;
    out << "field,exact,float\n";
    auto row = [&](const std::string& name, const MaybeRational& v) {
        out << name << ',' << (v ? to_fraction_string(*v) : "undefined") << ',' << float_or_nan(v)
            << '\n';
    };
    for (const auto& [name, value] : stats.fields()) row(name, value);
    row("mean_coincidence_rate", stats.mean_coincidence_rate());
    return out.str();
}

std::string tally_csv(const TallyCounts& tally)
{
    std::ostringstream out;
    out << "setting_a,setting_b,outcome_a,outcome_b,count\n";
    for (std::size_t i = 0; i < kCellCount; ++i) {
        out << cell_prefix(cell_record(i)) << ',' << tally.cells()[i] << '\n';
    }
    return out.str();
}

std::string estimates_csv(const EstimatedStats& stats)
{
    std::ostringstream out;
    out << "field,estimate,std_error,ci_low,ci_high,successes,trials\n";
    for (const auto& [name, e] : stats.fields()) {
        if (!e) {
            out << name << ",nan,nan,nan,nan,0,0\n";
            continue;
        }
        out << name << ',' << format_double(e->value) << ',' << format_double(e->std_error) << ','
            << format_double(e->ci_low) << ',' << format_double(e->ci_high) << ',' << e->successes
            << ',' << e->trials << '\n';
    }
    return out.str();
}

std::string comparison_csv(const ComparisonReport& report)
{
    std::ostringstream out;
    out << "field,exact,estimate,std_error,z,pass\n";
    for (const auto& r : report.rows) {
        out << r.name << ',' << (r.exact ? to_fraction_string(*r.exact) : "undefined") << ','
            << (r.estimate ? format_double(r.estimate->value) : "nan") << ','
            << (r.estimate ? format_double(r.estimate->std_error) : "nan") << ','
            << format_double(r.z) << ',' << (r.pass ? "pass" : "fail") << '\n';
    }
    return out.str();
}

std::string scan_csv(const std::vector<ScanRow>& rows)
{
    std::ostringstream out;
    out << "p,eta_a,eta_b,eta_u_a,eta_u_b,p_same_a,p_same_b,mean_coincidence_rate\n";
    for (const auto& r : rows) {
        const CaseStats& s = r.stats;
        out << format_double(to_double(r.p)) << ',' << float_or_nan(s.eta_a) << ','
            << float_or_nan(s.eta_b) << ',' << float_or_nan(s.eta_u_a) << ','
            << float_or_nan(s.eta_u_b) << ',' << float_or_nan(s.p_same_case_a) << ','
            << float_or_nan(s.p_same_case_b) << ',' << float_or_nan(s.mean_coincidence_rate())
            << '\n';
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + path.parent_path().string()
                          + "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

}  // namespace mermin
