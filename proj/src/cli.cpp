#include "mermin/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "mermin/config_io.hpp"
#include "mermin/exact_analyzer.hpp"
#include "mermin/monte_carlo.hpp"
#include "mermin/report.hpp"
#include "mermin/stats.hpp"

#ifndef MERMIN_SIM_VERSION
#define MERMIN_SIM_VERSION "0.0.0"
#endif

namespace mermin::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kDefaultTrials = 1'000'000;
constexpr std::uint64_t kDefaultSeed = 1;
constexpr double kIndependenceAlpha = 1e-3;

struct Options
{
    std::string config_path;
    std::string out_dir = ".";
    std::string n_text;
    std::optional<std::uint64_t> seed;
    std::uint32_t streams = 8;
    double threshold = kDefaultZThreshold;
    std::string parameter = "p_both";
    std::vector<std::string> grid;
};

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::uint64_t resolve_trials(const Options& opt, const LoadedConfig& loaded)
{
    if (opt.n_text.empty()) return loaded.n_trials.value_or(kDefaultTrials);
    Rational n;
    try {
        n = parse_rational(opt.n_text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ConfigErrorKind::Malformed, "--n: " + std::string(e.what()));
    }
    if (n < 0 || denominator(n) != 1 || n > Rational(std::numeric_limits<std::uint64_t>::max())) {
        throw ConfigError(ConfigErrorKind::Malformed,
                          "--n must be a non-negative integer, got '" + opt.n_text + "'");
    }
    return numerator(n).convert_to<std::uint64_t>();
}

std::uint64_t resolve_seed(const Options& opt, const LoadedConfig& loaded)
{
    return opt.seed ? *opt.seed : loaded.seed.value_or(kDefaultSeed);
}

class OutputSet
{
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content)
    {
        const fs::path path = dir_ / name;
        write_text_file(path, content);
        paths_.push_back(path.string());
    }

    void write_manifest(const std::string& command, const Options& opt, const LoadedConfig& loaded,
                        json run)
    {
        json manifest = {
            {"tool", "mermin_sim"},
            {"version", MERMIN_SIM_VERSION},
            {"command", command},
            {"config_path", opt.config_path},
            {"config", loaded.snapshot},
            {"run", std::move(run)},
            {"outputs", paths_},
            {"timestamp", utc_timestamp()},
        };
        write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
    }

  private:
    fs::path dir_;
    std::vector<std::string> paths_;
};

std::string fraction_or_undefined(const MaybeRational& v)
{
    return v ? to_fraction_string(*v) : "undefined";
}

void print_case_stats(std::ostream& out, const CaseStats& stats)
{
    out << std::left << std::setw(24) << "field" << std::setw(22) << "exact" << "float\n";
    auto row = [&](const std::string& name, const MaybeRational& v) {
        out << std::left << std::setw(24) << name << std::setw(22) << fraction_or_undefined(v)
            << (v ? format_double(to_double(*v)) : "undefined") << '\n';
    };
    for (const auto& [name, value] : stats.fields()) row(name, value);
    row("mean_coincidence_rate", stats.mean_coincidence_rate());
}

void print_estimates(std::ostream& out, const EstimatedStats& stats)
{
    out << std::left << std::setw(24) << "field" << std::setw(14) << "estimate" << std::setw(14)
        << "std_error" << "95% CI (Wilson)\n";
    for (const auto& [name, e] : stats.fields()) {
        out << std::left << std::setw(24) << name;
        if (!e) {
            out << "undefined\n";
            continue;
        }
        std::ostringstream est, se;
        est << std::setprecision(6) << e->value;
        se << std::setprecision(3) << e->std_error;
        out << std::setw(14) << est.str() << std::setw(14) << se.str() << std::setprecision(6) << '['
            << e->ci_low << ", " << e->ci_high << "]\n";
    }
}

json enumerate_report(const LoadedConfig& loaded, const JointTable& table, const CaseStats& stats)
{
    return {{"config", loaded.snapshot}, {"case_stats", to_json(stats)}, {"joint_table", to_json(table)}};
}

int cmd_enumerate(const Options& opt, std::ostream& out)
{
    const LoadedConfig loaded = load_config(opt.config_path);
    const JointTable table = enumerate_joint(loaded.config);
    const CaseStats stats = conditional_stats(table);

    out << "Exact analysis of " << opt.config_path << "\n";
    print_case_stats(out, stats);

    OutputSet files(opt.out_dir);
    files.write("enumerate.json", enumerate_report(loaded, table, stats).dump(2) + "\n");
    files.write("case_stats.csv", case_stats_csv(stats));
    files.write("joint_table.csv", joint_table_csv(table));
    files.write_manifest("enumerate", opt, loaded, json::object());
    return kSuccess;
}

int cmd_simulate(const Options& opt, std::ostream& out)
{
    const LoadedConfig loaded = load_config(opt.config_path);
    SimulationPlan plan{loaded.config, resolve_trials(opt, loaded), resolve_seed(opt, loaded),
                        opt.streams};
    const TallyCounts tally = run_trials(plan);
    const EstimatedStats est = estimate_stats(tally);

    out << "Simulated " << tally.n_trials() << " trials of " << opt.config_path << " (seed "
        << plan.seed << ", " << plan.n_streams << " streams)\n";
    print_estimates(out, est);

    OutputSet files(opt.out_dir);
    files.write("tally.csv", tally_csv(tally));
    files.write("estimates.csv", estimates_csv(est));
    files.write("simulate.json", json{{"config", loaded.snapshot},
                                      {"seed", plan.seed},
                                      {"n_trials", plan.n_trials},
                                      {"tally", to_json(tally)},
                                      {"estimates", to_json(est)}}
                                         .dump(2)
                                     + "\n");
    files.write_manifest("simulate", opt, loaded,
                         {{"seed", plan.seed}, {"n_trials", plan.n_trials}, {"n_streams", plan.n_streams}});
    return kSuccess;
}

bool coincidence_rates_uniform(const CaseStats& stats)
{
    const auto& first = stats.coincidence_rate[0][0];
    for (const auto& row : stats.coincidence_rate) {
        for (const auto& c : row) {
            if (c != first) return false;
        }
    }
    return true;
}

int cmd_verify(const Options& opt, std::ostream& out)
{
    const LoadedConfig loaded = load_config(opt.config_path);
    SimulationPlan plan{loaded.config, resolve_trials(opt, loaded), resolve_seed(opt, loaded),
                        opt.streams};

    bool all_pass = true;
    json checks = json::array();
    auto report = [&](const std::string& name, bool pass, const std::string& detail) {
        out << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
        checks.push_back({{"check", name}, {"pass", pass}, {"detail", detail}});
        all_pass = all_pass && pass;
    };
    auto info = [&](const std::string& name, const std::string& detail) {
        out << "[INFO] " << name << ": " << detail << '\n';
        checks.push_back({{"check", name}, {"informational", true}, {"detail", detail}});
    };

    const JointTable table = enumerate_joint(loaded.config);
    report("normalization", table.total() == 1,
           "joint table sums to " + to_fraction_string(table.total()));
    const CaseStats exact = conditional_stats(table);

    const bool factorizes =
        exact.eta_a && exact.eta_u_a && exact.eta_f_a && *exact.eta_a == *exact.eta_u_a * *exact.eta_f_a
        && exact.eta_b && exact.eta_u_b && exact.eta_f_b
        && *exact.eta_b == *exact.eta_u_b * *exact.eta_f_b;
    report("eta_factorization", factorizes,
           "eta_a = " + fraction_or_undefined(exact.eta_a) + ", eta_b = "
               + fraction_or_undefined(exact.eta_b) + " (eta = eta_u * eta_f)");

    const TallyCounts tally = run_trials(plan);
    bool conserved = tally.n_trials() == plan.n_trials;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < kCellCount; ++i) {
        sum += tally.cells()[i];
        const TrialRecord r = cell_record(i);
        const bool impossible = (r.setting_a == SwitchPosition::Failure && is_flash(r.outcome_a))
                                || (r.setting_b == SwitchPosition::Failure && is_flash(r.outcome_b));
        if (impossible && tally.cells()[i] != 0) conserved = false;
    }
    conserved = conserved && sum == tally.n_trials();
    report("conservation", conserved,
           std::to_string(sum) + " counts over " + std::to_string(tally.n_trials()) + " trials");

    SimulationPlan single = plan;
    single.n_streams = plan.n_streams == 1 ? 4 : 1;
    const bool deterministic = run_trials(single) == tally;
    report("determinism", deterministic,
           std::to_string(plan.n_streams) + " vs " + std::to_string(single.n_streams)
               + " streams give " + (deterministic ? "identical" : "different") + " tallies");

    const EstimatedStats est = estimate_stats(tally);
    const ComparisonReport cmp = compare(exact, est, opt.threshold);
    double worst = 0;
    std::string worst_name = "-";
    for (const auto& row : cmp.rows) {
        if (!row.pass) out << "       mismatch " << row.name << " z=" << format_double(row.z) << '\n';
        if (std::isnan(row.z) || std::fabs(row.z) > worst) {
            worst = std::isnan(row.z) ? worst : std::fabs(row.z);
            worst_name = row.name;
        }
    }
    {
        std::ostringstream detail;
        detail << cmp.rows.size() << " fields at |z| <= " << opt.threshold << ", max |z| = "
               << std::setprecision(3) << worst << " (" << worst_name << ")";
        report("mc_agreement", cmp.all_pass(), detail.str());
    }

    json independence = nullptr;
    try {
        const IndependenceTestResult ind = settings_independence_test(tally);
        independence = to_json(ind);
        std::ostringstream detail;
        detail << "chi2 = " << std::setprecision(6) << ind.statistic << ", dof = "
               << ind.degrees_of_freedom << ", p = " << ind.p_value;
        if (coincidence_rates_uniform(exact)) {
            report("settings_independence", ind.p_value > kIndependenceAlpha,
                   detail.str() + " (exact rates uniform; require p > 0.001)");
        } else {
            info("settings_independence",
                 detail.str() + " (exact rates depend on the setting pair; not asserted)");
        }
    } catch (const NoCoincidences&) {
        if (coincidence_rates_uniform(exact) && exact.coincidence_rate[0][0] != 0 && plan.n_trials > 0) {
            report("settings_independence", false, "no coincidences observed");
        } else {
            info("settings_independence", "no coincidences; test skipped");
        }
    }

    const std::vector<Rational> p_values{Rational(0), Rational(1, 5), Rational(1, 2)};
    const DetectorInvarianceReport inv = detector_invariance_check(loaded.config, p_values);
    report("detector_invariance", inv.invariant(),
           std::string("p in {0, 1/5, 1/2}: conditionals ")
               + (inv.conditionals_invariant ? "unchanged" : "changed") + ", eta_u "
               + (inv.eta_u_invariant ? "unchanged" : "changed") + ", coincidence rates "
               + (inv.coincidence_scales ? "scale by (1-p)^2" : "do not scale"));

    {
        const Rational target(1, 4);
        std::ostringstream detail;
        detail << "Case a same = " << fraction_or_undefined(exact.p_same_case_a)
               << ", Case b same = " << fraction_or_undefined(exact.p_same_case_b)
               << " vs device target 1/1 and 1/4";
        const bool reproduces = exact.p_same_case_a == Rational(1) && exact.p_same_case_b == target;
        if (exact.p_same_case_b && *exact.p_same_case_b != target) {
            const Rational gap = *exact.p_same_case_b - target;
            detail << "; gap " << (gap > 0 ? "+" : "") << to_fraction_string(gap);
        }
        detail << (reproduces ? "; model reproduces the device on detected pairs"
                              : "; model does not reproduce the device");
        info("conundrum", detail.str());
    }

    out << (all_pass ? "verify: all checks passed\n" : "verify: FAILED\n");

    OutputSet files(opt.out_dir);
    files.write("verify.json", json{{"config", loaded.snapshot},
                                    {"seed", plan.seed},
                                    {"n_trials", plan.n_trials},
                                    {"all_pass", all_pass},
                                    {"checks", checks},
                                    {"exact", to_json(exact)},
                                    {"comparison", to_json(cmp)},
                                    {"settings_independence", independence},
                                    {"detector_invariance", to_json(inv)}}
                                       .dump(2)
                                   + "\n");
    files.write("comparison.csv", comparison_csv(cmp));
    files.write_manifest("verify", opt, loaded,
                         {{"seed", plan.seed},
                          {"n_trials", plan.n_trials},
                          {"n_streams", plan.n_streams},
                          {"threshold", opt.threshold}});
    return all_pass ? kSuccess : kVerificationFailed;
}

int cmd_scan(const Options& opt, std::ostream& out)
{
    const LoadedConfig loaded = load_config(opt.config_path);
    if (opt.grid.empty()) {
        throw ConfigError(ConfigErrorKind::Malformed, "--grid needs at least one value");
    }

    std::vector<ScanRow> rows;
    for (const auto& text : opt.grid) {
        Rational p;
        try {
            p = parse_rational(text);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ConfigErrorKind::Malformed, "--grid value '" + text + "': " + e.what());
        }
        if (p < 0 || p >= 1) {
            throw ConfigError(ConfigErrorKind::InvalidProbability,
                              "--grid value '" + text + "' must lie in [0, 1)");
        }
        ExperimentConfig c = loaded.config;
        if (opt.parameter == "p_a" || opt.parameter == "p_both") c.detector_a.failure_probability = p;
        if (opt.parameter == "p_b" || opt.parameter == "p_both") c.detector_b.failure_probability = p;
        rows.push_back({p, conditional_stats(enumerate_joint(c))});
    }

    const std::string csv = scan_csv(rows);
    out << "Scan of " << opt.parameter << " for " << opt.config_path << "\n" << csv;

    OutputSet files(opt.out_dir);
    files.write("scan.csv", csv);
    files.write_manifest("scan", opt, loaded, {{"parameter", opt.parameter}, {"grid", opt.grid}});
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact analysis and Monte Carlo simulation of Mermin's device and its "
                 "no-flash extensions"};
    app.set_version_flag("--version", MERMIN_SIM_VERSION);
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out-dir", opt.out_dir, "Directory for JSON/CSV reports")
            ->capture_default_str();
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--n", opt.n_text, "Number of trials (default: config n_trials or 1e6)");
        sub->add_option("--seed", opt.seed, "64-bit seed (default: config seed or 1)");
        sub->add_option("--streams", opt.streams, "Trial-range partitions; does not change results")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* enumerate = app.add_subcommand("enumerate", "Exact joint table and conditional statistics");
    add_common(enumerate);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with confidence intervals");
    add_common(simulate);
    add_sim(simulate);

    auto* verify = app.add_subcommand("verify", "Exact vs Monte Carlo acceptance run");
    add_common(verify);
    add_sim(verify);
    verify->add_option("--threshold", opt.threshold, "Maximum |z| for agreement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* scan = app.add_subcommand("scan", "Exact statistics over a grid of detector failure probabilities");
    add_common(scan);
    scan->add_option("--parameter", opt.parameter, "p_a, p_b or p_both")
        ->check(CLI::IsMember({"p_a", "p_b", "p_both"}))
        ->capture_default_str();
    scan->add_option("--grid", opt.grid, "Comma-separated values in [0, 1), e.g. 0,1/4,0.5")
        ->delimiter(',')
        ->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (*enumerate) return cmd_enumerate(opt, out);
        if (*simulate) return cmd_simulate(opt, out);
        if (*verify) return cmd_verify(opt, out);
        if (*scan) return cmd_scan(opt, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIoError;
    }
    return kConfigError;
}

}  // namespace mermin::cli
