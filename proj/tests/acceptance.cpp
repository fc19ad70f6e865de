// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mermin/exact_analyzer.hpp"
#include "mermin/monte_carlo.hpp"
#include "mermin/stats.hpp"

using namespace mermin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion
{
    std::string name;
    std::function<bool(std::ostringstream&)> run;
};

ExperimentConfig make_config(std::string_view source, Rational p_a = 0, Rational p_b = 0)
{
    return {builtin_distribution(source), DetectorModel{p_a}, DetectorModel{p_b}};
}

bool exact_table1(std::ostringstream& log)
{
    const auto start = Clock::now();
    const CaseStats s = conditional_stats(enumerate_joint(make_config("table1_uniform")));
    const double elapsed = seconds_since(start);

    bool ok = s.p_same_case_a == Rational(1) && s.p_same_case_b == Rational(1, 4)
              && s.eta_a == Rational(5, 6) && s.eta_b == Rational(5, 6);
    for (const auto& row : s.coincidence_rate) {
        for (const auto& c : row) ok = ok && c == Rational(2, 3);
    }
    log << "case a 1, case b 1/4, eta 5/6, coincidence 2/3 x9: " << (ok ? "exact" : "MISMATCH")
        << "; runtime " << elapsed * 1e3 << " ms (< 10 ms)";
    return ok && elapsed < 0.010;
}

bool conundrum_baseline(std::ostringstream& log)
{
    const CaseStats two_one = conditional_stats(enumerate_joint(make_config("two_one_uniform")));
    const CaseStats eight = conditional_stats(enumerate_joint(make_config("all_eight_uniform")));
    const CaseBMinimum m = min_case_b_no_noflash();

    bool support_ok = !m.support.empty();
    for (const auto& s : m.support) {
        support_ok = support_ok && s.to_string() != "RRR" && s.to_string() != "GGG";
    }
    log << "two_one " << to_fraction_string(*two_one.p_same_case_b) << ", all_eight "
        << to_fraction_string(*eight.p_same_case_b) << ", min " << to_fraction_string(m.value)
        << " over " << m.support.size() << " sets";
    return two_one.p_same_case_b == Rational(1, 3) && eight.p_same_case_b == Rational(1, 2)
           && m.value == Rational(1, 3) && support_ok;
}

bool detector_loss_invariance(std::ostringstream& log)
{
    const std::vector<Rational> ps{Rational(0), Rational(1, 5), Rational(1, 2)};
    bool ok = true;
    for (const char* source : {"table1_uniform", "two_one_uniform"}) {
        const auto report = detector_invariance_check(make_config(source), ps);
        ok = ok && report.conditionals_invariant && report.eta_u_invariant && report.eta_factorizes;
        const CaseStats& base = report.points.front().stats;
        for (const auto& pt : report.points) {
            const CaseStats& s = pt.stats;
            ok = ok && s.p_same_case_a == base.p_same_case_a && s.p_same_case_b == base.p_same_case_b
                 && s.eta_u_a == base.eta_u_a && s.eta_u_b == base.eta_u_b
                 && *s.eta_a == (1 - pt.failure_probability) * *base.eta_u_a
                 && *s.eta_b == (1 - pt.failure_probability) * *base.eta_u_b;
        }
        log << source << (ok ? " ok; " : " FAILED; ");
    }
    // eta = eta_u * eta_f for asymmetric and mixed configs too.
    for (auto [pa, pb] : {std::pair{Rational(0), Rational(1, 3)}, std::pair{Rational(3, 4), Rational(1, 10)}}) {
        for (const char* source : {"table1_uniform", "two_one_uniform", "all_eight_uniform", "single(GNR-GGR)"}) {
            const CaseStats s = conditional_stats(enumerate_joint(make_config(source, pa, pb)));
            ok = ok && *s.eta_a == *s.eta_u_a * *s.eta_f_a && *s.eta_b == *s.eta_u_b * *s.eta_f_b;
        }
    }
    log << "eta = eta_u * eta_f on all tested configs: " << (ok ? "yes" : "no");
    return ok;
}

bool mc_convergence(std::ostringstream& log)
{
    bool ok = true;
    double total_seconds = 0;
    for (const char* source : {"table1_uniform", "two_one_uniform", "all_eight_uniform", "single(GNR-GGR)"}) {
        SimulationPlan plan{make_config(source), 1'000'000, 1, 1, 1};
        const auto start = Clock::now();
        const TallyCounts t = run_trials(plan);
        const double elapsed = seconds_since(start);
        total_seconds += elapsed;

        const auto report = compare(conditional_stats(enumerate_joint(plan.config)), estimate_stats(t), 5.0);
        double worst = 0;
        for (const auto& row : report.rows) {
            if (!row.pass) log << "[" << source << " " << row.name << " z=" << row.z << "] ";
            if (std::isfinite(row.z)) worst = std::max(worst, std::fabs(row.z));
        }
        ok = ok && report.all_pass() && report.rows.size() == 17 && elapsed < 5.0;
        log << source << " max|z|=" << worst << " (" << elapsed << " s); ";
    }
    log << "total " << total_seconds << " s single-core";
    return ok;
}

bool determinism(std::ostringstream& log)
{
    auto plan = [](std::uint32_t streams, std::uint32_t workers) {
        return SimulationPlan{make_config("table1_uniform"), 1'000'000, 1, streams, workers};
    };
    const TallyCounts one = run_trials(plan(1, 1));
    const TallyCounts four = run_trials(plan(4, 4));
    const TallyCounts eight = run_trials(plan(8, 8));
    const TallyCounts again = run_trials(plan(1, 1));
    const TallyCounts eight_again = run_trials(plan(8, 2));
    const bool ok = one == four && one == eight && one == again && one == eight_again;
    log << "streams 1/4/8 and re-runs " << (ok ? "bitwise identical" : "DIFFER");
    return ok;
}

bool settings_independence(std::ostringstream& log)
{
    bool ok = true;
    for (std::uint64_t seed : {7ull, 11ull, 2024ull}) {
        const TallyCounts t = run_trials({make_config("table1_uniform"), 1'000'000, seed, 4, 0});
        const auto r = settings_independence_test(t);
        log << "seed " << seed << " p=" << r.p_value << "; ";
        ok = ok && r.p_value > 1e-3;
    }
    std::array<std::array<std::uint64_t, kSettingCount>, kSettingCount> zeroed;
    for (auto& row : zeroed) row.fill(1125);
    zeroed[1][2] = 0;
    const auto r = settings_independence_test(zeroed);
    log << "zeroed cell p=" << r.p_value;
    return ok && r.p_value < 1e-6;
}

bool small_instance_equivalence(std::ostringstream& log)
{
    bool ok = true;
    for (const auto& s : no_flash_free_sets()) {
        const Rational direct = case_b_same_fraction(s);
        const CaseStats stats =
            conditional_stats(enumerate_joint(make_config("single(" + identical_pair(s).to_string() + ")")));
        const bool match = stats.p_same_case_b == direct;
        log << s.to_string() << "=" << to_fraction_string(direct) << (match ? " " : "(MISMATCH) ");
        ok = ok && match;
    }
    return ok;
}

bool gamma_kernel(std::ostringstream& log)
{
    using HighPrecision = boost::multiprecision::cpp_bin_float_50;
    const double as[] = {0.5, 1.0, 2.5, 4.0, 10.0};
    const double xs[] = {0.1, 2.0, 8.0, 30.0};
    double worst = 0;
    int points = 0;
    for (double a : as) {
        for (double x : xs) {
            const double reference =
                boost::math::gamma_q(HighPrecision(a), HighPrecision(x)).convert_to<double>();
            worst = std::max(worst, std::fabs(regularized_gamma_q(a, x) - reference));
            ++points;
        }
    }
    log << points << " points, max abs error " << worst << " (<= 1e-10)";
    return points == 20 && worst <= 1e-10;
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"1 exact oracle, reference source", exact_table1},
        {"2 exact oracle, conundrum baseline", conundrum_baseline},
        {"3 detector-loss invariance", detector_loss_invariance},
        {"4 Monte Carlo convergence", mc_convergence},
        {"5 determinism", determinism},
        {"6 settings-independence test", settings_independence},
        {"7 small-instance oracle equivalence", small_instance_equivalence},
        {"8 numeric kernel Q(a,x)", gamma_kernel},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream log;
        bool pass = false;
        try {
            pass = c.run(log);
        } catch (const std::exception& e) {
            log << "exception: " << e.what();
        }
        std::printf("%s  %-38s %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), log.str().c_str());
        if (!pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
