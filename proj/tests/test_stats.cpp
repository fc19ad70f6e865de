#include "doctest.h"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mermin/stats.hpp"

using namespace mermin;

namespace {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

double reference_gamma_q(double a, double x)
{
    return boost::math::gamma_q(HighPrecision(a), HighPrecision(x)).convert_to<double>();
}

Estimate estimate(double value, double se)
{
    Estimate e;
    e.value = value;
    e.std_error = se;
    return e;
}

}  // namespace

TEST_CASE("compare_field")
{
    SUBCASE("z within threshold")
    {
        const auto row = compare_field("p_same_case_b", Rational(1, 4), estimate(0.2502, 0.0005), 5.0);
        REQUIRE(row.has_value());
        CHECK(row->z == doctest::Approx(0.4));
        CHECK(row->pass);
        CHECK_FALSE(row->exact_match);
    }
    SUBCASE("exact equality with zero variance")
    {
        const auto row = compare_field("p_same_case_a", Rational(1), estimate(1.0, 0.0), 5.0);
        CHECK(row->exact_match);
        CHECK(row->pass);
        CHECK(row->z == 0.0);
    }
    SUBCASE("far off")
    {
        const auto row = compare_field("eta_a", Rational(5, 6), estimate(0.80, 0.004), 5.0);
        CHECK(row->z == doctest::Approx(-8.333).epsilon(1e-3));
        CHECK_FALSE(row->pass);
    }
    SUBCASE("zero variance but different")
    {
        const auto row = compare_field("eta_a", Rational(5, 6), estimate(1.0, 0.0), 5.0);
        CHECK(std::isinf(row->z));
        CHECK_FALSE(row->pass);
    }
    SUBCASE("undefined sides")
    {
        CHECK_FALSE(compare_field("x", std::nullopt, std::nullopt, 5.0).has_value());
        const auto one = compare_field("x", Rational(1, 2), std::nullopt, 5.0);
        REQUIRE(one.has_value());
        CHECK_FALSE(one->pass);
        CHECK_FALSE(one->note.empty());
        CHECK_FALSE(compare_field("x", std::nullopt, estimate(0.5, 0.1), 5.0)->pass);
    }
    SUBCASE("pass/fail is symmetric when both sides have zero variance")
    {
        const double values[] = {0.0, 0.25, 1.0 / 3.0, 0.5, 1.0};
        for (double x : values) {
            for (double y : values) {
                const auto xy = compare_field("f", rational_from_double(x), estimate(y, 0.0), 5.0);
                const auto yx = compare_field("f", rational_from_double(y), estimate(x, 0.0), 5.0);
                CHECK(xy->pass == yx->pass);
            }
        }
    }
}

TEST_CASE("compare over CaseStats skips fields undefined on both sides")
{
    CaseStats exact;
    exact.p_same_case_a = Rational(1);
    EstimatedStats est;
    est.p_same_case_a = estimate(1.0, 0.0);
    const auto report = compare(exact, est, 5.0);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].name == "p_same_case_a");
    CHECK(report.all_pass());
    CHECK_THROWS_AS(compare(exact, est, 0.0), std::invalid_argument);
}

TEST_CASE("settings_independence_test")
{
    using Grid = std::array<std::array<std::uint64_t, 3>, 3>;
    SUBCASE("equal cells")
    {
        Grid g;
        for (auto& row : g) row.fill(1000);
        const auto r = settings_independence_test(g);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
        CHECK(r.degrees_of_freedom == 8);
        CHECK(r.expected[2][1] == 1000.0);
    }
    SUBCASE("one zeroed cell")
    {
        Grid g;
        for (auto& row : g) row.fill(1125);
        g[0][0] = 0;
        const auto r = settings_independence_test(g);
        // Expected 1000 per cell: (0-1000)^2/1000 + 8 * 125^2/1000.
        CHECK(r.statistic == doctest::Approx(1125.0));
        CHECK(r.p_value < 1e-6);
    }
    SUBCASE("no coincidences")
    {
        Grid g{};
        CHECK_THROWS_AS(settings_independence_test(g), NoCoincidences);
        TallyCounts t;
        t.record({SwitchPosition::S1, SwitchPosition::S1, Outcome::NoFlash, Outcome::Green}, 50);
        CHECK_THROWS_AS(settings_independence_test(t), NoCoincidences);
    }
    SUBCASE("tally cells with a no-flash side or failure are excluded")
    {
        TallyCounts t;
        for (Setting a : kAllSettings) {
            for (Setting b : kAllSettings) {
                t.record({to_position(a), to_position(b), Outcome::Green, Outcome::Red}, 10);
            }
        }
        t.record({SwitchPosition::S1, SwitchPosition::S2, Outcome::NoFlash, Outcome::Red}, 500);
        t.record({SwitchPosition::Failure, SwitchPosition::S2, Outcome::NoFlash, Outcome::Red}, 500);
        const auto r = settings_independence_test(t);
        CHECK(r.observed[0][1] == 10);
        CHECK(r.statistic == 0.0);
    }
}

TEST_CASE("regularized_gamma_q")
{
    CHECK(regularized_gamma_q(2.5, 0.0) == 1.0);
    CHECK(regularized_gamma_q(0.5, 1.0) == doctest::Approx(std::erfc(1.0)).epsilon(1e-12));
    CHECK(regularized_gamma_q(0.5, 1.0) == doctest::Approx(0.157299207050285).epsilon(1e-12));
    CHECK(regularized_gamma_q(4.0, 8.0) == doctest::Approx(0.0423801119916840).epsilon(1e-12));
    // Q(1, x) = e^{-x}
    for (double x : {0.1, 1.0, 3.0, 20.0}) {
        CHECK(regularized_gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(regularized_gamma_q(1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(regularized_gamma_q(-2.0, 1.0), std::domain_error);
}

TEST_CASE("regularized_gamma_q against a 50-digit reference on a grid")
{
    for (double a : {0.5, 1.0, 1.5, 2.0, 4.0, 7.5, 20.0, 60.0}) {
        for (double x : {0.01, 0.3, 1.0, 2.5, 4.0, 8.0, 15.0, 40.0, 90.0}) {
            CAPTURE(a);
            CAPTURE(x);
            CHECK(std::fabs(regularized_gamma_q(a, x) - reference_gamma_q(a, x)) <= 1e-10);
        }
    }
}

TEST_CASE("property: regularized_gamma_q is decreasing in x")
{
    for (double a : {0.5, 1.0, 3.0, 4.0, 12.0}) {
        double previous = 1.0;
        for (double x = 0.0; x <= 60.0; x += 0.25) {
            const double q = regularized_gamma_q(a, x);
            CHECK(q <= previous + 1e-15);
            CHECK(q >= 0.0);
            previous = q;
        }
    }
}
