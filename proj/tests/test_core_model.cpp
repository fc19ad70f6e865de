#include "doctest.h"

#include <map>

#include "mermin/core_model.hpp"

using namespace mermin;

TEST_CASE("outcome_for reads the instruction at the selected setting")
{
    CHECK(outcome_for(InstructionSet::parse("GGR"), Setting::S3) == Outcome::Red);
    CHECK(outcome_for(InstructionSet::parse("GGR"), Setting::S1) == Outcome::Green);
    CHECK(outcome_for(InstructionSet::parse("RRR"), Setting::S2) == Outcome::Red);
    CHECK(outcome_for(InstructionSet::parse("GNR"), Setting::S2) == Outcome::NoFlash);
}

TEST_CASE("no-flash-free sets never produce NoFlash")
{
    for (const auto& s : InstructionSet::all()) {
        if (s.has_no_flash()) continue;
        for (Setting k : kAllSettings) CHECK(outcome_for(s, k) != Outcome::NoFlash);
    }
}

TEST_CASE("classify")
{
    CHECK(classify(InstructionSet::parse("GGR")) == InstructionClass::TwoOne);
    CHECK(classify(InstructionSet::parse("GGG")) == InstructionClass::Homogeneous);
    CHECK(classify(InstructionSet::parse("RRR")) == InstructionClass::Homogeneous);
    CHECK(classify(InstructionSet::parse("GNR")) == InstructionClass::WithNoFlash);
    CHECK(classify(InstructionSet::parse("NNN")) == InstructionClass::WithNoFlash);

    SUBCASE("partition of all 27 sets is 2 / 6 / 19")
    {
        const auto all = InstructionSet::all();
        REQUIRE(all.size() == 27);
        std::map<InstructionClass, int> counts;
        for (const auto& s : all) ++counts[classify(s)];
        CHECK(counts[InstructionClass::Homogeneous] == 2);
        CHECK(counts[InstructionClass::TwoOne] == 6);
        CHECK(counts[InstructionClass::WithNoFlash] == 19);

        for (const auto& s : two_one_sets()) CHECK(classify(s) == InstructionClass::TwoOne);
    }
}

TEST_CASE("textual encodings")
{
    CHECK(InstructionSet::parse("GNR").to_string() == "GNR");
    CHECK(PairState::parse("GNR-GGR").to_string() == "GNR-GGR");
    CHECK(PairState::parse("GNR-GGR").alice == InstructionSet::parse("GNR"));
    CHECK(PairState::parse("GNR-GGR").bob == InstructionSet::parse("GGR"));
    CHECK(PairState::parse("GNR-GGR").swapped() == PairState::parse("GGR-GNR"));

    CHECK_THROWS_AS(InstructionSet::parse("GG"), ConfigError);
    CHECK_THROWS_AS(InstructionSet::parse("GXR"), ConfigError);
    CHECK_THROWS_AS(PairState::parse("GNRGGR"), ConfigError);
    CHECK_THROWS_AS(PairState::parse("GNR-GG"), ConfigError);

    const TrialRecord r{SwitchPosition::S2, SwitchPosition::S1, Outcome::Green, Outcome::Red};
    CHECK(r.to_string() == "21GR");
}

TEST_CASE("evaluate_trial: failure position always yields NoFlash")
{
    for (const auto& s : InstructionSet::all()) {
        const PairState st = identical_pair(s);
        for (SwitchPosition b : kAllSwitchPositions) {
            const auto r = evaluate_trial(st, SwitchPosition::Failure, b);
            CHECK(r.outcome_a == Outcome::NoFlash);
            const auto r2 = evaluate_trial(st, b, SwitchPosition::Failure);
            CHECK(r2.outcome_b == Outcome::NoFlash);
        }
    }
    const auto st = PairState::parse("GNR-GGR");
    CHECK(evaluate_trial(st, SwitchPosition::S2, SwitchPosition::S2).to_string() == "22NG");
    CHECK(evaluate_trial(st, SwitchPosition::S2, SwitchPosition::S1).to_string() == "21NG");
    CHECK(evaluate_trial(st, SwitchPosition::S1, SwitchPosition::S3).to_string() == "13GR");
}

TEST_CASE("builtin distributions")
{
    SUBCASE("table1_uniform")
    {
        const auto d = builtin_distribution("table1_uniform");
        REQUIRE(d.entries.size() == 12);
        CHECK(d.entries.front().state.to_string() == "NRG-GRG");
        CHECK(d.entries.back().state.to_string() == "GRR-GRN");
        for (const auto& e : d.entries) CHECK(e.weight == Rational(1, 12));
        CHECK(d.total_weight() == 1);
        // Rows 7-12 are rows 1-6 with the particles exchanged.
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(d.entries[i + 6].state == d.entries[i].state.swapped());
        }
    }
    SUBCASE("two_one_uniform")
    {
        const auto d = builtin_distribution("two_one_uniform");
        REQUIRE(d.entries.size() == 6);
        for (const auto& e : d.entries) {
            CHECK(e.weight == Rational(1, 6));
            CHECK(e.state.alice == e.state.bob);
            CHECK(classify(e.state.alice) == InstructionClass::TwoOne);
        }
    }
    SUBCASE("all_eight_uniform")
    {
        const auto d = builtin_distribution("all_eight_uniform");
        REQUIRE(d.entries.size() == 8);
        CHECK(d.total_weight() == 1);
    }
    SUBCASE("single")
    {
        const auto d = builtin_distribution("single(GNR-GGR)");
        REQUIRE(d.entries.size() == 1);
        CHECK(d.entries[0].weight == 1);
        CHECK(d.entries[0].state.to_string() == "GNR-GGR");
    }
    SUBCASE("unknown")
    {
        try {
            builtin_distribution("table2");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.kind() == ConfigErrorKind::UnknownBuiltin);
        }
        CHECK_THROWS_AS(builtin_distribution("single(GNR)"), ConfigError);
    }
}

TEST_CASE("reference source column balance: 2 N, 5 G, 5 R per column on each side")
{
    const auto& states = table1_states();
    for (bool alice : {true, false}) {
        for (Setting k : kAllSettings) {
            std::map<Outcome, int> counts;
            for (const auto& st : states) ++counts[outcome_for(alice ? st.alice : st.bob, k)];
            CHECK(counts[Outcome::NoFlash] == 2);
            CHECK(counts[Outcome::Green] == 5);
            CHECK(counts[Outcome::Red] == 5);
        }
    }
}

TEST_CASE("validate")
{
    CHECK_FALSE(validate(builtin_distribution("table1_uniform")).has_value());

    auto kind_of = [](const SourceDistribution& d) {
        auto err = validate(d);
        REQUIRE(err.has_value());
        return err->kind();
    };

    SourceDistribution half{{{PairState::parse("GGR-GGR"), Rational(1, 2)}}};
    CHECK(kind_of(half) == ConfigErrorKind::WeightSumMismatch);

    SourceDistribution negative{{{PairState::parse("GGR-GGR"), Rational(11, 10)},
                                 {PairState::parse("RRR-RRR"), Rational(-1, 10)}}};
    CHECK(kind_of(negative) == ConfigErrorKind::NegativeWeight);
    CHECK(std::string(validate(negative)->what()).find("RRR-RRR") != std::string::npos);

    CHECK(kind_of(SourceDistribution{}) == ConfigErrorKind::EmptyDistribution);

    SourceDistribution dup{{{PairState::parse("GGR-GGR"), Rational(1, 2)},
                            {PairState::parse("GGR-GGR"), Rational(1, 2)}}};
    CHECK(kind_of(dup) == ConfigErrorKind::DuplicateState);

    SUBCASE("sum tolerance is 1e-12 absolute")
    {
        SourceDistribution near{{{PairState::parse("GGR-GGR"), Rational(1) - Rational(1, 2'000'000'000'000LL)}}};
        CHECK_FALSE(validate(near).has_value());
        SourceDistribution far{{{PairState::parse("GGR-GGR"), Rational(1) - Rational(1, 100'000'000'000LL)}}};
        CHECK(kind_of(far) == ConfigErrorKind::WeightSumMismatch);
    }
}

TEST_CASE("detector model position probabilities")
{
    DetectorModel d{Rational(1, 4)};
    CHECK(d.position_probability(SwitchPosition::Failure) == Rational(1, 4));
    CHECK(d.position_probability(SwitchPosition::S2) == Rational(1, 4));
    CHECK(d.fair_efficiency() == Rational(3, 4));

    ExperimentConfig config{builtin_distribution("table1_uniform"), DetectorModel{Rational(3, 2)}, {}};
    CHECK_THROWS_AS(require_valid(config), ConfigError);
}
