#include <doctest.h>

#include "oracles.hpp"
#include "otdoa/prs_config.hpp"

using namespace otdoa;

TEST_SUITE("prs_config") {

TEST_CASE("50-PRB LTE PRS with period 160 and one subframe is valid") {
    LtePrsConfig c;
    c.bandwidth_prbs = 50;
    c.period_T_prs = 160;
    c.occasion_length = 1;
    c.subframe_offset = 0;
    const auto v = validate(c);
    CHECK(v.config() == PrsConfig{c});
    CHECK(v.technology() == Technology::lte);
}

TEST_CASE("NPRS without Part A and Part B is rejected") {
    NprsConfig c;
    CHECK_THROWS_AS(validate(c), MissingPart);
}

TEST_CASE("LTE-M occasion longer than its interval is a geometry violation") {
    LtemPrsConfig c;
    c.occasion_length = 160;
    c.occasion_interval = 10;
    CHECK_THROWS_AS(validate(c), GeometryViolation);
}

TEST_CASE("out-of-domain values name the field") {
    auto field_of = [](const PrsConfig& c) -> std::string {
        try {
            validate(c);
        } catch (const DomainViolation& e) {
            return e.field();
        }
        return "";
    };
    LtePrsConfig lte;
    lte.bandwidth_prbs = 7;
    CHECK(field_of(lte) == "bandwidth_prbs");
    lte = {};
    lte.period_T_prs = 100;
    CHECK(field_of(lte) == "period_T_prs");
    lte = {};
    lte.occasion_length = 3;
    CHECK(field_of(lte) == "occasion_length");
    lte = {};
    lte.subframe_offset = 160;
    CHECK(field_of(lte) == "subframe_offset");
    lte = {};
    lte.physical_cell_id = 504;
    CHECK(field_of(lte) == "physical_cell_id");
    lte = {};
    lte.muting = MutingPattern{parse_bits("101")};
    CHECK(field_of(lte) == "muting");

    LtemPrsConfig m;
    m.period_T_prs = 30;
    CHECK(field_of(m) == "period_T_prs");
    m = {};
    m.occasion_length = 5;
    CHECK(field_of(m) == "occasion_length");
    m = {};
    m.occasion_interval = 30;
    CHECK(field_of(m) == "occasion_interval");
    m = {};
    m.prs_id = 4096;
    CHECK(field_of(m) == "prs_id");
    m = {};
    m.muting = MutingPattern{parse_bits("01")};
    m.muting_group_size = 3;
    CHECK(field_of(m) == "muting_group_size");

    NprsConfig n;
    n.part_a = NprsBitmapConfig{BitString(20, true), std::nullopt};
    CHECK(field_of(n) == "part_a.nprs_bitmap");
    n = {};
    n.part_b = NprsPeriodicConfig{160, 8, 10, std::nullopt};
    CHECK(field_of(n) == "part_b.offset_fraction_a");
    n.part_b = NprsPeriodicConfig{160, 0, 15, std::nullopt};
    CHECK(field_of(n) == "part_b.occasion_length");
    n.part_b = NprsPeriodicConfig{200, 0, 10, std::nullopt};
    CHECK(field_of(n) == "part_b.period_T_prs");
}

TEST_CASE("hopping bands must lie in the carrier and start at the center") {
    LtemPrsConfig m;
    m.carrier_prbs = 50;
    m.hopping = HoppingConfig{2, {22, 40}};
    CHECK_NOTHROW(validate(m));
    m.hopping = HoppingConfig{2, {22, 45}};
    CHECK_THROWS_AS(validate(m), GeometryViolation);
    m.hopping = HoppingConfig{2, {0, 22}};
    CHECK_THROWS_AS(validate(m), GeometryViolation);
    m.hopping = HoppingConfig{4, {22, 0, 10, 44}};
    CHECK_NOTHROW(validate(m));
    m.bandwidth_prbs = 25;
    CHECK_THROWS_AS(validate(m), GeometryViolation);
}

TEST_CASE("inband NPRS must sit inside the host carrier") {
    NprsConfig n;
    n.part_a = NprsBitmapConfig{BitString(10, true), std::nullopt};
    n.carrier_prbs = 50;
    n.inband_prb_index = 50;
    CHECK_THROWS_AS(validate(n), GeometryViolation);
    n.deployment_mode = DeploymentMode::standalone;
    CHECK_NOTHROW(validate(n));
}

TEST_CASE("Part B offset is the fraction times the period") {
    CHECK(partb_offset_subframes({160, 3, 10, std::nullopt}) == 60);
    CHECK(partb_offset_subframes({1280, 0, 10, std::nullopt}) == 0);
    CHECK(partb_offset_subframes({320, 7, 10, std::nullopt}) == 280);
    // Exact for every legal combination.
    for (int period : {160, 320, 640, 1280}) {
        for (int k = 0; k < 8; ++k) {
            CHECK(period * k % 8 == 0);
            CHECK(partb_offset_subframes({period, k, 10, std::nullopt}) == period * k / 8);
        }
    }
}

TEST_CASE("frequency shift is the identity mod 6") {
    CHECK(frequency_shift(7) == 1);
    CHECK(frequency_shift(0) == 0);
    CHECK(frequency_shift(503) == 5);
    for (int id = 0; id < 4096; ++id) CHECK(frequency_shift(id) == id - 6 * (id / 6));
}

TEST_CASE("validate is idempotent on random configs") {
    oracle::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        for (auto tech : {Technology::lte, Technology::ltem, Technology::nbiot}) {
            const auto c = oracle::random_config(rng, tech);
            const auto once = validate(c);
            CHECK(validate(once) == once);
            CHECK(once.config() == c);
        }
    }
}

TEST_CASE("bit strings parse first bit first") {
    const auto b = parse_bits("0110");
    REQUIRE(b.size() == 4);
    CHECK_FALSE(b[0]);
    CHECK(b[1]);
    CHECK(format_bits(b) == "0110");
    CHECK_THROWS_AS(parse_bits("01x"), Error);
}

}
