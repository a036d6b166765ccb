#include <doctest.h>

#include "oracles.hpp"
#include "otdoa/lpp.hpp"

using namespace otdoa;
using namespace otdoa::lpp;

namespace {

CellAssistance cell(int id, std::uint16_t band) {
    LtePrsConfig c;
    c.physical_cell_id = id;
    return {id, band, c};
}

ServerContext server_with(std::vector<CellAssistance> neighbors) {
    ServerContext s;
    s.reference = cell(0, 28);
    s.neighbors = std::move(neighbors);
    return s;
}

UeContext ue_with(std::vector<std::uint16_t> bands) {
    UeContext ue;
    ue.capabilities.supported_bands = std::move(bands);
    ue.measure = [](const ProvideAssistanceData& ad) {
        std::vector<RstdMeasurement> out;
        for (const auto& n : ad.neighbors) out.push_back({n.cell_id, ad.reference.cell_id, 1e-7 * n.cell_id, 12.0});
        return out;
    };
    return ue;
}

}  // namespace

TEST_SUITE("lpp_session") {

TEST_CASE("wire format of a capability request") {
    const auto bytes = encode(RequestCapabilities{7});
    const std::vector<std::uint8_t> expected{1, 1, 9, 0, 0, 0, 1, 4, 0, 0, 0, 7, 0, 0, 0};
    CHECK(bytes == expected);
    CHECK(decode(bytes) == LppMessage{RequestCapabilities{7}});
}

TEST_CASE("random messages round-trip") {
    oracle::Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        const auto m = oracle::random_message(rng);
        const auto bytes = encode(m);
        REQUIRE(decode(bytes) == m);
        CHECK(bytes[1] == static_cast<std::uint8_t>(type_of(m)));
    }
}

TEST_CASE("empty neighbor list") {
    ProvideAssistanceData ad;
    ad.reference = cell(3, 28);
    const auto back = decode(encode(ad));
    CHECK(back == LppMessage{ad});
    CHECK(std::get<ProvideAssistanceData>(back).neighbors.empty());
}

TEST_CASE("every truncation is reported") {
    oracle::Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        const auto bytes = encode(oracle::random_message(rng));
        for (std::size_t n = 0; n < bytes.size(); ++n) {
            CHECK_THROWS_AS(decode(std::span(bytes.data(), n)), MalformedMessage);
        }
    }
}

TEST_CASE("malformed headers and bodies") {
    auto bytes = encode(RequestCapabilities{7});
    auto bad = bytes;
    bad[0] = 2;
    CHECK_THROWS_AS(decode(bad), MalformedMessage);
    bad = bytes;
    bad[1] = 9;
    CHECK_THROWS_AS(decode(bad), MalformedMessage);
    bad = bytes;
    bad.push_back(0);
    CHECK_THROWS_AS(decode(bad), MalformedMessage);
    bad = bytes;
    bad[6] = 0x55;
    try {
        decode(bad);
        FAIL("unknown tag accepted");
    } catch (const MalformedMessage& e) {
        CHECK(e.offset() == 6);
    }
    // The same field twice.
    std::vector<std::uint8_t> dup{1, 1, 18, 0, 0, 0, 1, 4, 0, 0, 0, 7, 0, 0, 0, 1, 4, 0, 0, 0, 7, 0, 0, 0};
    CHECK_THROWS_AS(decode(dup), MalformedMessage);
}

TEST_CASE("UE answers a capability request") {
    const auto ue = ue_with({28});
    const auto r = ue_step({}, RequestCapabilities{5}, ue);
    CHECK(r.state.phase == Phase::capabilities_exchanged);
    REQUIRE(r.outgoing);
    const auto& caps = std::get<ProvideCapabilities>(*r.outgoing);
    CHECK(caps.transaction_id == 5);
    CHECK(caps.supported_bands == std::vector<std::uint16_t>{28});
}

TEST_CASE("skipping the assistance step is a protocol error") {
    const auto ue = ue_with({28});
    const auto s = ue_step({}, RequestCapabilities{1}, ue).state;
    CHECK_THROWS_AS(ue_step(s, RequestLocationInformation{1, 100}, ue), ProtocolError);
    CHECK(s.phase == Phase::capabilities_exchanged);
    CHECK_THROWS_AS(ue_step({}, ProvideAssistanceData{}, ue), ProtocolError);
    CHECK_THROWS_AS(server_step({}, ProvideLocationInformation{}, server_with({}), 0), ProtocolError);
    CHECK_THROWS_AS(server_request_location({}, server_with({}), 0), ProtocolError);
}

TEST_CASE("five-message session ends with the RSTDs at the server") {
    const auto server = server_with({cell(1, 28), cell(2, 28), cell(3, 28)});
    const auto t = run_session(server, ue_with({28}), 100, 1280);
    REQUIRE(t.messages.size() == 5);
    CHECK(type_of(t.messages[0]) == MessageType::request_capabilities);
    CHECK(type_of(t.messages[1]) == MessageType::provide_capabilities);
    CHECK(type_of(t.messages[2]) == MessageType::provide_assistance_data);
    CHECK(type_of(t.messages[3]) == MessageType::request_location_information);
    CHECK(type_of(t.messages[4]) == MessageType::provide_location_information);
    CHECK(t.server.phase == Phase::done);
    CHECK(t.ue.phase == Phase::done);
    CHECK(t.server.measurements.size() == 3);
    CHECK(std::get<ProvideAssistanceData>(t.messages[2]).neighbors == server.neighbors);
}

TEST_CASE("late location information misses the deadline") {
    auto server = server_with({cell(1, 28), cell(2, 28)});
    server.response_time_subframes = 100;
    CHECK_THROWS_AS(run_session(server, ue_with({28}), 0, 101), DeadlineExceeded);
    CHECK_NOTHROW(run_session(server, ue_with({28}), 0, 100));
    ServerContext defaults;
    CHECK(defaults.response_time_subframes == 10240u);
}

TEST_CASE("assistance data is restricted to the UE's bands") {
    const auto server = server_with({cell(1, 28), cell(2, 3), cell(3, 28), cell(4, 20)});
    const auto t = run_session(server, ue_with({28, 20}), 0, 0);
    const auto& ad = std::get<ProvideAssistanceData>(t.messages[2]);
    std::vector<int> ids;
    for (const auto& n : ad.neighbors) ids.push_back(n.cell_id);
    CHECK(ids == std::vector<int>{1, 3, 4});
    CHECK_THROWS_AS(run_session(server, ue_with({3}), 0, 0), Error);
}

TEST_CASE("phase and message names") {
    CHECK(to_string(Phase::done) == "Done");
    CHECK(to_string(MessageType::provide_assistance_data) == "ProvideAssistanceData");
    CHECK(describe(RequestCapabilities{3}).find("RequestCapabilities") != std::string::npos);
    CHECK(hex_dump(encode(RequestCapabilities{3})).find("01 01 09 00") != std::string::npos);
}

}
