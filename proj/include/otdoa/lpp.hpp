#pragma once

// Simplified LPP exchange between a location server and a UE: capability
// transfer, assistance data transfer, location information transfer.
//
// Wire format (little endian):
//   u8 version | u8 message type | u32 body length | body
// The body is a sequence of fields `u8 tag | u32 length | value`; nested
// structures use the same field encoding inside their value.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "otdoa/prs_config.hpp"
#include "otdoa/receiver.hpp"

namespace otdoa::lpp {

inline constexpr std::uint8_t kWireVersion = 1;

enum class MessageType : std::uint8_t {
    request_capabilities = 1,
    provide_capabilities = 2,
    provide_assistance_data = 3,
    request_location_information = 4,
    provide_location_information = 5,
};
std::string to_string(MessageType type);

enum class BandwidthClass : std::uint8_t { m1 = 0, m2 = 1, nb = 2, wideband = 3 };

struct RequestCapabilities {
    std::uint32_t transaction_id = 0;
    friend bool operator==(const RequestCapabilities&, const RequestCapabilities&) = default;
};

struct ProvideCapabilities {
    std::uint32_t transaction_id = 0;
    std::vector<std::uint16_t> supported_bands;
    BandwidthClass max_bandwidth = BandwidthClass::wideband;
    /// Carried for completeness; inter-frequency measurement is not simulated.
    bool inter_frequency_rstd = false;
    friend bool operator==(const ProvideCapabilities&, const ProvideCapabilities&) = default;
};

struct CellAssistance {
    std::int32_t cell_id = 0;
    std::uint16_t band = 0;
    PrsConfig prs;
    friend bool operator==(const CellAssistance&, const CellAssistance&) = default;
};

struct ProvideAssistanceData {
    std::uint32_t transaction_id = 0;
    CellAssistance reference;
    std::vector<CellAssistance> neighbors;
    friend bool operator==(const ProvideAssistanceData&, const ProvideAssistanceData&) = default;
};

struct RequestLocationInformation {
    std::uint32_t transaction_id = 0;
    std::uint32_t response_time_subframes = kCycleSubframes;
    friend bool operator==(const RequestLocationInformation&, const RequestLocationInformation&) = default;
};

struct ProvideLocationInformation {
    std::uint32_t transaction_id = 0;
    std::vector<RstdMeasurement> measurements;
    friend bool operator==(const ProvideLocationInformation&, const ProvideLocationInformation&) = default;
};

using LppMessage = std::variant<RequestCapabilities, ProvideCapabilities, ProvideAssistanceData,
                                RequestLocationInformation, ProvideLocationInformation>;

MessageType type_of(const LppMessage& msg);

class MalformedMessage : public Error {
public:
    MalformedMessage(std::size_t offset, const std::string& reason);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

std::vector<std::uint8_t> encode(const LppMessage& msg);
LppMessage decode(std::span<const std::uint8_t> bytes);

/// Human-readable rendering used by the transcript output.
std::string describe(const LppMessage& msg);
std::string hex_dump(std::span<const std::uint8_t> bytes);

// ---- session -------------------------------------------------------------

enum class Phase { idle, capabilities_exchanged, assistance_delivered, awaiting_location, done };
std::string to_string(Phase phase);

struct SessionState {
    Phase phase = Phase::idle;
    /// Simulated time (subframes) by which ProvideLocationInformation must arrive.
    std::uint64_t deadline_subframe = 0;
    std::optional<ProvideCapabilities> capabilities;
    std::optional<ProvideAssistanceData> assistance;
    std::vector<RstdMeasurement> measurements;
};

class ProtocolError : public Error {
public:
    ProtocolError(Phase phase, const std::string& expected, MessageType got);
    MessageType got() const { return got_; }

private:
    MessageType got_;
};

class DeadlineExceeded : public Error {
public:
    DeadlineExceeded(std::uint64_t deadline, std::uint64_t now);
};

struct StepResult {
    SessionState state;
    std::optional<LppMessage> outgoing;
};

/// UE (target device) role.
struct UeContext {
    ProvideCapabilities capabilities;
    /// Produces RSTDs from the delivered assistance data.
    std::function<std::vector<RstdMeasurement>(const ProvideAssistanceData&)> measure;
};

StepResult ue_step(const SessionState& state, const LppMessage& incoming, const UeContext& ue);

/// Location server role.
struct ServerContext {
    CellAssistance reference;
    std::vector<CellAssistance> neighbors;
    std::uint32_t transaction_id = 1;
    std::uint32_t response_time_subframes = kCycleSubframes;
};

/// Starts the session: RequestCapabilities.
StepResult server_begin(const SessionState& state, const ServerContext& server);
/// Sends RequestLocationInformation once assistance data is delivered.
StepResult server_request_location(const SessionState& state, const ServerContext& server, std::uint64_t now_subframe);
/// Handles ProvideCapabilities (answers with assistance data restricted to the
/// UE's bands) and ProvideLocationInformation (checks the response deadline).
StepResult server_step(const SessionState& state, const LppMessage& incoming, const ServerContext& server,
                       std::uint64_t now_subframe);

struct Transcript {
    std::vector<LppMessage> messages;
    SessionState server;
    SessionState ue;
};

/// Runs the five-message exchange. Every message goes through encode/decode.
Transcript run_session(const ServerContext& server, const UeContext& ue, std::uint64_t start_subframe = 0,
                       std::uint64_t measurement_duration_subframes = 0);

}  // namespace otdoa::lpp
