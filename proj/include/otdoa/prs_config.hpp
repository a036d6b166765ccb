#pragma once

// Positioning reference signal configurations for LTE (Rel-9), LTE-M and
// NB-IoT (Rel-14), with the value domains of the three families.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "otdoa/common.hpp"

namespace otdoa {

enum class Technology { lte, ltem, nbiot };
enum class DeploymentMode { inband, guardband, standalone };

std::string to_string(Technology tech);
std::string to_string(DeploymentMode mode);
DeploymentMode parse_deployment_mode(const std::string& text);

/// Bit 1 = PRS transmitted, bit 0 = muted. Bit i gates ordinal i mod size().
struct MutingPattern {
    BitString bits;

    bool transmits(long ordinal) const { return bits[static_cast<std::size_t>(ordinal) % bits.size()]; }
    friend bool operator==(const MutingPattern&, const MutingPattern&) = default;
};

struct HoppingConfig {
    int n_bands = 2;
    /// PRB start of each 6-PRB band; entry 0 is the center of the host carrier.
    std::vector<int> band_prb_offsets;

    friend bool operator==(const HoppingConfig&, const HoppingConfig&) = default;
};

struct LtePrsConfig {
    int bandwidth_prbs = 50;
    int carrier_prbs = 50;
    int period_T_prs = 160;
    int occasion_length = 1;
    int subframe_offset = 0;
    std::optional<MutingPattern> muting;
    int physical_cell_id = 0;

    friend bool operator==(const LtePrsConfig&, const LtePrsConfig&) = default;
};

struct LtemPrsConfig {
    int bandwidth_prbs = 6;
    int carrier_prbs = 50;
    int period_T_prs = 160;
    int occasion_length = 1;
    /// Absent: one occasion per legacy period.
    std::optional<int> occasion_interval;
    int subframe_offset = 0;
    int prs_id = 0;
    std::optional<HoppingConfig> hopping;
    std::optional<MutingPattern> muting;
    /// Absent: one muting bit per legacy period.
    std::optional<int> muting_group_size;

    friend bool operator==(const LtemPrsConfig&, const LtemPrsConfig&) = default;
};

/// Part A: per-subframe bitmap repeated in every radio frame.
struct NprsBitmapConfig {
    BitString nprs_bitmap;
    std::optional<MutingPattern> muting;

    friend bool operator==(const NprsBitmapConfig&, const NprsBitmapConfig&) = default;
};

/// Part B: periodic occasions, offset = (offset_eighths / 8) * period.
struct NprsPeriodicConfig {
    int period_T_prs = 160;
    int offset_eighths = 0;
    int occasion_length = 10;
    std::optional<MutingPattern> muting;

    friend bool operator==(const NprsPeriodicConfig&, const NprsPeriodicConfig&) = default;
};

struct NprsConfig {
    std::optional<NprsBitmapConfig> part_a;
    std::optional<NprsPeriodicConfig> part_b;
    int prs_id = 0;
    DeploymentMode deployment_mode = DeploymentMode::inband;
    /// Host LTE carrier size; only meaningful for inband.
    int carrier_prbs = 50;
    int inband_prb_index = 0;

    friend bool operator==(const NprsConfig&, const NprsConfig&) = default;
};

using PrsConfig = std::variant<LtePrsConfig, LtemPrsConfig, NprsConfig>;

Technology technology_of(const PrsConfig& cfg);
/// Cell identity that drives the sequence seed and the frequency shift.
int identity_of(const PrsConfig& cfg);
/// Number of PRBs of the grid the config is mapped onto.
int grid_prbs_of(const PrsConfig& cfg);

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainViolation : public ConfigError {
public:
    DomainViolation(std::string field, std::string value, std::string allowed);
    const std::string& field() const { return field_; }
    const std::string& value() const { return value_; }
    const std::string& allowed() const { return allowed_; }

private:
    std::string field_, value_, allowed_;
};

class MissingPart : public ConfigError {
public:
    MissingPart();
};

class GeometryViolation : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A config that passed validate(); immutable afterwards.
class ValidatedConfig {
public:
    const PrsConfig& config() const { return config_; }
    Technology technology() const { return technology_of(config_); }

    template <typename T>
    const T& as() const { return std::get<T>(config_); }

    friend bool operator==(const ValidatedConfig&, const ValidatedConfig&) = default;

private:
    friend ValidatedConfig validate(const PrsConfig& config);
    explicit ValidatedConfig(PrsConfig c) : config_(std::move(c)) {}
    PrsConfig config_;
};

ValidatedConfig validate(const PrsConfig& config);
inline ValidatedConfig validate(const ValidatedConfig& config) { return validate(config.config()); }

int partb_offset_subframes(const NprsPeriodicConfig& cfg);

/// Reuse-6 frequency shift of a physical cell id or PRS id.
constexpr int frequency_shift(int id) { return id % 6; }

/// PRB start of the centered 6-PRB band of a host carrier.
constexpr int center_band_start(int carrier_prbs) { return (carrier_prbs - 6) / 2; }

}  // namespace otdoa
