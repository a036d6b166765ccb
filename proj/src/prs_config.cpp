#include "otdoa/prs_config.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace otdoa {

BitString parse_bits(const std::string& text) {
    BitString bits;
    bits.reserve(text.size());
    for (char ch : text) {
        if (ch == '0' || ch == '1') {
            bits.push_back(ch == '1');
        } else {
            throw Error("bit string '" + text + "' contains a character other than 0/1");
        }
    }
    return bits;
}

std::string format_bits(const BitString& bits) {
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits) s.push_back(b ? '1' : '0');
    return s;
}

std::string to_string(Technology tech) {
    switch (tech) {
        case Technology::lte: return "lte";
        case Technology::ltem: return "ltem";
        case Technology::nbiot: return "nbiot";
    }
    return "?";
}

std::string to_string(DeploymentMode mode) {
    switch (mode) {
        case DeploymentMode::inband: return "inband";
        case DeploymentMode::guardband: return "guardband";
        case DeploymentMode::standalone: return "standalone";
    }
    return "?";
}

DeploymentMode parse_deployment_mode(const std::string& text) {
    if (text == "inband") return DeploymentMode::inband;
    if (text == "guardband") return DeploymentMode::guardband;
    if (text == "standalone") return DeploymentMode::standalone;
    throw DomainViolation("deployment_mode", text, "{inband, guardband, standalone}");
}

Technology technology_of(const PrsConfig& cfg) {
    return std::visit(
        [](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, LtePrsConfig>) return Technology::lte;
            else if constexpr (std::is_same_v<T, LtemPrsConfig>) return Technology::ltem;
            else return Technology::nbiot;
        },
        cfg);
}

int identity_of(const PrsConfig& cfg) {
    return std::visit(
        [](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, LtePrsConfig>) return c.physical_cell_id;
            else return c.prs_id;
        },
        cfg);
}

int grid_prbs_of(const PrsConfig& cfg) {
    if (const auto* n = std::get_if<NprsConfig>(&cfg)) {
        return n->deployment_mode == DeploymentMode::inband ? n->carrier_prbs : 1;
    }
    return std::visit([](const auto& c) { return c.carrier_prbs; }, cfg);
}

DomainViolation::DomainViolation(std::string field, std::string value, std::string allowed)
    : ConfigError("DomainViolation: " + field + " = " + value + " not in " + allowed),
      field_(std::move(field)),
      value_(std::move(value)),
      allowed_(std::move(allowed)) {}

MissingPart::MissingPart() : ConfigError("MissingPart: NPRS needs Part A, Part B, or both") {}

namespace {

constexpr std::array kPrsBandwidths{6, 15, 25, 50, 75, 100};
constexpr std::array kLegacyPeriods{160, 320, 640, 1280};
constexpr std::array kLteOccasionLengths{1, 2, 4, 6};
constexpr std::array kLtemPeriods{10, 20, 40, 80, 160, 320, 640, 1280};
constexpr std::array kLtemOccasionLengths{1, 2, 4, 6, 10, 20, 40, 80, 160};
constexpr std::array kLtemIntervals{10, 20, 40, 80};
constexpr std::array kMutingGroupSizes{1, 2, 4, 8, 16, 32, 64, 128};
constexpr std::array kMutingLengths{2, 4, 8, 16};
constexpr std::array kBitmapLengths{10, 40};
constexpr std::array kPartBOccasionLengths{10, 20, 40, 80, 160, 320, 640, 1280};
constexpr std::array kHoppingBands{2, 4};

template <std::size_t N>
std::string set_text(const std::array<int, N>& values) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < N; ++i) os << (i ? "," : "") << values[i];
    os << '}';
    return os.str();
}

template <std::size_t N>
void require_in(const char* field, int value, const std::array<int, N>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
        throw DomainViolation(field, std::to_string(value), set_text(allowed));
    }
}

void require_range(const char* field, long value, long lo, long hi_exclusive) {
    if (value < lo || value >= hi_exclusive) {
        throw DomainViolation(field, std::to_string(value),
                              "[" + std::to_string(lo) + "," + std::to_string(hi_exclusive) + ")");
    }
}

void check_muting(const char* field, const std::optional<MutingPattern>& muting) {
    if (muting) require_in(field, static_cast<int>(muting->bits.size()), kMutingLengths);
}

void check(const LtePrsConfig& c) {
    require_in("bandwidth_prbs", c.bandwidth_prbs, kPrsBandwidths);
    require_in("carrier_prbs", c.carrier_prbs, kPrsBandwidths);
    if (c.bandwidth_prbs > c.carrier_prbs) {
        throw GeometryViolation("GeometryViolation: PRS bandwidth " + std::to_string(c.bandwidth_prbs) +
                                " exceeds carrier " + std::to_string(c.carrier_prbs));
    }
    require_in("period_T_prs", c.period_T_prs, kLegacyPeriods);
    require_in("occasion_length", c.occasion_length, kLteOccasionLengths);
    require_range("subframe_offset", c.subframe_offset, 0, c.period_T_prs);
    check_muting("muting", c.muting);
    require_range("physical_cell_id", c.physical_cell_id, 0, 504);
}

void check(const LtemPrsConfig& c) {
    require_in("bandwidth_prbs", c.bandwidth_prbs, kPrsBandwidths);
    require_in("carrier_prbs", c.carrier_prbs, kPrsBandwidths);
    if (c.bandwidth_prbs > c.carrier_prbs) {
        throw GeometryViolation("GeometryViolation: PRS bandwidth " + std::to_string(c.bandwidth_prbs) +
                                " exceeds carrier " + std::to_string(c.carrier_prbs));
    }
    require_in("period_T_prs", c.period_T_prs, kLtemPeriods);
    require_in("occasion_length", c.occasion_length, kLtemOccasionLengths);
    if (c.occasion_interval) {
        require_in("occasion_interval", *c.occasion_interval, kLtemIntervals);
        if (c.occasion_length > *c.occasion_interval) {
            throw GeometryViolation("GeometryViolation: occasion_length " + std::to_string(c.occasion_length) +
                                    " exceeds occasion_interval " + std::to_string(*c.occasion_interval));
        }
        if (*c.occasion_interval > c.period_T_prs || c.period_T_prs % *c.occasion_interval != 0) {
            throw GeometryViolation("GeometryViolation: occasion_interval " + std::to_string(*c.occasion_interval) +
                                    " does not divide period_T_prs " + std::to_string(c.period_T_prs));
        }
    } else if (c.occasion_length > c.period_T_prs) {
        throw GeometryViolation("GeometryViolation: occasion_length " + std::to_string(c.occasion_length) +
                                " exceeds period_T_prs " + std::to_string(c.period_T_prs));
    }
    require_range("subframe_offset", c.subframe_offset, 0, c.period_T_prs);
    require_range("prs_id", c.prs_id, 0, 4096);
    check_muting("muting", c.muting);
    if (c.muting_group_size) require_in("muting_group_size", *c.muting_group_size, kMutingGroupSizes);
    if (c.hopping) {
        const auto& h = *c.hopping;
        require_in("hopping.n_bands", h.n_bands, kHoppingBands);
        if (c.bandwidth_prbs != 6) {
            throw GeometryViolation("GeometryViolation: frequency hopping requires a 6-PRB PRS, got " +
                                    std::to_string(c.bandwidth_prbs));
        }
        if (static_cast<int>(h.band_prb_offsets.size()) != h.n_bands) {
            throw DomainViolation("hopping.band_prb_offsets", std::to_string(h.band_prb_offsets.size()) + " entries",
                                  "exactly n_bands entries");
        }
        for (int start : h.band_prb_offsets) {
            if (start < 0 || start + 6 > c.carrier_prbs) {
                throw GeometryViolation("GeometryViolation: hopping band at PRB " + std::to_string(start) +
                                        " outside the " + std::to_string(c.carrier_prbs) + "-PRB carrier");
            }
        }
        if (h.band_prb_offsets.front() != center_band_start(c.carrier_prbs)) {
            throw GeometryViolation("GeometryViolation: first hopping band must start at center PRB " +
                                    std::to_string(center_band_start(c.carrier_prbs)));
        }
    }
}

void check(const NprsConfig& c) {
    if (!c.part_a && !c.part_b) throw MissingPart();
    if (c.part_a) {
        require_in("part_a.nprs_bitmap", static_cast<int>(c.part_a->nprs_bitmap.size()), kBitmapLengths);
        check_muting("part_a.muting", c.part_a->muting);
    }
    if (c.part_b) {
        const auto& b = *c.part_b;
        require_in("part_b.period_T_prs", b.period_T_prs, kLegacyPeriods);
        require_range("part_b.offset_fraction_a", b.offset_eighths, 0, 8);
        require_in("part_b.occasion_length", b.occasion_length, kPartBOccasionLengths);
        if (b.occasion_length > b.period_T_prs) {
            throw GeometryViolation("GeometryViolation: part_b.occasion_length " + std::to_string(b.occasion_length) +
                                    " exceeds period_T_prs " + std::to_string(b.period_T_prs));
        }
        check_muting("part_b.muting", b.muting);
    }
    require_range("prs_id", c.prs_id, 0, 4096);
    if (c.deployment_mode == DeploymentMode::inband) {
        require_in("carrier_prbs", c.carrier_prbs, kPrsBandwidths);
        if (c.inband_prb_index < 0 || c.inband_prb_index >= c.carrier_prbs) {
            throw GeometryViolation("GeometryViolation: inband_prb_index " + std::to_string(c.inband_prb_index) +
                                    " outside the " + std::to_string(c.carrier_prbs) + "-PRB carrier");
        }
    }
}

}  // namespace

ValidatedConfig validate(const PrsConfig& config) {
    std::visit([](const auto& c) { check(c); }, config);
    return ValidatedConfig(config);
}

int partb_offset_subframes(const NprsPeriodicConfig& cfg) { return cfg.offset_eighths * cfg.period_T_prs / 8; }

}  // namespace otdoa
