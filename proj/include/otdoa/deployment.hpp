#pragma once

// Hexagonal macro deployment, UE drops and per-link propagation.

#include <random>
#include <string>
#include <vector>

#include "otdoa/common.hpp"

namespace otdoa {

using Rng = std::mt19937_64;

struct Cell {
    int index = 0;  ///< global cell index, also used as PCI / PRS id
    int site = 0;
    int sector = 0;
    Position position;
    double azimuth_deg = 0.0;
};

struct Site {
    Position position;
};

struct DeploymentParams {
    double isd_m = 700.0;
    int rings = 1;
    double carrier_hz = 700e6;
    double tx_power_dbm = 46.0;
    double noise_figure_db = 5.0;
    /// Extra loss on every link (building entry, body loss), dB.
    double penetration_loss_db = 0.0;
    /// Host carrier size; transmit power is spread evenly over its subcarriers.
    int carrier_prbs = 50;

    friend bool operator==(const DeploymentParams&, const DeploymentParams&) = default;
};

struct Deployment {
    DeploymentParams params;
    std::vector<Site> sites;
    std::vector<Cell> cells;
};

Deployment hex_layout(double isd_m, int rings);
Deployment hex_layout(const DeploymentParams& params);

/// Macro urban log-distance model in dB; distance clamped below at 1 m.
double path_loss_db(double distance_m, double carrier_hz);

enum class ChannelProfile { awgn, short_delay_spread, long_delay_spread };
ChannelProfile parse_channel_profile(const std::string& text);
std::string to_string(ChannelProfile profile);

struct Tap {
    double excess_delay_s = 0.0;
    /// Mean power relative to the total, dB. Powers of a profile sum to 0 dB.
    double mean_power_db = 0.0;

    friend bool operator==(const Tap&, const Tap&) = default;
};

std::vector<Tap> profile_taps(ChannelProfile profile);

struct Link {
    int cell = 0;
    double distance_m = 0.0;
    double true_delay_s = 0.0;
    double path_loss_db = 0.0;
    std::vector<Tap> taps;
    /// Complex tap amplitudes of the current fading realization, E|g|^2 = tap power.
    std::vector<cplx> gains;
    /// Per resource element SNR; equals the SNR over the occupied PRS bandwidth.
    double snr_db = 0.0;

    friend bool operator==(const Link&, const Link&) = default;
};

/// Thermal noise per resource element (15 kHz) including the noise figure.
double noise_per_re_dbm(double noise_figure_db);
/// Transmit power per resource element when tx power is spread over the host carrier.
double tx_per_re_dbm(const DeploymentParams& params);
double received_per_re_dbm(const DeploymentParams& params, double distance_m);

Link make_link(const Deployment& deployment, const Cell& cell, Position ue, ChannelProfile profile, Rng& rng);

/// Draws new Rayleigh tap amplitudes for link (AWGN stays a fixed unit tap).
void refade(Link& link, Rng& rng);

/// Frequency response at subcarrier frequency index k (relative to DC), including the propagation delay.
cplx channel_response(const Link& link, int frequency_index);

struct UeDrop {
    Position position;
    int serving_cell = 0;
    std::uint64_t rng_seed = 0;
};

/// Strongest mean received cell; ties go to the lowest cell index.
int serving_cell(const Deployment& deployment, Position ue);

/// Uniform drop inside the central site's hexagon, at least min_distance_m from the site.
UeDrop drop_ue(const Deployment& deployment, std::uint64_t seed, double min_distance_m = 35.0);

}  // namespace otdoa
