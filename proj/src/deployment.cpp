#include "otdoa/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace otdoa {

Deployment hex_layout(double isd_m, int rings) {
    DeploymentParams params;
    params.isd_m = isd_m;
    params.rings = rings;
    return hex_layout(params);
}

Deployment hex_layout(const DeploymentParams& params) {
    if (params.rings < 0) throw Error("hex_layout: rings must be >= 0");
    Deployment d;
    d.params = params;
    const double isd = params.isd_m;
    const double s3 = std::sqrt(3.0);
    // Axial coordinates, ring by ring; ring 0 is the central site.
    d.sites.push_back({{0.0, 0.0}});
    static constexpr int dirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    for (int ring = 1; ring <= params.rings; ++ring) {
        int q = ring * dirs[4][0];
        int r = ring * dirs[4][1];
        for (const auto& dir : dirs) {
            for (int step = 0; step < ring; ++step) {
                d.sites.push_back({{isd * (q + r / 2.0), isd * (s3 / 2.0) * r}});
                q += dir[0];
                r += dir[1];
            }
        }
    }
    for (std::size_t s = 0; s < d.sites.size(); ++s) {
        for (int sector = 0; sector < 3; ++sector) {
            Cell c;
            c.index = static_cast<int>(d.cells.size());
            c.site = static_cast<int>(s);
            c.sector = sector;
            c.position = d.sites[s].position;
            c.azimuth_deg = 30.0 + 120.0 * sector;
            d.cells.push_back(c);
        }
    }
    return d;
}

double path_loss_db(double distance_m, double carrier_hz) {
    const double d = std::max(distance_m, 1.0);
    return 128.1 + 37.6 * std::log10(d / 1000.0) + 20.0 * std::log10(carrier_hz / 2e9);
}

ChannelProfile parse_channel_profile(const std::string& text) {
    if (text == "awgn") return ChannelProfile::awgn;
    if (text == "short_delay_spread") return ChannelProfile::short_delay_spread;
    if (text == "long_delay_spread") return ChannelProfile::long_delay_spread;
    throw Error("unknown channel_profile '" + text + "' (awgn, short_delay_spread, long_delay_spread)");
}

std::string to_string(ChannelProfile profile) {
    switch (profile) {
        case ChannelProfile::awgn: return "awgn";
        case ChannelProfile::short_delay_spread: return "short_delay_spread";
        case ChannelProfile::long_delay_spread: return "long_delay_spread";
    }
    return "?";
}

std::vector<Tap> profile_taps(ChannelProfile profile) {
    std::vector<Tap> taps;
    switch (profile) {
        case ChannelProfile::awgn: return {{0.0, 0.0}};
        case ChannelProfile::short_delay_spread:
            taps = {{0.0, 0.0}, {0.2e-6, -3.0}, {0.5e-6, -6.0}};
            break;
        case ChannelProfile::long_delay_spread:
            taps = {{0.0, 0.0}, {0.5e-6, -1.5}, {1.2e-6, -3.0}, {2.3e-6, -5.0}, {3.5e-6, -8.0}, {5.0e-6, -11.0}};
            break;
    }
    double total = 0.0;
    for (const auto& t : taps) total += db_to_linear(t.mean_power_db);
    for (auto& t : taps) t.mean_power_db -= linear_to_db(total);
    return taps;
}

double noise_per_re_dbm(double noise_figure_db) {
    return -174.0 + 10.0 * std::log10(kSubcarrierSpacingHz) + noise_figure_db;
}

double tx_per_re_dbm(const DeploymentParams& params) {
    return params.tx_power_dbm - 10.0 * std::log10(kSubcarriersPerPrb * params.carrier_prbs);
}

double received_per_re_dbm(const DeploymentParams& params, double distance_m) {
    return tx_per_re_dbm(params) - path_loss_db(distance_m, params.carrier_hz) - params.penetration_loss_db;
}

void refade(Link& link, Rng& rng) {
    link.gains.resize(link.taps.size());
    if (link.taps.size() == 1) {
        link.gains[0] = cplx(1.0, 0.0);
        return;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < link.taps.size(); ++i) {
        const double sigma = std::sqrt(db_to_linear(link.taps[i].mean_power_db) / 2.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        link.gains[i] = cplx(sigma * re, sigma * im);
    }
}

Link make_link(const Deployment& deployment, const Cell& cell, Position ue, ChannelProfile profile, Rng& rng) {
    Link link;
    link.cell = cell.index;
    link.distance_m = distance(cell.position, ue);
    link.true_delay_s = link.distance_m / kSpeedOfLight;
    link.path_loss_db = path_loss_db(link.distance_m, deployment.params.carrier_hz);
    link.taps = profile_taps(profile);
    link.snr_db = received_per_re_dbm(deployment.params, link.distance_m) - noise_per_re_dbm(deployment.params.noise_figure_db);
    refade(link, rng);
    return link;
}

cplx channel_response(const Link& link, int frequency_index) {
    cplx h{};
    const double w = -2.0 * std::numbers::pi * kSubcarrierSpacingHz * frequency_index;
    for (std::size_t i = 0; i < link.taps.size(); ++i) {
        h += link.gains[i] * std::polar(1.0, w * (link.true_delay_s + link.taps[i].excess_delay_s));
    }
    return h;
}

int serving_cell(const Deployment& deployment, Position ue) {
    int best = 0;
    double best_power = -1e300;
    for (const auto& c : deployment.cells) {
        const double p = received_per_re_dbm(deployment.params, distance(c.position, ue));
        if (p > best_power) {
            best_power = p;
            best = c.index;
        }
    }
    return best;
}

UeDrop drop_ue(const Deployment& deployment, std::uint64_t seed, double min_distance_m) {
    Rng rng(seed);
    const double apothem = deployment.params.isd_m / 2.0;
    const double radius = deployment.params.isd_m / std::sqrt(3.0);
    std::uniform_real_distribution<double> u(-radius, radius);
    Position p;
    for (;;) {
        p = {u(rng), u(rng)};
        bool inside = std::hypot(p.x, p.y) >= min_distance_m;
        for (int i = 0; i < 6 && inside; ++i) {
            const double a = i * std::numbers::pi / 3.0;
            inside = p.x * std::cos(a) + p.y * std::sin(a) <= apothem;
        }
        if (inside) break;
    }
    return {p, serving_cell(deployment, p), seed};
}

}  // namespace otdoa
