#pragma once

// Reference implementations and random generators shared by the unit tests
// and the acceptance runner. Everything here is written from the definitions,
// independently of the library code it checks.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "otdoa/lpp.hpp"
#include "otdoa/prs_config.hpp"
#include "otdoa/scheduler.hpp"

namespace oracle {

using namespace otdoa;

// ---- Gold sequence -------------------------------------------------------

/// Straight-line register recurrences with explicit 1600-step fast-forward.
inline std::vector<std::uint8_t> gold(std::uint32_t c_init, std::size_t n) {
    const std::size_t total = 1600 + n + 31;
    std::vector<std::uint8_t> x1(total, 0), x2(total, 0);
    x1[0] = 1;
    for (int i = 0; i < 31; ++i) x2[static_cast<std::size_t>(i)] = (c_init >> i) & 1u;
    for (std::size_t i = 0; i + 31 < total; ++i) {
        x1[i + 31] = (x1[i + 3] + x1[i]) % 2;
        x2[i + 31] = (x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) % 2;
    }
    std::vector<std::uint8_t> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (x1[i + 1600] + x2[i + 1600]) % 2;
    return c;
}

// ---- Per-subframe schedule evaluator --------------------------------------

struct Slot {
    int abs_sf;
    int band;
    friend bool operator==(const Slot&, const Slot&) = default;
};

inline bool bit(const MutingPattern& m, long index) { return m.bits[static_cast<std::size_t>(index % static_cast<long>(m.bits.size()))]; }

inline std::vector<Slot> lte(const LtePrsConfig& c) {
    std::vector<Slot> out;
    for (int sf = c.subframe_offset; sf < kCycleSubframes; ++sf) {
        const int rel = sf - c.subframe_offset;
        if (rel % c.period_T_prs >= c.occasion_length) continue;
        if (c.muting && !bit(*c.muting, rel / c.period_T_prs)) continue;
        out.push_back({sf, 0});
    }
    return out;
}

inline std::vector<Slot> ltem(const LtemPrsConfig& c) {
    const int interval = c.occasion_interval.value_or(c.period_T_prs);
    const int per_period = c.period_T_prs / interval;
    std::vector<Slot> out;
    for (int sf = c.subframe_offset; sf < kCycleSubframes; ++sf) {
        const int rel = sf - c.subframe_offset;
        const long period = rel / c.period_T_prs;
        const int within = rel % c.period_T_prs;
        const int m = within / interval;
        if (m >= per_period || within % interval >= c.occasion_length) continue;
        const long occasion = period * per_period + m;
        if (c.muting) {
            const long index = c.muting_group_size ? occasion / *c.muting_group_size : period;
            if (!bit(*c.muting, index)) continue;
        }
        out.push_back({sf, c.hopping ? static_cast<int>(occasion % c.hopping->n_bands) : 0});
    }
    return out;
}

inline bool nprs_part_a(const NprsBitmapConfig& a, int sf) {
    if (!a.nprs_bitmap[static_cast<std::size_t>(sf) % a.nprs_bitmap.size()]) return false;
    return !a.muting || bit(*a.muting, sf / 10);
}

inline bool nprs_part_b(const NprsPeriodicConfig& b, int sf) {
    const int offset = b.period_T_prs * b.offset_eighths / 8;
    if (sf < offset) return false;
    const int rel = sf - offset;
    if (rel % b.period_T_prs >= b.occasion_length) return false;
    return !b.muting || bit(*b.muting, rel / b.period_T_prs);
}

inline std::vector<Slot> nprs(const NprsConfig& c) {
    std::vector<Slot> out;
    for (int sf = 0; sf < kCycleSubframes; ++sf) {
        if (c.part_a && !nprs_part_a(*c.part_a, sf)) continue;
        if (c.part_b && !nprs_part_b(*c.part_b, sf)) continue;
        out.push_back({sf, 0});
    }
    return out;
}

inline std::vector<Slot> slots(const PrsConfig& c) {
    if (const auto* l = std::get_if<LtePrsConfig>(&c)) return lte(*l);
    if (const auto* m = std::get_if<LtemPrsConfig>(&c)) return ltem(*m);
    return nprs(std::get<NprsConfig>(c));
}

inline std::vector<Slot> slots(const SubframeSchedule& s) {
    std::vector<Slot> out;
    for (const auto& e : s.entries()) out.push_back({e.abs_sf, e.band_index});
    return out;
}

/// Period after which the schedule repeats, or 0 if it does not divide the cycle.
inline long super_period(const PrsConfig& cfg) {
    long p = 1;
    if (const auto* l = std::get_if<LtePrsConfig>(&cfg)) {
        p = l->period_T_prs * (l->muting ? static_cast<long>(l->muting->bits.size()) : 1L);
    } else if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        const long interval = m->occasion_interval.value_or(m->period_T_prs);
        p = m->period_T_prs;
        if (m->muting) {
            const long bits = static_cast<long>(m->muting->bits.size());
            p = std::lcm(p, m->muting_group_size ? bits * *m->muting_group_size * interval : bits * m->period_T_prs);
        }
        if (m->hopping) p = std::lcm(p, m->hopping->n_bands * interval);
    } else {
        const auto& n = std::get<NprsConfig>(cfg);
        if (n.part_a) {
            p = std::lcm(p, static_cast<long>(n.part_a->nprs_bitmap.size()));
            if (n.part_a->muting) p = std::lcm(p, 10L * static_cast<long>(n.part_a->muting->bits.size()));
        }
        if (n.part_b) {
            const long b = n.part_b->period_T_prs * (n.part_b->muting ? static_cast<long>(n.part_b->muting->bits.size()) : 1L);
            p = std::lcm(p, b);
        }
    }
    return kCycleSubframes % p == 0 ? p : 0;
}

// ---- Random valid configurations -----------------------------------------

using Rng = std::mt19937_64;

template <typename T>
T pick(Rng& rng, std::initializer_list<T> values) {
    std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
    return *(values.begin() + static_cast<std::ptrdiff_t>(d(rng)));
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng) { return uniform(rng, 0, 1) == 1; }

inline BitString random_bits(Rng& rng, int n) {
    BitString b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = coin(rng);
    return b;
}

inline MutingPattern random_muting(Rng& rng) { return {random_bits(rng, pick(rng, {2, 4, 8, 16}))}; }
inline std::optional<MutingPattern> maybe_muting(Rng& rng) {
    if (coin(rng)) return std::nullopt;
    return random_muting(rng);
}

inline LtePrsConfig random_lte(Rng& rng) {
    LtePrsConfig c;
    c.carrier_prbs = pick(rng, {6, 15, 25, 50, 75, 100});
    do c.bandwidth_prbs = pick(rng, {6, 15, 25, 50, 75, 100});
    while (c.bandwidth_prbs > c.carrier_prbs);
    c.period_T_prs = pick(rng, {160, 320, 640, 1280});
    c.occasion_length = pick(rng, {1, 2, 4, 6});
    c.subframe_offset = uniform(rng, 0, c.period_T_prs - 1);
    c.muting = maybe_muting(rng);
    c.physical_cell_id = uniform(rng, 0, 503);
    return c;
}

inline LtemPrsConfig random_ltem(Rng& rng) {
    LtemPrsConfig c;
    c.carrier_prbs = pick(rng, {6, 15, 25, 50, 75, 100});
    c.bandwidth_prbs = coin(rng) ? 6 : pick(rng, {6, 15, 25, 50, 75, 100});
    if (c.bandwidth_prbs > c.carrier_prbs) c.bandwidth_prbs = 6;
    c.period_T_prs = pick(rng, {10, 20, 40, 80, 160, 320, 640, 1280});
    if (coin(rng)) {
        int interval;
        do interval = pick(rng, {10, 20, 40, 80});
        while (interval > c.period_T_prs);
        c.occasion_interval = interval;
    }
    const int limit = c.occasion_interval.value_or(c.period_T_prs);
    do c.occasion_length = pick(rng, {1, 2, 4, 6, 10, 20, 40, 80, 160});
    while (c.occasion_length > limit);
    c.subframe_offset = uniform(rng, 0, c.period_T_prs - 1);
    c.prs_id = uniform(rng, 0, 4095);
    c.muting = maybe_muting(rng);
    if (c.muting && coin(rng)) c.muting_group_size = pick(rng, {1, 2, 4, 8, 16, 32, 64, 128});
    if (c.bandwidth_prbs == 6 && c.carrier_prbs > 6 && coin(rng)) {
        HoppingConfig h;
        h.n_bands = pick(rng, {2, 4});
        h.band_prb_offsets.push_back(center_band_start(c.carrier_prbs));
        for (int i = 1; i < h.n_bands; ++i) h.band_prb_offsets.push_back(uniform(rng, 0, c.carrier_prbs - 6));
        c.hopping = h;
    }
    return c;
}

inline NprsConfig random_nprs(Rng& rng) {
    NprsConfig c;
    const int which = uniform(rng, 0, 2);
    if (which != 1) c.part_a = NprsBitmapConfig{random_bits(rng, pick(rng, {10, 40})), maybe_muting(rng)};
    if (which != 0) {
        NprsPeriodicConfig b;
        b.period_T_prs = pick(rng, {160, 320, 640, 1280});
        b.offset_eighths = uniform(rng, 0, 7);
        do b.occasion_length = pick(rng, {10, 20, 40, 80, 160, 320, 640, 1280});
        while (b.occasion_length > b.period_T_prs);
        b.muting = maybe_muting(rng);
        c.part_b = b;
    }
    c.prs_id = uniform(rng, 0, 4095);
    c.deployment_mode = pick(rng, {DeploymentMode::inband, DeploymentMode::guardband, DeploymentMode::standalone});
    c.carrier_prbs = pick(rng, {6, 15, 25, 50, 75, 100});
    c.inband_prb_index = uniform(rng, 0, c.carrier_prbs - 1);
    return c;
}

inline PrsConfig random_config(Rng& rng, Technology tech) {
    switch (tech) {
        case Technology::lte: return random_lte(rng);
        case Technology::ltem: return random_ltem(rng);
        case Technology::nbiot: return random_nprs(rng);
    }
    return {};
}

// Same config with every muting pattern removed or replaced by all ones.
inline PrsConfig with_muting(PrsConfig cfg, bool all_ones) {
    auto replace = [&](std::optional<MutingPattern>& m) {
        if (!m) return;
        if (all_ones) std::fill(m->bits.begin(), m->bits.end(), true);
        else m.reset();
    };
    if (auto* l = std::get_if<LtePrsConfig>(&cfg)) replace(l->muting);
    if (auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        replace(m->muting);
        if (!m->muting) m->muting_group_size.reset();
    }
    if (auto* n = std::get_if<NprsConfig>(&cfg)) {
        if (n->part_a) replace(n->part_a->muting);
        if (n->part_b) replace(n->part_b->muting);
    }
    return cfg;
}

// ---- Random LPP messages -------------------------------------------------

inline double random_double(Rng& rng) { return std::uniform_real_distribution<double>(-1e-5, 1e-5)(rng); }

inline lpp::CellAssistance random_cell(Rng& rng) {
    lpp::CellAssistance c;
    c.cell_id = uniform(rng, -5, 100000);
    c.band = static_cast<std::uint16_t>(uniform(rng, 0, 65535));
    c.prs = random_config(rng, pick(rng, {Technology::lte, Technology::ltem, Technology::nbiot}));
    return c;
}

inline lpp::LppMessage random_message(Rng& rng) {
    const auto tid = static_cast<std::uint32_t>(rng());
    switch (uniform(rng, 0, 4)) {
        case 0: return lpp::RequestCapabilities{tid};
        case 1: {
            lpp::ProvideCapabilities m;
            m.transaction_id = tid;
            const int n = uniform(rng, 0, 6);
            for (int i = 0; i < n; ++i) m.supported_bands.push_back(static_cast<std::uint16_t>(uniform(rng, 0, 65535)));
            m.max_bandwidth = static_cast<lpp::BandwidthClass>(uniform(rng, 0, 3));
            m.inter_frequency_rstd = coin(rng);
            return m;
        }
        case 2: {
            lpp::ProvideAssistanceData m;
            m.transaction_id = tid;
            m.reference = random_cell(rng);
            const int n = uniform(rng, 0, 5);
            for (int i = 0; i < n; ++i) m.neighbors.push_back(random_cell(rng));
            return m;
        }
        case 3: return lpp::RequestLocationInformation{tid, static_cast<std::uint32_t>(rng())};
        default: {
            lpp::ProvideLocationInformation m;
            m.transaction_id = tid;
            const int n = uniform(rng, 0, 20);
            for (int i = 0; i < n; ++i) {
                m.measurements.push_back({uniform(rng, 0, 503), uniform(rng, 0, 503), random_double(rng),
                                          std::uniform_real_distribution<double>(-10, 40)(rng)});
            }
            return m;
        }
    }
}

}  // namespace oracle
