#include "otdoa/scheduler.hpp"

#include <algorithm>
#include <numeric>

namespace otdoa {

void SubframeSchedule::push_back(ScheduledSubframe entry) {
    if (entry.abs_sf < 0 || entry.abs_sf >= kCycleSubframes) {
        throw Error("schedule entry " + std::to_string(entry.abs_sf) + " outside the system frame cycle");
    }
    if (!entries_.empty() && entries_.back().abs_sf >= entry.abs_sf) {
        throw Error("schedule entries must be strictly increasing");
    }
    mask_[entry.abs_sf] = true;
    entries_.push_back(entry);
}

std::vector<int> SubframeSchedule::subframes() const {
    std::vector<int> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.abs_sf);
    return out;
}

const ScheduledSubframe& SubframeSchedule::at(int abs_sf) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), abs_sf,
                               [](const ScheduledSubframe& e, int sf) { return e.abs_sf < sf; });
    if (it == entries_.end() || it->abs_sf != abs_sf) {
        throw Error("subframe " + std::to_string(abs_sf) + " carries no PRS");
    }
    return *it;
}

PartANotInvalid::PartANotInvalid(int subframe)
    : Error("PartANotInvalid: Part-A NPRS subframe " + std::to_string(subframe) +
            " is marked valid in the valid-subframe bitmap"),
      subframe_(subframe) {}

SubframeSchedule expand_lte(const LtePrsConfig& cfg) {
    SubframeSchedule out;
    for (long k = 0;; ++k) {
        const long start = cfg.subframe_offset + k * cfg.period_T_prs;
        if (start >= kCycleSubframes) break;
        if (cfg.muting && !cfg.muting->transmits(k)) continue;
        for (int j = 0; j < cfg.occasion_length && start + j < kCycleSubframes; ++j) {
            out.push_back({static_cast<int>(start + j), 0, k});
        }
    }
    return out;
}

SubframeSchedule expand_ltem(const LtemPrsConfig& cfg) {
    SubframeSchedule out;
    const int per_period = cfg.occasion_interval ? cfg.period_T_prs / *cfg.occasion_interval : 1;
    const int interval = cfg.occasion_interval.value_or(cfg.period_T_prs);
    const int n_bands = cfg.hopping ? cfg.hopping->n_bands : 1;
    for (long k = 0;; ++k) {
        const long period_start = cfg.subframe_offset + k * cfg.period_T_prs;
        if (period_start >= kCycleSubframes) break;
        for (int m = 0; m < per_period; ++m) {
            const long start = period_start + static_cast<long>(m) * interval;
            if (start >= kCycleSubframes) break;
            const long ordinal = k * per_period + m;
            if (cfg.muting) {
                const long bit = cfg.muting_group_size ? ordinal / *cfg.muting_group_size : k;
                if (!cfg.muting->transmits(bit)) continue;
            }
            const int band = static_cast<int>(ordinal % n_bands);
            for (int j = 0; j < cfg.occasion_length && start + j < kCycleSubframes; ++j) {
                out.push_back({static_cast<int>(start + j), band, ordinal});
            }
        }
    }
    return out;
}

namespace {

void check_part_a_invalid(const NprsBitmapConfig& a, const ValidSubframeBitmap& valid) {
    if (valid.bits.size() != 10 && valid.bits.size() != 40) {
        throw DomainViolation("valid_subframes", std::to_string(valid.bits.size()) + " bits", "{10,40}");
    }
    const std::size_t span = std::lcm(a.nprs_bitmap.size(), valid.bits.size());
    for (std::size_t sf = 0; sf < span; ++sf) {
        if (a.nprs_bitmap[sf % a.nprs_bitmap.size()] && valid.bits[sf % valid.bits.size()]) {
            throw PartANotInvalid(static_cast<int>(sf));
        }
    }
}

}  // namespace

SubframeSchedule expand_nprs(const NprsConfig& cfg, const ValidSubframeBitmap& valid) {
    std::vector<bool> in_a(kCycleSubframes, true);
    std::vector<bool> in_b(kCycleSubframes, true);
    std::vector<long> b_ordinal(kCycleSubframes, -1);

    if (cfg.part_a) {
        const auto& a = *cfg.part_a;
        check_part_a_invalid(a, valid);
        const std::size_t len = a.nprs_bitmap.size();
        for (int sf = 0; sf < kCycleSubframes; ++sf) {
            bool on = a.nprs_bitmap[sf % len];
            if (on && a.muting && !a.muting->transmits(sf / 10)) on = false;
            in_a[sf] = on;
        }
    }
    if (cfg.part_b) {
        const auto& b = *cfg.part_b;
        std::fill(in_b.begin(), in_b.end(), false);
        const int offset = partb_offset_subframes(b);
        for (long k = 0;; ++k) {
            const long start = offset + k * b.period_T_prs;
            if (start >= kCycleSubframes) break;
            const bool muted = b.muting && !b.muting->transmits(k);
            for (int j = 0; j < b.occasion_length && start + j < kCycleSubframes; ++j) {
                in_b[start + j] = !muted;
                b_ordinal[start + j] = k;
            }
        }
    }

    SubframeSchedule out;
    const long bitmap_len = cfg.part_a ? static_cast<long>(cfg.part_a->nprs_bitmap.size()) : 0;
    for (int sf = 0; sf < kCycleSubframes; ++sf) {
        if (!in_a[sf] || !in_b[sf]) continue;
        const long occasion = cfg.part_b ? b_ordinal[sf] : sf / bitmap_len;
        out.push_back({sf, 0, occasion});
    }
    return out;
}

ValidSubframeBitmap complement_of_part_a(const NprsConfig& cfg) {
    if (!cfg.part_a) return {BitString(10, true)};
    BitString bits;
    for (bool b : cfg.part_a->nprs_bitmap) bits.push_back(!b);
    return {bits};
}

SubframeSchedule expand(const ValidatedConfig& cfg, const ValidSubframeBitmap* valid) {
    switch (cfg.technology()) {
        case Technology::lte: return expand_lte(cfg.as<LtePrsConfig>());
        case Technology::ltem: return expand_ltem(cfg.as<LtemPrsConfig>());
        case Technology::nbiot: {
            const auto& n = cfg.as<NprsConfig>();
            if (valid) return expand_nprs(n, *valid);
            return expand_nprs(n, complement_of_part_a(n));
        }
    }
    return {};
}

}  // namespace otdoa
