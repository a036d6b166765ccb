#pragma once

// Expansion of PRS configurations into transmitted subframes over one
// 10240-subframe system frame cycle.

#include <span>
#include <vector>

#include "otdoa/prs_config.hpp"

namespace otdoa {

struct ScheduledSubframe {
    int abs_sf = 0;
    /// Hopping band index (LTE-M with hopping), 0 otherwise.
    int band_index = 0;
    /// Ordinal of the positioning occasion the subframe belongs to.
    long occasion = 0;

    friend bool operator==(const ScheduledSubframe&, const ScheduledSubframe&) = default;
};

class SubframeSchedule {
public:
    SubframeSchedule() : mask_(kCycleSubframes, false) {}

    /// Entries must be strictly increasing in abs_sf and inside the cycle.
    void push_back(ScheduledSubframe entry);

    bool is_transmitted(int abs_sf) const { return abs_sf >= 0 && abs_sf < kCycleSubframes && mask_[abs_sf]; }
    std::span<const ScheduledSubframe> entries() const { return entries_; }
    std::vector<int> subframes() const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    /// Entry for a transmitted subframe; throws if abs_sf is not transmitted.
    const ScheduledSubframe& at(int abs_sf) const;

    static constexpr int cycle_length() { return kCycleSubframes; }

    friend bool operator==(const SubframeSchedule& a, const SubframeSchedule& b) { return a.entries_ == b.entries_; }

private:
    std::vector<ScheduledSubframe> entries_;
    std::vector<bool> mask_;
};

/// Valid downlink subframe bitmap of NB-IoT: 1 = valid, 0 = invalid (reserved).
struct ValidSubframeBitmap {
    BitString bits;
};

class PartANotInvalid : public Error {
public:
    explicit PartANotInvalid(int subframe);
    int subframe() const { return subframe_; }

private:
    int subframe_;
};

SubframeSchedule expand_lte(const LtePrsConfig& cfg);
SubframeSchedule expand_ltem(const LtemPrsConfig& cfg);
SubframeSchedule expand_nprs(const NprsConfig& cfg, const ValidSubframeBitmap& valid);
/// Dispatches on the config family. NPRS needs the valid-subframe bitmap.
SubframeSchedule expand(const ValidatedConfig& cfg, const ValidSubframeBitmap* valid = nullptr);

/// Valid bitmap that marks exactly the Part-A NPRS subframes invalid.
ValidSubframeBitmap complement_of_part_a(const NprsConfig& cfg);

inline bool is_transmitted(const SubframeSchedule& schedule, int abs_sf) { return schedule.is_transmitted(abs_sf); }

}  // namespace otdoa
