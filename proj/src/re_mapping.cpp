#include "otdoa/re_mapping.hpp"

#include <algorithm>
#include <cmath>

namespace otdoa {

std::size_t ResourceGrid::populated_count() const {
    return static_cast<std::size_t>(std::count(populated_.begin(), populated_.end(), std::uint8_t{1}));
}

void ResourceGrid::clear() {
    std::fill(values_.begin(), values_.end(), cplx{});
    std::fill(populated_.begin(), populated_.end(), std::uint8_t{0});
}

namespace {

constexpr int kGoldFastForward = 1600;

// Register layout: bit i holds x(n + i), i = 0..30.
inline std::uint32_t step_x1(std::uint32_t reg) {
    const std::uint32_t fb = (reg ^ (reg >> 3)) & 1u;
    return (reg >> 1) | (fb << 30);
}

inline std::uint32_t step_x2(std::uint32_t reg) {
    const std::uint32_t fb = (reg ^ (reg >> 1) ^ (reg >> 2) ^ (reg >> 3)) & 1u;
    return (reg >> 1) | (fb << 30);
}

}  // namespace

std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length) {
    std::uint32_t x1 = 1u;
    std::uint32_t x2 = c_init & 0x7fffffffu;
    for (int i = 0; i < kGoldFastForward; ++i) {
        x1 = step_x1(x1);
        x2 = step_x2(x2);
    }
    std::vector<std::uint8_t> c(length);
    for (std::size_t n = 0; n < length; ++n) {
        c[n] = static_cast<std::uint8_t>((x1 ^ x2) & 1u);
        x1 = step_x1(x1);
        x2 = step_x2(x2);
    }
    return c;
}

std::uint32_t prs_seed(int l, int ns, int id, bool normal_cp) {
    const std::uint64_t seed = (1ull << 10) * static_cast<std::uint64_t>(7 * (ns + 1) + l + 1) *
                                   static_cast<std::uint64_t>(2 * id + 1) +
                               static_cast<std::uint64_t>(2 * id) + (normal_cp ? 1u : 0u);
    return static_cast<std::uint32_t>(seed & 0x7fffffffu);
}

PrsSequence prs_sequence(int l, int ns, int id, bool normal_cp) {
    const auto c = gold_sequence(prs_seed(l, ns, id, normal_cp), 2 * kPrsSequenceLength);
    const double a = 1.0 / std::sqrt(2.0);
    PrsSequence r;
    for (int m = 0; m < kPrsSequenceLength; ++m) {
        r[m] = cplx((1.0 - 2.0 * c[2 * m]) * a, (1.0 - 2.0 * c[2 * m + 1]) * a);
    }
    return r;
}

SymbolSet symbol_set(Technology tech, std::optional<DeploymentMode> mode, std::optional<NprsPartMode> part) {
    SymbolSet legacy;
    for (int l = 3; l < kSymbolsPerSubframe; ++l) legacy.set(l);
    for (int crs : {0, 4, 7, 11}) legacy.reset(crs);

    SymbolSet last_two;
    for (int l : {5, 6, 12, 13}) last_two.set(l);

    if (tech != Technology::nbiot) return legacy;
    if (!mode || !part) {
        throw InvalidCombination("InvalidCombination: NB-IoT symbol set needs a deployment mode and configuration part");
    }
    SymbolSet s = *mode == DeploymentMode::inband ? legacy : SymbolSet{}.set();
    if (*part == NprsPartMode::part_b_only) s &= ~last_two;
    return s;
}

SymbolSet symbol_set(const PrsConfig& cfg) {
    if (const auto* n = std::get_if<NprsConfig>(&cfg)) {
        const auto part = n->part_a ? NprsPartMode::part_a_or_both : NprsPartMode::part_b_only;
        return symbol_set(Technology::nbiot, n->deployment_mode, part);
    }
    return symbol_set(technology_of(cfg));
}

SequenceRange sequence_slice(const CarrierPosition& pos, Technology tech, std::optional<DeploymentMode> mode) {
    if (tech == Technology::nbiot && mode && *mode != DeploymentMode::inband) {
        return {kPrsSequenceLength / 2 - 1, 2};
    }
    if (pos.grid_prbs <= 0 || pos.grid_prbs > kMaxCarrierPrbs || pos.first_half_prb < 0 || pos.n_half_prbs <= 0 ||
        pos.first_half_prb + pos.n_half_prbs > 2 * pos.grid_prbs) {
        throw OutOfCarrier("OutOfCarrier: half-PRBs [" + std::to_string(pos.first_half_prb) + "," +
                           std::to_string(pos.first_half_prb + pos.n_half_prbs) + ") outside a " +
                           std::to_string(pos.grid_prbs) + "-PRB carrier");
    }
    return {pos.first_half_prb + kMaxCarrierPrbs - pos.grid_prbs, pos.n_half_prbs};
}

CarrierPosition carrier_position(const PrsConfig& cfg, int band_index) {
    if (const auto* lte = std::get_if<LtePrsConfig>(&cfg)) {
        return {lte->carrier_prbs, lte->carrier_prbs - lte->bandwidth_prbs, 2 * lte->bandwidth_prbs};
    }
    if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        if (m->hopping) {
            const auto& offsets = m->hopping->band_prb_offsets;
            const int start = offsets.at(static_cast<std::size_t>(band_index) % offsets.size());
            return {m->carrier_prbs, 2 * start, 12};
        }
        return {m->carrier_prbs, m->carrier_prbs - m->bandwidth_prbs, 2 * m->bandwidth_prbs};
    }
    const auto& n = std::get<NprsConfig>(cfg);
    if (n.deployment_mode == DeploymentMode::inband) return {n.carrier_prbs, 2 * n.inband_prb_index, 2};
    return {1, 0, 2};
}

void map_subframe(ResourceGrid& grid, const ValidatedConfig& cfg, int abs_sf, int band_index) {
    const auto& config = cfg.config();
    const auto pos = carrier_position(config, band_index);
    if (grid.n_prbs() != pos.grid_prbs) {
        throw Error("grid has " + std::to_string(grid.n_prbs()) + " PRBs, config maps onto " +
                    std::to_string(pos.grid_prbs));
    }
    const Technology tech = cfg.technology();
    std::optional<DeploymentMode> mode;
    if (const auto* n = std::get_if<NprsConfig>(&config)) mode = n->deployment_mode;
    const auto slice = sequence_slice(pos, tech, mode);
    const auto symbols = symbol_set(config);
    const int id = identity_of(config);
    const int shift = frequency_shift(id);
    const int sf_in_frame = abs_sf % 10;

    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        if (!symbols.test(static_cast<std::size_t>(l))) continue;
        const int ns = 2 * sf_in_frame + l / kSymbolsPerSlot;
        const auto seq = prs_sequence(l % kSymbolsPerSlot, ns, id);
        for (int i = 0; i < pos.n_half_prbs; ++i) {
            const int h = pos.first_half_prb + i;
            grid.set(l, prs_subcarrier(h, l, shift), seq[static_cast<std::size_t>(slice.first + i)]);
        }
    }
}

ResourceGrid prs_grid(const ValidatedConfig& cfg, int abs_sf, int band_index) {
    ResourceGrid grid(grid_prbs_of(cfg.config()));
    map_subframe(grid, cfg, abs_sf, band_index);
    return grid;
}

}  // namespace otdoa
