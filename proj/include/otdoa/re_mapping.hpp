#pragma once

// PRS / NPRS sequence generation and resource element mapping.

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <vector>

#include "otdoa/prs_config.hpp"
#include "otdoa/resource_grid.hpp"

namespace otdoa {

inline constexpr int kPrsSequenceLength = 220;
/// Largest downlink carrier in PRBs; the sequence covers 2 * 110 elements.
inline constexpr int kMaxCarrierPrbs = 110;

/// Length-31 Gold sequence c(n), n = 0..length-1, after the 1600-step fast-forward.
std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length);

/// PRS seed for OFDM symbol l (within its slot, 0..6), slot ns (0..19) and id.
std::uint32_t prs_seed(int l, int ns, int id, bool normal_cp = true);

using PrsSequence = std::array<cplx, kPrsSequenceLength>;

/// QPSK reference sequence of one OFDM symbol. l is the symbol index within the slot.
PrsSequence prs_sequence(int l, int ns, int id, bool normal_cp = true);

enum class NprsPartMode { part_a_or_both, part_b_only };

class InvalidCombination : public Error {
public:
    using Error::Error;
};

class OutOfCarrier : public Error {
public:
    using Error::Error;
};

/// OFDM symbols (0..13 within a subframe) that carry PRS.
using SymbolSet = std::bitset<kSymbolsPerSubframe>;

SymbolSet symbol_set(Technology tech, std::optional<DeploymentMode> mode = std::nullopt,
                     std::optional<NprsPartMode> part = std::nullopt);
SymbolSet symbol_set(const PrsConfig& cfg);

/// Location of the mapped PRS inside its grid, in half-PRB (6-subcarrier) units.
struct CarrierPosition {
    int grid_prbs = 50;
    int first_half_prb = 0;
    int n_half_prbs = 0;
};

/// Half-open index range into the length-220 sequence.
struct SequenceRange {
    int first = 0;
    int count = 0;

    friend bool operator==(const SequenceRange&, const SequenceRange&) = default;
};

/// Portion of the length-220 sequence that lands on the given position.
/// Standalone/guardband NPRS always take the central two elements.
SequenceRange sequence_slice(const CarrierPosition& pos, Technology tech,
                             std::optional<DeploymentMode> mode = std::nullopt);

/// Where a config puts its PRS for a given hopping band index.
CarrierPosition carrier_position(const PrsConfig& cfg, int band_index = 0);

/// Subcarrier of the PRS resource element in half-PRB h for symbol l (0..13).
constexpr int prs_subcarrier(int half_prb, int l, int shift) {
    const int l_slot = l % kSymbolsPerSlot;
    return 6 * half_prb + (6 - l_slot + shift) % 6;
}

/// Writes the PRS of one subframe into grid. grid must have grid_prbs_of(cfg) PRBs.
void map_subframe(ResourceGrid& grid, const ValidatedConfig& cfg, int abs_sf, int band_index = 0);

/// Fresh grid with the PRS of one subframe.
ResourceGrid prs_grid(const ValidatedConfig& cfg, int abs_sf, int band_index = 0);

}  // namespace otdoa
