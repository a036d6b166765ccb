#pragma once

#include <cstdint>
#include <vector>

#include "otdoa/common.hpp"

namespace otdoa {

/// One subframe (14 OFDM symbols, normal CP) over 12 * n_prbs subcarriers.
/// Subcarrier 0 is the lowest frequency; the DC subcarrier is not part of the grid.
class ResourceGrid {
public:
    ResourceGrid() = default;
    explicit ResourceGrid(int n_prbs)
        : n_prbs_(n_prbs),
          values_(static_cast<std::size_t>(kSymbolsPerSubframe * kSubcarriersPerPrb * n_prbs)),
          populated_(values_.size(), 0) {}

    int n_prbs() const { return n_prbs_; }
    int n_symbols() const { return kSymbolsPerSubframe; }
    int n_subcarriers() const { return kSubcarriersPerPrb * n_prbs_; }

    const cplx& at(int symbol, int subcarrier) const { return values_[index(symbol, subcarrier)]; }
    bool populated(int symbol, int subcarrier) const { return populated_[index(symbol, subcarrier)] != 0; }

    void set(int symbol, int subcarrier, cplx value) {
        const auto i = index(symbol, subcarrier);
        values_[i] = value;
        populated_[i] = 1;
    }
    void add(int symbol, int subcarrier, cplx value) {
        const auto i = index(symbol, subcarrier);
        values_[i] += value;
        populated_[i] = 1;
    }

    std::size_t populated_count() const;
    void clear();

    /// Signed frequency index of a grid subcarrier relative to DC (DC skipped).
    int frequency_index(int subcarrier) const {
        const int half = n_subcarriers() / 2;
        return subcarrier < half ? subcarrier - half : subcarrier - half + 1;
    }

    friend bool operator==(const ResourceGrid&, const ResourceGrid&) = default;

private:
    std::size_t index(int symbol, int subcarrier) const {
        return static_cast<std::size_t>(symbol) * static_cast<std::size_t>(n_subcarriers()) +
               static_cast<std::size_t>(subcarrier);
    }

    int n_prbs_ = 0;
    std::vector<cplx> values_;
    std::vector<std::uint8_t> populated_;
};

}  // namespace otdoa
