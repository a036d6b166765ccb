#pragma once

// OFDM modulation on a common sample raster and received-signal synthesis.

#include <span>
#include <vector>

#include "otdoa/deployment.hpp"
#include "otdoa/resource_grid.hpp"

namespace otdoa {

class RasterMismatch : public Error {
public:
    using Error::Error;
};

/// Sample raster: FFT size and normal cyclic prefix lengths at sample_rate = 15 kHz * fft_size.
struct OfdmRaster {
    int fft_size = kReferenceFftSize;

    double sample_rate() const { return kSubcarrierSpacingHz * fft_size; }
    int cp_length(int symbol) const {
        const int l = symbol % kSymbolsPerSlot;
        return (l == 0 ? 160 : 144) * fft_size / kReferenceFftSize;
    }
    int subframe_samples() const { return 15 * fft_size; }
    /// Sample index of the first CP sample of symbol l within the subframe.
    int symbol_start(int symbol) const;

    /// Raster for a given sample rate; throws RasterMismatch if it is not 15 kHz times a valid FFT size.
    static OfdmRaster from_sample_rate(double sample_rate);
};

/// Unitary OFDM modulation of one subframe grid (IFFT scaled by 1/sqrt(N)).
std::vector<cplx> ofdm_modulate(const ResourceGrid& grid, const OfdmRaster& raster);

/// Demodulates subframe `subframe` of a stream; every RE of the result is populated.
ResourceGrid ofdm_demodulate(std::span<const cplx> samples, int subframe, int n_prbs, const OfdmRaster& raster);

/// One transmitting cell as seen by the receiver.
struct CellSignal {
    const Link* link = nullptr;
    /// One grid per subframe of the stream; empty grids transmit nothing.
    std::span<const ResourceGrid> subframes;
};

/// Time-domain received stream: per cell the OFDM signal delayed by the
/// propagation delay plus each tap's excess delay, scaled by the tap amplitude
/// and by sqrt(noise_power * snr), summed over cells, plus complex white Gaussian
/// noise of variance noise_power per sample. noise_power <= 0 disables noise.
std::vector<cplx> synthesize_rx(std::span<const CellSignal> cells, double sample_rate, double noise_power, Rng& rng);

/// Frequency-domain equivalent of synthesize_rx followed by ofdm_demodulate for
/// delays inside the cyclic prefix. Only REs in `wanted` (populated mask) are produced;
/// pass nullptr to produce the whole grid.
struct CellGrid {
    const Link* link = nullptr;
    const ResourceGrid* grid = nullptr;
    /// Optional precomputed sqrt(snr) * H per grid subcarrier; computed from link when empty.
    std::span<const cplx> response = {};
};

/// sqrt(snr) * channel_response for every subcarrier of an n_prbs grid.
std::vector<cplx> scaled_response(const Link& link, int n_prbs);
ResourceGrid synthesize_rx_grid(std::span<const CellGrid> cells, int n_prbs, double noise_power, Rng& rng,
                                const ResourceGrid* wanted = nullptr);

}  // namespace otdoa
