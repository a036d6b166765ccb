#include "otdoa/ofdm.hpp"

#include <cmath>
#include <numbers>

#include "otdoa/fft.hpp"

namespace otdoa {

int OfdmRaster::symbol_start(int symbol) const {
    int start = 0;
    for (int l = 0; l < symbol; ++l) start += cp_length(l) + fft_size;
    return start;
}

OfdmRaster OfdmRaster::from_sample_rate(double sample_rate) {
    const double n = sample_rate / kSubcarrierSpacingHz;
    const long fft = std::lround(n);
    if (std::abs(n - static_cast<double>(fft)) > 1e-6 || fft < 128 || fft % 128 != 0) {
        throw RasterMismatch("RasterMismatch: sample rate " + std::to_string(sample_rate) +
                             " Hz is not 15 kHz times a multiple of 128");
    }
    return OfdmRaster{static_cast<int>(fft)};
}

namespace {

int bin_of(int frequency_index, int fft_size) {
    return ((frequency_index % fft_size) + fft_size) % fft_size;
}

void require_fits(int n_prbs, const OfdmRaster& raster) {
    if (kSubcarriersPerPrb * n_prbs + 1 > raster.fft_size) {
        throw RasterMismatch("RasterMismatch: " + std::to_string(n_prbs) + " PRBs do not fit an FFT of " +
                             std::to_string(raster.fft_size));
    }
}

// Adds the modulated subframe, delayed by delay_samples, into out starting at base.
void add_delayed_subframe(const ResourceGrid& grid, cplx gain, double delay_samples, const OfdmRaster& raster,
                          std::size_t base, std::vector<cplx>& out) {
    const int n = raster.fft_size;
    const double whole = std::floor(delay_samples);
    const double frac = delay_samples - whole;
    const long shift = static_cast<long>(whole);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> buf(static_cast<std::size_t>(n));
    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        std::fill(buf.begin(), buf.end(), cplx{});
        bool any = false;
        for (int i = 0; i < grid.n_subcarriers(); ++i) {
            if (!grid.populated(l, i)) continue;
            const int k = grid.frequency_index(i);
            const double ph = -2.0 * std::numbers::pi * k * frac / n;
            buf[static_cast<std::size_t>(bin_of(k, n))] += grid.at(l, i) * gain * std::polar(scale, ph);
            any = true;
        }
        if (!any) continue;
        dft(buf, buf, FftDirection::inverse);
        const int cp = raster.cp_length(l);
        const long start = static_cast<long>(base) + raster.symbol_start(l) + shift;
        for (int t = 0; t < cp + n; ++t) {
            const long pos = start + t;
            if (pos < 0 || pos >= static_cast<long>(out.size())) continue;
            const int src = t < cp ? n - cp + t : t - cp;
            out[static_cast<std::size_t>(pos)] += buf[static_cast<std::size_t>(src)];
        }
    }
}

}  // namespace

std::vector<cplx> ofdm_modulate(const ResourceGrid& grid, const OfdmRaster& raster) {
    require_fits(grid.n_prbs(), raster);
    std::vector<cplx> out(static_cast<std::size_t>(raster.subframe_samples()));
    add_delayed_subframe(grid, cplx(1.0, 0.0), 0.0, raster, 0, out);
    return out;
}

ResourceGrid ofdm_demodulate(std::span<const cplx> samples, int subframe, int n_prbs, const OfdmRaster& raster) {
    require_fits(n_prbs, raster);
    const int n = raster.fft_size;
    const std::size_t base = static_cast<std::size_t>(subframe) * static_cast<std::size_t>(raster.subframe_samples());
    if (base + static_cast<std::size_t>(raster.subframe_samples()) > samples.size()) {
        throw Error("ofdm_demodulate: stream too short for subframe " + std::to_string(subframe));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    ResourceGrid grid(n_prbs);
    std::vector<cplx> buf(static_cast<std::size_t>(n));
    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        const std::size_t start = base + static_cast<std::size_t>(raster.symbol_start(l) + raster.cp_length(l));
        std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), n, buf.begin());
        dft(buf, buf, FftDirection::forward);
        for (int i = 0; i < grid.n_subcarriers(); ++i) {
            grid.set(l, i, buf[static_cast<std::size_t>(bin_of(grid.frequency_index(i), n))] * scale);
        }
    }
    return grid;
}

std::vector<cplx> synthesize_rx(std::span<const CellSignal> cells, double sample_rate, double noise_power, Rng& rng) {
    const OfdmRaster raster = OfdmRaster::from_sample_rate(sample_rate);
    std::size_t n_subframes = 0;
    int n_prbs = -1;
    for (const auto& c : cells) {
        if (n_subframes == 0) n_subframes = c.subframes.size();
        if (c.subframes.size() != n_subframes) throw RasterMismatch("RasterMismatch: cells cover different durations");
        for (const auto& g : c.subframes) {
            if (n_prbs < 0) n_prbs = g.n_prbs();
            if (g.n_prbs() != n_prbs) throw RasterMismatch("RasterMismatch: grids with different carrier sizes");
        }
    }
    if (n_prbs >= 0) require_fits(n_prbs, raster);

    std::vector<cplx> out(n_subframes * static_cast<std::size_t>(raster.subframe_samples()));
    for (const auto& c : cells) {
        const Link& link = *c.link;
        const double amplitude = std::sqrt(db_to_linear(link.snr_db));
        for (std::size_t t = 0; t < link.taps.size(); ++t) {
            const double delay = (link.true_delay_s + link.taps[t].excess_delay_s) * raster.sample_rate();
            for (std::size_t s = 0; s < n_subframes; ++s) {
                add_delayed_subframe(c.subframes[s], link.gains[t] * amplitude, delay, raster,
                                     s * static_cast<std::size_t>(raster.subframe_samples()), out);
            }
        }
    }
    if (noise_power > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
        for (auto& x : out) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x += cplx(re, im);
        }
    }
    return out;
}

std::vector<cplx> scaled_response(const Link& link, int n_prbs) {
    const ResourceGrid probe(n_prbs);
    const double amplitude = std::sqrt(db_to_linear(link.snr_db));
    std::vector<cplx> h(static_cast<std::size_t>(probe.n_subcarriers()));
    for (int i = 0; i < probe.n_subcarriers(); ++i) {
        h[static_cast<std::size_t>(i)] = amplitude * channel_response(link, probe.frequency_index(i));
    }
    return h;
}

ResourceGrid synthesize_rx_grid(std::span<const CellGrid> cells, int n_prbs, double noise_power, Rng& rng,
                                const ResourceGrid* wanted) {
    if (wanted && wanted->n_prbs() != n_prbs) throw RasterMismatch("RasterMismatch: wanted mask has a different carrier size");
    std::vector<std::vector<cplx>> computed(cells.size());
    std::vector<std::span<const cplx>> responses(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].grid->n_prbs() != n_prbs) {
            throw RasterMismatch("RasterMismatch: cell grid has " + std::to_string(cells[c].grid->n_prbs()) +
                                 " PRBs, receiver expects " + std::to_string(n_prbs));
        }
        if (cells[c].response.empty()) {
            computed[c] = scaled_response(*cells[c].link, n_prbs);
            responses[c] = computed[c];
        } else {
            responses[c] = cells[c].response;
        }
    }

    ResourceGrid rx(n_prbs);
    std::normal_distribution<double> gauss(0.0, std::sqrt(std::max(noise_power, 0.0) / 2.0));
    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        for (int i = 0; i < rx.n_subcarriers(); ++i) {
            if (wanted && !wanted->populated(l, i)) continue;
            cplx y{};
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].grid->populated(l, i)) y += responses[c][static_cast<std::size_t>(i)] * cells[c].grid->at(l, i);
            }
            if (noise_power > 0.0) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                y += cplx(re, im);
            }
            rx.set(l, i, y);
        }
    }
    return rx;
}

}  // namespace otdoa
