#include "otdoa/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "otdoa/fft.hpp"

namespace otdoa {

Correlator::Correlator(const ReceiverOptions& options)
    : options_(options),
      n_fft_(options.fft_size * options.oversampling),
      energy_(static_cast<std::size_t>(n_fft_), 0.0),
      work_(static_cast<std::size_t>(n_fft_)),
      z_(static_cast<std::size_t>(n_fft_)) {
    if (options.oversampling < 1 || options.fft_size < 128) throw Error("Correlator: bad raster");
}

void Correlator::add_subframe(const ResourceGrid& rx, const ResourceGrid& replica) {
    if (rx.n_prbs() != replica.n_prbs()) throw Error("Correlator: received and replica grids differ in size");
    int lo = replica.n_subcarriers();
    int hi = -1;
    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        for (int i = 0; i < replica.n_subcarriers(); ++i) {
            if (replica.populated(l, i)) {
                lo = std::min(lo, i);
                hi = std::max(hi, i);
            }
        }
    }
    if (hi < 0) return;

    std::fill(z_.begin(), z_.end(), cplx{});
    const double span = static_cast<double>(hi - lo + 2);
    for (int i = lo; i <= hi; ++i) {
        double w = 1.0;
        if (options_.window == SpectralWindow::hann) {
            w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i - lo + 1) / span);
        }
        cplx acc{};
        int count = 0;
        for (int l = 0; l < kSymbolsPerSubframe; ++l) {
            if (replica.populated(l, i)) {
                acc += rx.at(l, i) * std::conj(replica.at(l, i));
                ++count;
            }
        }
        // Equal weight per subcarrier removes the comb aliases of the diagonal pattern.
        if (count > 1) acc /= static_cast<double>(count);
        const int k = replica.frequency_index(i);
        z_[static_cast<std::size_t>(((k % n_fft_) + n_fft_) % n_fft_)] += w * acc;
    }
    dft(z_, work_, FftDirection::inverse);
    for (std::size_t n = 0; n < energy_.size(); ++n) energy_[n] += std::norm(work_[n]);
    ++n_subframes_;
}

CorrelationProfile Correlator::profile() const {
    CorrelationProfile p;
    p.sample_rate = options_.sample_rate();
    p.n_accumulated_subframes = n_subframes_;
    const int os = options_.oversampling;
    const int half = n_fft_ / 2;
    const int window = std::min(static_cast<int>(std::ceil(options_.search_window_s * p.sample_rate * os)), half / 2);
    p.lags.reserve(static_cast<std::size_t>(2 * window + 1));
    p.metric.reserve(static_cast<std::size_t>(2 * window + 1));
    for (int n = -window; n <= window; ++n) {
        p.lags.push_back(static_cast<double>(n) / os);
        p.metric.push_back(energy_[static_cast<std::size_t>((n + n_fft_) % n_fft_)]);
    }
    const int floor_start = std::min(2 * window, half - half / 4);
    double floor = 0.0;
    for (int n = floor_start + 1; n <= half; ++n) {
        floor = std::max(floor, energy_[static_cast<std::size_t>(n)]);
        floor = std::max(floor, energy_[static_cast<std::size_t>(n_fft_ - n)]);
    }
    p.noise_floor = floor;
    return p;
}

std::vector<int> measurement_subframes(const SubframeSchedule& schedule, int n_occasions) {
    std::vector<int> out;
    int seen = 0;
    long current = -1;
    for (const auto& e : schedule.entries()) {
        if (e.occasion != current) {
            if (seen == n_occasions) break;
            current = e.occasion;
            ++seen;
        }
        out.push_back(e.abs_sf);
    }
    return out;
}

CorrelationProfile accumulate(const GridSource& rx, const GridSource& replica, const SubframeSchedule& schedule,
                              int n_occasions, const ReceiverOptions& options) {
    if (n_occasions < 1) throw Error("accumulate: n_occasions must be >= 1");
    const auto subframes = measurement_subframes(schedule, n_occasions);
    if (subframes.empty()) throw NoScheduledSubframes();
    Correlator corr(options);
    for (int sf : subframes) corr.add_subframe(rx(sf), replica(sf));
    return corr.profile();
}

double peak_to_floor_db(const CorrelationProfile& profile) {
    if (profile.metric.empty()) return 0.0;
    const double peak = *std::max_element(profile.metric.begin(), profile.metric.end());
    if (peak <= 0.0) return 0.0;
    const double floor = std::max(profile.noise_floor, peak * 1e-30);
    return linear_to_db(peak / floor);
}

ToaMeasurement detect_toa(const CorrelationProfile& profile, const ReceiverOptions& options, int cell_id) {
    ToaMeasurement m;
    m.cell_id = cell_id;
    const auto& y = profile.metric;
    if (y.empty()) throw Error("detect_toa: empty profile");
    const double peak = *std::max_element(y.begin(), y.end());
    m.quality_db = peak_to_floor_db(profile);
    m.detected = peak > 0.0 && m.quality_db >= options.detection_margin_db;
    if (peak <= 0.0) return m;

    // A first path has to stand out from the largest noise excursion as well.
    const double threshold = std::max(peak * db_to_linear(-options.first_path_threshold_db), profile.noise_floor);
    std::size_t p = 0;
    while (y[p] < threshold) ++p;
    while (p + 1 < y.size() && y[p + 1] > y[p]) ++p;

    double delta = 0.0;
    if (p > 0 && p + 1 < y.size()) {
        const double denom = y[p - 1] - 2.0 * y[p] + y[p + 1];
        if (denom < 0.0) delta = std::clamp(0.5 * (y[p - 1] - y[p + 1]) / denom, -0.5, 0.5);
    }
    const double step = y.size() > 1 ? profile.lags[1] - profile.lags[0] : 1.0;
    m.toa_s = (profile.lags[p] + delta * step) / profile.sample_rate;
    return m;
}

double quantize(double value, double resolution) {
    if (resolution <= 0.0) return value;
    return std::round(value / resolution) * resolution;
}

double rstd_between(const ToaMeasurement& neighbor, const ToaMeasurement& reference, double resolution) {
    return quantize(neighbor.toa_s - reference.toa_s, resolution);
}

std::vector<RstdMeasurement> form_rstd(const std::vector<ToaMeasurement>& toas, int reference_cell, double resolution) {
    auto ref = std::find_if(toas.begin(), toas.end(), [&](const ToaMeasurement& t) { return t.cell_id == reference_cell; });
    if (ref == toas.end() || !ref->detected) throw ReferenceNotDetected(reference_cell);
    std::vector<RstdMeasurement> out;
    for (const auto& t : toas) {
        if (!t.detected || t.cell_id == reference_cell) continue;
        out.push_back({t.cell_id, reference_cell, rstd_between(t, *ref, resolution), std::min(t.quality_db, ref->quality_db)});
    }
    return out;
}

}  // namespace otdoa
