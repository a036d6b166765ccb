#pragma once

// Matched-filter TOA estimation with non-coherent accumulation over PRS
// subframes, and RSTD formation against a reference cell.

#include <functional>
#include <optional>
#include <vector>

#include "otdoa/resource_grid.hpp"
#include "otdoa/scheduler.hpp"

namespace otdoa {

enum class SpectralWindow { rectangular, hann };

struct ReceiverOptions {
    /// FFT size of the sample raster the lags are expressed on.
    int fft_size = kReferenceFftSize;
    /// Lag grid refinement: lags are spaced 1/oversampling samples apart.
    int oversampling = 4;
    double first_path_threshold_db = 13.0;
    double detection_margin_db = 6.0;
    /// Half width of the searched lag window.
    double search_window_s = 2.0 * 700.0 / kSpeedOfLight;
    SpectralWindow window = SpectralWindow::hann;
    /// RSTD reporting resolution; 0 reports unquantized values.
    double rstd_resolution_s = kTs;

    double sample_rate() const { return kSubcarrierSpacingHz * fft_size; }

    friend bool operator==(const ReceiverOptions&, const ReceiverOptions&) = default;
};

struct CorrelationProfile {
    /// Lag of each metric entry, in samples of the raster (fractional when oversampled).
    std::vector<double> lags;
    /// Accumulated matched-filter energy per lag, >= 0.
    std::vector<double> metric;
    int n_accumulated_subframes = 0;
    /// Largest accumulated energy at lags well outside the search window (noise and sidelobes only).
    double noise_floor = 0.0;
    double sample_rate = kSubcarrierSpacingHz * kReferenceFftSize;
};

/// Incremental matched filter: one coherent correlation per subframe, energies summed.
class Correlator {
public:
    explicit Correlator(const ReceiverOptions& options);

    /// Correlates the REs populated in `replica` against the same REs of `rx`.
    void add_subframe(const ResourceGrid& rx, const ResourceGrid& replica);
    int n_subframes() const { return n_subframes_; }
    CorrelationProfile profile() const;

private:
    ReceiverOptions options_;
    int n_fft_ = 0;
    int n_subframes_ = 0;
    std::vector<double> energy_;
    std::vector<cplx> work_;
    std::vector<cplx> z_;
};

class NoScheduledSubframes : public Error {
public:
    NoScheduledSubframes() : Error("NoScheduledSubframes: schedule has no transmitted PRS subframe to measure") {}
};

/// Subframes of the first n_occasions transmitted occasions of the schedule.
std::vector<int> measurement_subframes(const SubframeSchedule& schedule, int n_occasions);

using GridSource = std::function<ResourceGrid(int abs_sf)>;

/// Accumulates over the first n_occasions transmitted occasions; muted
/// subframes are not in the schedule and therefore skipped.
CorrelationProfile accumulate(const GridSource& rx, const GridSource& replica, const SubframeSchedule& schedule,
                              int n_occasions, const ReceiverOptions& options);

struct ToaMeasurement {
    int cell_id = 0;
    double toa_s = 0.0;
    double quality_db = 0.0;
    bool detected = false;
};

/// First-path rule: earliest lag within first_path_threshold_db of the global
/// maximum and above the noise floor, advanced to its local peak and refined
/// by parabolic interpolation.
ToaMeasurement detect_toa(const CorrelationProfile& profile, const ReceiverOptions& options, int cell_id = 0);

/// Peak-to-floor ratio of a profile in dB.
double peak_to_floor_db(const CorrelationProfile& profile);

struct RstdMeasurement {
    int neighbor_cell_id = 0;
    int reference_cell_id = 0;
    double rstd_s = 0.0;
    double quality_db = 0.0;

    friend bool operator==(const RstdMeasurement&, const RstdMeasurement&) = default;
};

class ReferenceNotDetected : public Error {
public:
    explicit ReferenceNotDetected(int cell) : Error("ReferenceNotDetected: reference cell " + std::to_string(cell)) {}
};

/// Round-to-nearest multiple of resolution; resolution <= 0 returns value unchanged.
double quantize(double value, double resolution);

double rstd_between(const ToaMeasurement& neighbor, const ToaMeasurement& reference, double resolution);

/// RSTDs of all detected neighbors against reference_cell (excluded from the output).
std::vector<RstdMeasurement> form_rstd(const std::vector<ToaMeasurement>& toas, int reference_cell, double resolution);

}  // namespace otdoa
