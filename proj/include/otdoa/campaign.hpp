#pragma once

// Monte-Carlo positioning campaign: drops UEs, runs an LPP session per drop
// and technology, measures RSTDs on synthesized PRS grids, solves for the
// position and collects the horizontal errors.

#include <optional>
#include <string>
#include <vector>

#include "otdoa/lpp.hpp"
#include "otdoa/positioner.hpp"
#include "otdoa/scenario.hpp"

namespace otdoa {

inline constexpr double kReportPercentiles[] = {40.0, 50.0, 67.0, 80.0, 90.0, 95.0};

struct CellPlan {
    Cell cell;
    PrsConfig config;
    SubframeSchedule schedule;
};

/// Everything about one technology that does not depend on the drop.
class TechnologyPlan {
public:
    TechnologyPlan(const Scenario& scenario, const TechnologySetup& setup);

    const TechnologySetup& setup() const { return setup_; }
    const Deployment& deployment() const { return deployment_; }
    const ReceiverOptions& receiver() const { return receiver_; }
    int grid_prbs() const { return grid_prbs_; }
    const std::vector<CellPlan>& cells() const { return cells_; }

    /// Transmitted PRS of `cell` in subframe abs_sf on hopping band `band`.
    const ResourceGrid& replica(int cell, int abs_sf, int band) const;
    /// Union of all cells' PRS resource elements for (abs_sf mod 10, band).
    const ResourceGrid& union_mask(int abs_sf, int band) const;

    /// Assistance data entry the location server holds for `cell`.
    lpp::CellAssistance assistance(int cell) const;
    lpp::ProvideCapabilities ue_capabilities() const;

private:
    std::size_t key(int cell, int abs_sf, int band) const;

    TechnologySetup setup_;
    Deployment deployment_;
    ReceiverOptions receiver_;
    int grid_prbs_ = 0;
    int n_bands_ = 1;
    std::vector<CellPlan> cells_;
    std::vector<std::optional<ResourceGrid>> replicas_;
    std::vector<ResourceGrid> unions_;
};

struct CellMeasurement {
    int cell = 0;
    bool detected = false;
    double toa_s = 0.0;
    double true_delay_s = 0.0;
    double quality_db = 0.0;
    double snr_db = 0.0;
};

struct DropResult {
    int drop_id = 0;
    Position truth;
    Position estimate;
    double error_m = 0.0;
    int serving_cell = 0;
    int reference_cell = 0;
    int n_detected = 0;
    /// "otdoa" when the solver ran; "serving" when too few RSTDs forced the serving-cell fallback.
    std::string fix;
    bool converged = false;
    int iterations = 0;
    std::vector<CellMeasurement> cells;
    std::vector<RstdMeasurement> rstds;
    /// The five decoded session messages, in order.
    std::vector<lpp::LppMessage> transcript;
    /// Assistance data as delivered to the UE over the session.
    lpp::ProvideAssistanceData assistance;
    lpp::Phase session_phase = lpp::Phase::idle;
};

/// One drop of one technology. Deterministic in (scenario seed, drop_id, technology name).
DropResult run_drop(const Scenario& scenario, const TechnologyPlan& plan, int drop_id);

struct TechnologyReport {
    std::string name;
    std::vector<DropResult> drops;
    ErrorCdf cdf;
    std::vector<std::pair<double, double>> percentiles;
    double fraction_within_50m = 0.0;
};

struct CampaignReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<TechnologyReport> technologies;
    double wall_clock_s = 0.0;

    const TechnologyReport& technology(const std::string& name) const;
};

struct CampaignOptions {
    /// Technology names to run; empty runs all of them.
    std::vector<std::string> technologies;
    std::optional<int> n_drops;
    std::optional<std::uint64_t> seed;
    /// 0 picks the hardware concurrency.
    int workers = 0;
};

/// Throws EmptyCdf when the campaign has no drops.
CampaignReport run_campaign(const Scenario& scenario, const CampaignOptions& options = {});

/// results_<tech>.csv, measurements_<tech>.csv, cdf_<tech>.csv, summary.csv, summary.txt.
void write_outputs(const CampaignReport& report, const std::string& directory);

}  // namespace otdoa
