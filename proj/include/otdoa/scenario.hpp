#pragma once

// Scenario files: deployment, per-technology PRS templates, receiver options
// and campaign size, stored as YAML.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otdoa/deployment.hpp"
#include "otdoa/prs_config.hpp"
#include "otdoa/receiver.hpp"
#include "otdoa/scheduler.hpp"

namespace otdoa {

/// How muting patterns are assigned to cells.
enum class MutingPlan {
    none,            ///< no muting at all
    from_template,   ///< every cell uses the template's pattern unchanged
    site_staggered,  ///< single '1' at bit (site / 2) mod length; co-shift sites never overlap
};
std::string to_string(MutingPlan plan);
MutingPlan parse_muting_plan(const std::string& text);

struct TechnologySetup {
    /// Label used for output files and --tech: lte, m2, m1, nbiot, ...
    std::string name;
    /// Identity fields (PCI / PRS id) and muting are filled per cell.
    PrsConfig prs;
    /// NB-IoT valid-subframe bitmap; absent means the complement of Part A.
    std::optional<BitString> valid_subframes;
    /// Frequency band number carried in assistance data.
    std::uint16_t band = 28;
    /// Receiver sample raster for this technology; absent uses the scenario receiver.
    std::optional<int> fft_size;

    friend bool operator==(const TechnologySetup&, const TechnologySetup&) = default;
};

/// Replaces the generated config of one cell for one technology.
struct CellOverride {
    int cell = 0;
    std::string technology;
    PrsConfig prs;

    friend bool operator==(const CellOverride&, const CellOverride&) = default;
};

struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 1;
    int n_drops = 100;
    int n_occasions = 8;
    DeploymentParams deployment;
    ChannelProfile channel = ChannelProfile::short_delay_spread;
    double min_distance_m = 35.0;
    /// Forces every link to this SNR per RE (oracle runs); absent uses the link budget.
    std::optional<double> snr_override_db;
    MutingPlan muting_plan = MutingPlan::site_staggered;
    int muting_length = 4;
    ReceiverOptions receiver;
    std::vector<TechnologySetup> technologies;
    std::vector<CellOverride> cells;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse or structural error in a scenario file, with the 1-based line when known.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& message, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

/// A scenario whose PRS configs fail validate(); the message carries the
/// original DomainViolation / MissingPart / GeometryViolation text.
class ScenarioValidationError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::string& path);
std::string write_scenario(const Scenario& scenario);

/// A single PRS config in the scenario syntax (the `prs:` mapping).
PrsConfig parse_prs_config(const std::string& yaml_text);
std::string write_prs_config(const PrsConfig& config);

/// Offset fraction a of Part B written as "k/8".
std::string format_eighths(int eighths);
int parse_eighths(const std::string& text);

const TechnologySetup& find_technology(const Scenario& scenario, const std::string& name);

/// Config transmitted by `cell` for technology `tech`: the template with the
/// cell identity and the muting plan applied, or the per-cell override.
PrsConfig cell_config(const Scenario& scenario, const TechnologySetup& tech, const Cell& cell);

/// Valid-subframe bitmap used for a technology (NB-IoT only).
ValidSubframeBitmap valid_subframes_of(const TechnologySetup& tech, const PrsConfig& cell_config);

/// Validates every per-cell config of every technology; throws ScenarioValidationError.
void validate_scenario(const Scenario& scenario);

}  // namespace otdoa
