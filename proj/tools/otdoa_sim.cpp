// Command-line driver: scenario validation, schedule and grid dumps, LPP
// session transcripts and Monte-Carlo positioning campaigns.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "otdoa/campaign.hpp"
#include "otdoa/re_mapping.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

class UsageError : public otdoa::Error {
public:
    using Error::Error;
};

const otdoa::Cell& cell_at(const otdoa::Deployment& d, int index) {
    if (index < 0 || index >= static_cast<int>(d.cells.size())) {
        throw UsageError("--cell " + std::to_string(index) + " outside 0.." + std::to_string(d.cells.size() - 1));
    }
    return d.cells[static_cast<std::size_t>(index)];
}

std::vector<std::string> tech_selection(const otdoa::Scenario& s, const std::string& tech) {
    if (tech == "all") return {};
    for (const auto& t : s.technologies) {
        if (t.name == tech) return {tech};
    }
    std::string names;
    for (const auto& t : s.technologies) names += " " + t.name;
    throw UsageError("--tech '" + tech + "' not in the scenario (all" + names + ")");
}

int cmd_validate(const std::string& path) {
    const auto s = otdoa::load_scenario(path);
    const auto d = otdoa::hex_layout(s.deployment);
    std::cout << "OK: scenario '" << s.name << "', " << s.technologies.size() << " technologies, " << d.cells.size()
              << " cells, " << s.cells.size() << " per-cell overrides\n";
    return kOk;
}

int cmd_schedule(const std::string& path, const std::string& tech, int cell, int limit) {
    const auto s = otdoa::load_scenario(path);
    const auto& setup = otdoa::find_technology(s, tech);
    otdoa::PrsConfig cfg = setup.prs;
    if (cell >= 0) cfg = otdoa::cell_config(s, setup, cell_at(otdoa::hex_layout(s.deployment), cell));
    const auto validated = otdoa::validate(cfg);
    const auto valid = otdoa::valid_subframes_of(setup, cfg);
    const auto schedule = otdoa::expand(validated, &valid);
    std::cout << "# technology " << tech << (cell >= 0 ? ", cell " + std::to_string(cell) : ", template")
              << ", " << schedule.entries().size() << " PRS subframes in the 10240-subframe cycle\n";
    std::cout << "abs_subframe,frame,subframe,band,occasion\n";
    int shown = 0;
    for (const auto& e : schedule.entries()) {
        if (limit > 0 && shown++ >= limit) break;
        std::cout << e.abs_sf << ',' << e.abs_sf / 10 << ',' << e.abs_sf % 10 << ',' << e.band_index << ','
                  << e.occasion << '\n';
    }
    return kOk;
}

int cmd_grid(const std::string& path, const std::string& tech, int cell, int subframe, int band, bool ascii) {
    const auto s = otdoa::load_scenario(path);
    const auto& setup = otdoa::find_technology(s, tech);
    const auto cfg = otdoa::validate(otdoa::cell_config(s, setup, cell_at(otdoa::hex_layout(s.deployment), cell)));
    if (subframe < 0 || subframe >= otdoa::kCycleSubframes) throw UsageError("--subframe outside 0..10239");
    const auto grid = otdoa::prs_grid(cfg, subframe, band);
    if (ascii) {
        // One row per subcarrier (highest first), one column per OFDM symbol.
        for (int i = grid.n_subcarriers() - 1; i >= 0; --i) {
            std::cout << (i < 1000 ? " " : "") << (i < 100 ? " " : "") << (i < 10 ? " " : "") << i << ' ';
            for (int l = 0; l < otdoa::kSymbolsPerSubframe; ++l) std::cout << (grid.populated(l, i) ? 'P' : '.');
            std::cout << '\n';
        }
        return kOk;
    }
    std::cout << "symbol,subcarrier,frequency_index,re,im\n";
    for (int l = 0; l < otdoa::kSymbolsPerSubframe; ++l) {
        for (int i = 0; i < grid.n_subcarriers(); ++i) {
            if (!grid.populated(l, i)) continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%.6f,%.6f\n", l, i, grid.frequency_index(i), grid.at(l, i).real(),
                          grid.at(l, i).imag());
            std::cout << buf;
        }
    }
    return kOk;
}

int cmd_transcript(const std::string& path, const std::string& tech, int drop) {
    const auto s = otdoa::load_scenario(path);
    const otdoa::TechnologyPlan plan(s, otdoa::find_technology(s, tech));
    const auto result = otdoa::run_drop(s, plan, drop);
    int n = 1;
    for (const auto& msg : result.transcript) {
        const auto bytes = otdoa::lpp::encode(msg);
        const bool from_server = msg.index() != 1 && msg.index() != 4;
        std::cout << "== message " << n++ << (from_server ? " server -> UE" : " UE -> server") << ", "
                  << bytes.size() << " bytes\n";
        std::cout << otdoa::lpp::hex_dump(bytes);
        std::cout << otdoa::lpp::describe(msg) << "\n\n";
    }
    std::cout << "session phase: " << otdoa::lpp::to_string(result.session_phase) << "; horizontal error "
              << result.error_m << " m\n";
    return kOk;
}

int cmd_run(const std::string& path, const std::string& out, std::optional<int> drops, std::optional<std::uint64_t> seed,
            const std::string& tech, int workers) {
    const auto s = otdoa::load_scenario(path);
    otdoa::CampaignOptions options;
    options.technologies = tech_selection(s, tech);
    options.n_drops = drops;
    options.seed = seed;
    options.workers = workers;
    const auto report = otdoa::run_campaign(s, options);
    otdoa::write_outputs(report, out);
    for (const auto& t : report.technologies) {
        std::printf("%-8s drops=%zu p50=%.1f m p67=%.1f m p90=%.1f m within50m=%.1f%%\n", t.name.c_str(),
                    t.drops.size(), t.cdf.percentile(50), t.cdf.percentile(67), t.cdf.percentile(90),
                    100.0 * t.fraction_within_50m);
    }
    std::printf("outputs written to %s (%.1f s)\n", out.c_str(), report.wall_clock_s);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OTDOA positioning simulator for LTE, LTE-M and NB-IoT PRS"};
    app.require_subcommand(1);

    std::string scenario;
    auto* validate = app.add_subcommand("validate", "Check a scenario file against the PRS value domains");
    validate->add_option("scenario,--scenario", scenario, "Scenario file")->required();

    auto* schedule = app.add_subcommand("schedule", "PRS subframe schedules");
    auto* schedule_dump = schedule->add_subcommand("dump", "List the PRS subframes of one system frame cycle");
    schedule->require_subcommand(1);
    std::string tech = "all";
    int cell = -1;
    int limit = 0;
    schedule_dump->add_option("--scenario", scenario, "Scenario file")->required();
    schedule_dump->add_option("--tech", tech, "Technology name")->required();
    schedule_dump->add_option("--cell", cell, "Cell index (default: the template, no per-cell muting)");
    schedule_dump->add_option("--limit", limit, "Print at most this many subframes");

    auto* grid = app.add_subcommand("grid", "PRS resource grids");
    auto* grid_dump = grid->add_subcommand("dump", "Print the PRS resource elements of one subframe");
    grid->require_subcommand(1);
    int grid_cell = 0;
    int subframe = 0;
    int band = 0;
    bool ascii = false;
    grid_dump->add_option("--scenario", scenario, "Scenario file")->required();
    grid_dump->add_option("--tech", tech, "Technology name")->required();
    grid_dump->add_option("--cell", grid_cell, "Cell index")->default_val(0);
    grid_dump->add_option("--subframe", subframe, "Absolute subframe 0..10239")->default_val(0);
    grid_dump->add_option("--band", band, "Hopping band index")->default_val(0);
    grid_dump->add_flag("--ascii", ascii, "Occupancy map instead of CSV");

    auto* session = app.add_subcommand("session", "LPP sessions");
    auto* transcript = session->add_subcommand("transcript", "Hex dump and decoded form of the five session messages");
    session->require_subcommand(1);
    int drop = 0;
    transcript->add_option("--scenario", scenario, "Scenario file")->required();
    transcript->add_option("--tech", tech, "Technology name")->required();
    transcript->add_option("--drop", drop, "Drop index")->default_val(0);

    auto* run = app.add_subcommand("run", "Run the Monte-Carlo positioning campaign");
    std::string out = "out";
    std::optional<int> drops;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    run->add_option("--scenario", scenario, "Scenario file")->required();
    run->add_option("--out", out, "Output directory")->default_val("out");
    run->add_option("--drops", drops, "Number of UE drops (overrides the scenario)")->check(CLI::NonNegativeNumber);
    run->add_option("--seed", seed, "Campaign seed (overrides the scenario)");
    run->add_option("--tech", tech, "lte|m1|m2|nbiot|all (any technology name of the scenario)")->default_val("all");
    run->add_option("--workers", workers, "Worker threads, 0 = hardware concurrency")->default_val(0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) return cmd_validate(scenario);
        if (*schedule_dump) return cmd_schedule(scenario, tech, cell, limit);
        if (*grid_dump) return cmd_grid(scenario, tech, grid_cell, subframe, band, ascii);
        if (*transcript) return cmd_transcript(scenario, tech, drop);
        if (*run) return cmd_run(scenario, out, drops, seed, tech, workers);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const otdoa::ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kValidation;
    } catch (const otdoa::ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
