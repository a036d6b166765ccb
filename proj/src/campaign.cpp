#include "otdoa/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <thread>

#include "otdoa/ofdm.hpp"
#include "otdoa/re_mapping.hpp"

namespace otdoa {

namespace {

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t drop_seed(std::uint64_t seed, int drop_id) { return seed ^ mix_seed(static_cast<std::uint64_t>(drop_id)); }

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(base ^ mix_seed(a ^ mix_seed(b)));
}

enum : std::uint64_t { kStreamLinks = 1, kStreamNoise = 2, kStreamFading = 3 };

int n_bands_of(const PrsConfig& cfg) {
    if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) return m->hopping ? m->hopping->n_bands : 1;
    return 1;
}

ReceiverOptions receiver_for(const Scenario& scenario, const TechnologySetup& setup) {
    ReceiverOptions r = scenario.receiver;
    if (setup.fft_size) r.fft_size = *setup.fft_size;
    return r;
}

}  // namespace

TechnologyPlan::TechnologyPlan(const Scenario& scenario, const TechnologySetup& setup)
    : setup_(setup), deployment_(hex_layout(scenario.deployment)), receiver_(receiver_for(scenario, setup)) {
    for (const auto& cell : deployment_.cells) {
        const auto cfg = validate(cell_config(scenario, setup, cell));
        const auto valid = valid_subframes_of(setup, cfg.config());
        cells_.push_back({cell, cfg.config(), expand(cfg, &valid)});
        n_bands_ = std::max(n_bands_, n_bands_of(cfg.config()));
        const int prbs = grid_prbs_of(cfg.config());
        if (grid_prbs_ != 0 && prbs != grid_prbs_) throw Error("technology '" + setup.name + "' mixes grid sizes");
        grid_prbs_ = prbs;
    }
    replicas_.resize(cells_.size() * 10 * static_cast<std::size_t>(n_bands_));
    unions_.assign(10 * static_cast<std::size_t>(n_bands_), ResourceGrid(grid_prbs_));
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto cfg = validate(cells_[c].config);
        for (const auto& e : cells_[c].schedule.entries()) {
            auto& slot = replicas_[key(static_cast<int>(c), e.abs_sf, e.band_index)];
            if (slot) continue;
            slot = prs_grid(cfg, e.abs_sf, e.band_index);
            auto& mask = unions_[static_cast<std::size_t>(e.band_index * 10 + e.abs_sf % 10)];
            for (int l = 0; l < kSymbolsPerSubframe; ++l) {
                for (int i = 0; i < mask.n_subcarriers(); ++i) {
                    if (slot->populated(l, i) && !mask.populated(l, i)) mask.set(l, i, cplx{1.0, 0.0});
                }
            }
        }
    }
}

std::size_t TechnologyPlan::key(int cell, int abs_sf, int band) const {
    return (static_cast<std::size_t>(cell) * static_cast<std::size_t>(n_bands_) + static_cast<std::size_t>(band)) * 10 +
           static_cast<std::size_t>(abs_sf % 10);
}

const ResourceGrid& TechnologyPlan::replica(int cell, int abs_sf, int band) const {
    const auto& slot = replicas_.at(key(cell, abs_sf, band));
    if (!slot) throw Error("cell " + std::to_string(cell) + " transmits no PRS in subframe " + std::to_string(abs_sf));
    return *slot;
}

const ResourceGrid& TechnologyPlan::union_mask(int abs_sf, int band) const {
    return unions_.at(static_cast<std::size_t>(band * 10 + abs_sf % 10));
}

lpp::CellAssistance TechnologyPlan::assistance(int cell) const {
    return {cells_.at(static_cast<std::size_t>(cell)).cell.index, setup_.band, cells_.at(static_cast<std::size_t>(cell)).config};
}

lpp::ProvideCapabilities TechnologyPlan::ue_capabilities() const {
    lpp::ProvideCapabilities caps;
    caps.supported_bands = {setup_.band};
    const auto& cfg = cells_.front().config;
    switch (technology_of(cfg)) {
        case Technology::lte: caps.max_bandwidth = lpp::BandwidthClass::wideband; break;
        case Technology::ltem:
            caps.max_bandwidth =
                std::get<LtemPrsConfig>(cfg).bandwidth_prbs <= 6 ? lpp::BandwidthClass::m1 : lpp::BandwidthClass::m2;
            break;
        case Technology::nbiot: caps.max_bandwidth = lpp::BandwidthClass::nb; break;
    }
    return caps;
}

namespace {

// What the UE knows about one cell: derived from the assistance data only.
struct UeCellView {
    int cell = 0;
    SubframeSchedule schedule;
    std::vector<int> subframes;
    bool matches_plan = false;
    std::optional<ValidatedConfig> config;
};

// The radio environment of one drop: true links, per-occasion fading, noise.
class Environment {
public:
    Environment(const Scenario& scenario, const TechnologyPlan& plan, std::uint64_t seed, Position ue)
        : plan_(plan), seed_(seed) {
        Rng rng(stream_seed(seed, kStreamLinks));
        for (const auto& c : plan.deployment().cells) {
            links_.push_back(make_link(plan.deployment(), c, ue, scenario.channel, rng));
            if (scenario.snr_override_db) links_.back().snr_db = *scenario.snr_override_db;
        }
    }

    const Link& link(int cell) const { return links_.at(static_cast<std::size_t>(cell)); }

    ResourceGrid received(int abs_sf, int band) {
        std::vector<CellGrid> tx;
        for (const auto& cp : plan_.cells()) {
            if (!cp.schedule.is_transmitted(abs_sf)) continue;
            const auto& entry = cp.schedule.at(abs_sf);
            tx.push_back({&links_[static_cast<std::size_t>(cp.cell.index)], &plan_.replica(cp.cell.index, abs_sf, entry.band_index),
                          response(cp.cell.index, entry.occasion)});
        }
        Rng noise(stream_seed(seed_, kStreamNoise, static_cast<std::uint64_t>(abs_sf)));
        return synthesize_rx_grid(tx, plan_.grid_prbs(), 1.0, noise, &plan_.union_mask(abs_sf, band));
    }

private:
    std::span<const cplx> response(int cell, long occasion) {
        const auto k = std::make_pair(cell, occasion);
        auto it = responses_.find(k);
        if (it == responses_.end()) {
            Link faded = links_[static_cast<std::size_t>(cell)];
            Rng rng(stream_seed(seed_, kStreamFading,
                                (static_cast<std::uint64_t>(cell) << 32) ^ static_cast<std::uint64_t>(occasion)));
            refade(faded, rng);
            it = responses_.emplace(k, scaled_response(faded, plan_.grid_prbs())).first;
        }
        return it->second;
    }

    const TechnologyPlan& plan_;
    std::uint64_t seed_;
    std::vector<Link> links_;
    std::map<std::pair<int, long>, std::vector<cplx>> responses_;
};

std::vector<ToaMeasurement> measure_toas(const Scenario& scenario, const TechnologyPlan& plan, Environment& env,
                                         const lpp::ProvideAssistanceData& ad) {
    std::vector<lpp::CellAssistance> listed{ad.reference};
    listed.insert(listed.end(), ad.neighbors.begin(), ad.neighbors.end());

    std::vector<UeCellView> views;
    for (const auto& a : listed) {
        UeCellView v;
        v.cell = a.cell_id;
        v.config = validate(a.prs);
        const auto& planned = plan.cells().at(static_cast<std::size_t>(a.cell_id));
        v.matches_plan = planned.config == a.prs;
        v.schedule = v.matches_plan ? planned.schedule : expand(*v.config, nullptr);
        v.subframes = measurement_subframes(v.schedule, scenario.n_occasions);
        views.push_back(std::move(v));
    }

    // Walk the union of measured subframes in time order so each received
    // subframe is synthesized once and shared by all cells measured in it.
    std::map<std::pair<int, int>, std::vector<std::size_t>> by_subframe;
    for (std::size_t i = 0; i < views.size(); ++i) {
        for (int sf : views[i].subframes) by_subframe[{sf, views[i].schedule.at(sf).band_index}].push_back(i);
    }
    std::vector<Correlator> correlators(views.size(), Correlator(plan.receiver()));
    for (const auto& [key, who] : by_subframe) {
        const auto [sf, band] = key;
        const ResourceGrid rx = env.received(sf, band);
        for (std::size_t i : who) {
            const auto& v = views[i];
            if (v.matches_plan) {
                correlators[i].add_subframe(rx, plan.replica(v.cell, sf, band));
            } else {
                correlators[i].add_subframe(rx, prs_grid(*v.config, sf, band));
            }
        }
    }
    std::vector<ToaMeasurement> toas;
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (correlators[i].n_subframes() == 0) throw NoScheduledSubframes();
        toas.push_back(detect_toa(correlators[i].profile(), plan.receiver(), views[i].cell));
    }
    return toas;
}

Position initial_guess(const Deployment& d, int serving) {
    const auto& cell = d.cells.at(static_cast<std::size_t>(serving));
    const double a = cell.azimuth_deg * std::numbers::pi / 180.0;
    const double r = d.params.isd_m / 4.0;
    return {cell.position.x + r * std::cos(a), cell.position.y + r * std::sin(a)};
}

}  // namespace

DropResult run_drop(const Scenario& scenario, const TechnologyPlan& plan, int drop_id) {
    const auto dseed = drop_seed(scenario.seed, drop_id);
    const auto ue = drop_ue(plan.deployment(), dseed, scenario.min_distance_m);
    const auto tseed = stream_seed(dseed, name_hash(plan.setup().name));

    DropResult out;
    out.drop_id = drop_id;
    out.truth = ue.position;
    out.serving_cell = ue.serving_cell;

    Environment env(scenario, plan, tseed, ue.position);

    lpp::ServerContext server;
    server.transaction_id = static_cast<std::uint32_t>(drop_id + 1);
    server.reference = plan.assistance(ue.serving_cell);
    for (const auto& c : plan.cells()) {
        if (c.cell.index != ue.serving_cell) server.neighbors.push_back(plan.assistance(c.cell.index));
    }

    std::vector<ToaMeasurement> toas;
    int reference = ue.serving_cell;
    lpp::UeContext client;
    client.capabilities = plan.ue_capabilities();
    client.measure = [&](const lpp::ProvideAssistanceData& ad) {
        toas = measure_toas(scenario, plan, env, ad);
        reference = ad.reference.cell_id;
        const auto ref = std::find_if(toas.begin(), toas.end(), [&](const ToaMeasurement& t) { return t.cell_id == reference; });
        if (!ref->detected) {
            const ToaMeasurement* best = nullptr;
            for (const auto& t : toas) {
                if (t.detected && (!best || t.quality_db > best->quality_db)) best = &t;
            }
            if (!best) return std::vector<RstdMeasurement>{};
            reference = best->cell_id;
        }
        return form_rstd(toas, reference, plan.receiver().rstd_resolution_s);
    };

    const auto transcript = lpp::run_session(server, client);
    out.transcript = transcript.messages;
    out.assistance = *transcript.ue.assistance;
    out.session_phase = transcript.server.phase;
    out.rstds = transcript.server.measurements;
    out.reference_cell = reference;

    for (const auto& t : toas) {
        const auto& link = env.link(t.cell_id);
        out.cells.push_back({t.cell_id, t.detected, t.toa_s, link.true_delay_s, t.quality_db, link.snr_db});
        if (t.detected) ++out.n_detected;
    }

    const Position init = initial_guess(plan.deployment(), ue.serving_cell);
    if (out.rstds.size() >= 2) {
        TdoaProblem problem;
        problem.reference = plan.deployment().cells.at(static_cast<std::size_t>(reference)).position;
        std::vector<double> quality;
        for (const auto& r : out.rstds) {
            problem.neighbors.push_back(plan.deployment().cells.at(static_cast<std::size_t>(r.neighbor_cell_id)).position);
            problem.rstd_s.push_back(r.rstd_s);
            quality.push_back(r.quality_db);
        }
        problem.weights = quality_weights(quality);
        SolverOptions options;
        options.restart_half_span_m = scenario.deployment.isd_m;
        options.search_radius_m = 2.0 * scenario.deployment.isd_m;
        const auto fix = solve(problem, init, options);
        out.estimate = fix.estimate;
        out.converged = fix.converged;
        out.iterations = fix.iterations;
        out.fix = "otdoa";
    } else {
        out.estimate = plan.deployment().cells.at(static_cast<std::size_t>(ue.serving_cell)).position;
        out.fix = "serving";
    }
    out.error_m = distance(out.estimate, out.truth);
    return out;
}

const TechnologyReport& CampaignReport::technology(const std::string& name) const {
    for (const auto& t : technologies) {
        if (t.name == name) return t;
    }
    throw Error("campaign report has no technology '" + name + "'");
}

CampaignReport run_campaign(const Scenario& scenario_in, const CampaignOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    Scenario scenario = scenario_in;
    if (options.n_drops) scenario.n_drops = *options.n_drops;
    if (options.seed) scenario.seed = *options.seed;
    if (scenario.n_drops < 0) throw Error("n_drops must be >= 0");

    std::vector<const TechnologySetup*> selected;
    if (options.technologies.empty()) {
        for (const auto& t : scenario.technologies) selected.push_back(&t);
    } else {
        for (const auto& name : options.technologies) selected.push_back(&find_technology(scenario, name));
    }

    int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(scenario.n_drops, 1));

    CampaignReport report;
    report.scenario = scenario.name;
    report.seed = scenario.seed;
    for (const auto* setup : selected) {
        std::unique_ptr<TechnologyPlan> plan;
        try {
            plan = std::make_unique<TechnologyPlan>(scenario, *setup);
        } catch (const Error& e) {
            throw Error("scenario '" + scenario.name + "', technology '" + setup->name + "': " + e.what());
        }

        std::vector<DropResult> drops(static_cast<std::size_t>(scenario.n_drops));
        std::vector<std::exception_ptr> errors(drops.size());
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next++; i < scenario.n_drops; i = next++) {
                try {
                    drops[static_cast<std::size_t>(i)] = run_drop(scenario, *plan, i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i]) continue;
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw Error("scenario '" + scenario.name + "', technology '" + setup->name + "', drop " +
                            std::to_string(i) + ": " + e.what());
            }
        }

        std::vector<double> errs;
        for (const auto& d : drops) errs.push_back(d.error_m);
        ErrorCdf cdf(errs);
        std::vector<std::pair<double, double>> pct;
        for (double q : kReportPercentiles) pct.emplace_back(q, cdf.percentile(q));
        const double within = cdf.fraction_at_or_below(50.0);
        report.technologies.push_back({setup->name, std::move(drops), std::move(cdf), std::move(pct), within});
    }
    report.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

namespace {

std::string fmt(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    return f;
}

}  // namespace

void write_outputs(const CampaignReport& report, const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    fs::create_directories(dir);

    for (const auto& t : report.technologies) {
        auto results = open_csv(dir / ("results_" + t.name + ".csv"));
        results << "drop_id,true_x,true_y,est_x,est_y,err_m,converged,n_meas,fix,iterations,n_detected,"
                   "serving_cell,reference_cell\n";
        for (const auto& d : t.drops) {
            results << d.drop_id << ',' << fmt(d.truth.x, 3) << ',' << fmt(d.truth.y, 3) << ',' << fmt(d.estimate.x, 3)
                    << ',' << fmt(d.estimate.y, 3) << ',' << fmt(d.error_m, 3) << ',' << (d.converged ? 1 : 0)
                    << ',' << d.rstds.size() << ',' << d.fix << ',' << d.iterations << ',' << d.n_detected << ','
                    << d.serving_cell << ',' << d.reference_cell << '\n';
        }

        auto meas = open_csv(dir / ("measurements_" + t.name + ".csv"));
        meas << "drop_id,cell_id,detected,toa_s,rstd_s,quality_db,true_delay_s,snr_db\n";
        for (const auto& d : t.drops) {
            for (const auto& c : d.cells) {
                const auto r = std::find_if(d.rstds.begin(), d.rstds.end(),
                                            [&](const RstdMeasurement& m) { return m.neighbor_cell_id == c.cell; });
                meas << d.drop_id << ',' << c.cell << ',' << (c.detected ? 1 : 0) << ',' << sci(c.toa_s) << ','
                     << (r != d.rstds.end() ? sci(r->rstd_s) : std::string()) << ',' << fmt(c.quality_db, 3) << ','
                     << sci(c.true_delay_s) << ',' << fmt(c.snr_db, 3) << '\n';
            }
        }

        auto cdf = open_csv(dir / ("cdf_" + t.name + ".csv"));
        cdf << "err_m,cum_prob\n";
        constexpr int kPoints = 200;
        for (int i = 0; i < kPoints; ++i) {
            const double p = static_cast<double>(i) / (kPoints - 1);
            cdf << fmt(t.cdf.percentile(100.0 * p), 3) << ',' << fmt(p, 6) << '\n';
        }
    }

    auto summary = open_csv(dir / "summary.csv");
    summary << "technology,n_drops";
    for (double q : kReportPercentiles) summary << ",p" << static_cast<int>(q) << "_m";
    summary << ",fraction_within_50m,fix_rate\n";
    for (const auto& t : report.technologies) {
        const auto fixes = std::count_if(t.drops.begin(), t.drops.end(), [](const DropResult& d) { return d.fix == "otdoa"; });
        summary << t.name << ',' << t.drops.size();
        for (const auto& [q, v] : t.percentiles) summary << ',' << fmt(v, 3);
        summary << ',' << fmt(t.fraction_within_50m, 4) << ',' << fmt(static_cast<double>(fixes) / t.drops.size(), 4)
                << '\n';
    }

    std::ofstream text(dir / "summary.txt");
    if (!text) throw Error("cannot write summary.txt");
    text << "scenario " << report.scenario << ", seed " << report.seed << "\n\n";
    text << "technology  drops     p40     p50     p67     p80     p90     p95   <=50m\n";
    for (const auto& t : report.technologies) {
        char line[256];
        std::snprintf(line, sizeof line, "%-10s %6zu", t.name.c_str(), t.drops.size());
        text << line;
        for (const auto& [q, v] : t.percentiles) {
            std::snprintf(line, sizeof line, " %7.1f", v);
            text << line;
        }
        std::snprintf(line, sizeof line, " %6.1f%%\n", 100.0 * t.fraction_within_50m);
        text << line;
    }
    text << "\nerrors in meters; wall clock " << fmt(report.wall_clock_s, 1) << " s\n";
}

}  // namespace otdoa
