// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "otdoa/campaign.hpp"
#include "otdoa/ofdm.hpp"
#include "otdoa/re_mapping.hpp"

using namespace otdoa;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

Scenario desk() { return load_scenario(OTDOA_SOURCE_DIR "/scenarios/fig5-desk.yaml"); }

// 1 ------------------------------------------------------------------------
Outcome bandwidth_ordering() {
    const auto s = desk();
    const auto report = run_campaign(s);
    const double lte = report.technology("lte").cdf.percentile(50);
    const double m2 = report.technology("m2").cdf.percentile(50);
    const double m1 = report.technology("m1").cdf.percentile(50);
    const double nb = report.technology("nbiot").cdf.percentile(50);
    const bool pass = s.n_drops >= 500 && m2 >= 1.1 * lte && m1 >= 1.1 * m2 && nb >= 1.1 * m1;
    return {pass, format("median error over %d drops: lte %.2f m < m2 %.2f m < m1 %.2f m < nbiot %.2f m "
                         "(ratios %.2f, %.2f, %.2f; %.0f s)",
                         s.n_drops, lte, m2, m1, nb, m2 / lte, m1 / m2, nb / m1, report.wall_clock_s)};
}

// 2 ------------------------------------------------------------------------
double fraction_below_1m(const CampaignReport& r, int* eligible) {
    int good = 0;
    *eligible = 0;
    for (const auto& d : r.technologies[0].drops) {
        if (d.n_detected < 4) continue;
        ++*eligible;
        if (d.error_m < 1.0) ++good;
    }
    return *eligible ? static_cast<double>(good) / *eligible : 0.0;
}

Outcome noise_free_oracle() {
    auto s = desk();
    s.channel = ChannelProfile::awgn;
    s.snr_override_db = 30.0;
    s.receiver.rstd_resolution_s = 0.0;
    CampaignOptions opt;
    opt.technologies = {"lte"};
    opt.n_drops = 200;
    int eligible = 0;
    const double exact = fraction_below_1m(run_campaign(s, opt), &eligible);
    const int unquantized_eligible = eligible;
    s.receiver.rstd_resolution_s = kTs;
    const double quantized = fraction_below_1m(run_campaign(s, opt), &eligible);
    return {unquantized_eligible >= 198 && exact >= 0.99,
            format("AWGN, 30 dB: %.1f%% of %d drops with >= 4 cells under 1 m (reported at Ts resolution: %.1f%%)",
                   100.0 * exact, unquantized_eligible, 100.0 * quantized)};
}

// 3 ------------------------------------------------------------------------
std::set<std::pair<int, int>> res_of(const ResourceGrid& g) {
    std::set<std::pair<int, int>> out;
    for (int l = 0; l < kSymbolsPerSubframe; ++l) {
        for (int i = 0; i < g.n_subcarriers(); ++i) {
            if (g.populated(l, i)) out.insert({l, i});
        }
    }
    return out;
}

Outcome reuse_disjointness() {
    std::vector<std::function<PrsConfig(int)>> variants;
    variants.push_back([](int id) {
        LtePrsConfig c;
        c.bandwidth_prbs = c.carrier_prbs = 100;
        c.physical_cell_id = id;
        return PrsConfig{c};
    });
    variants.push_back([](int id) {
        LtemPrsConfig c;
        c.carrier_prbs = 50;
        c.prs_id = id;
        c.hopping = HoppingConfig{4, {22, 0, 10, 44}};
        return PrsConfig{c};
    });
    variants.push_back([](int id) {
        LtemPrsConfig c;
        c.bandwidth_prbs = 25;
        c.prs_id = id;
        return PrsConfig{c};
    });
    for (auto mode : {DeploymentMode::inband, DeploymentMode::guardband, DeploymentMode::standalone}) {
        for (bool part_a : {true, false}) {
            variants.push_back([=](int id) {
                NprsConfig c;
                if (part_a) c.part_a = NprsBitmapConfig{BitString(10, true), std::nullopt};
                else c.part_b = NprsPeriodicConfig{160, 0, 10, std::nullopt};
                c.prs_id = id;
                c.deployment_mode = mode;
                c.carrier_prbs = 50;
                c.inband_prb_index = 17;
                return PrsConfig{c};
            });
        }
    }
    long pairs = 0, collisions = 0;
    for (const auto& make : variants) {
        const int n_bands = std::holds_alternative<LtemPrsConfig>(make(0)) && std::get<LtemPrsConfig>(make(0)).hopping ? 4 : 1;
        for (int sf = 0; sf < 10; ++sf) {
            for (int band = 0; band < n_bands; ++band) {
                std::vector<std::set<std::pair<int, int>>> sets;
                // Identities 6 apart share a shift class; include a second member per class.
                for (int id = 0; id < 12; ++id) sets.push_back(res_of(prs_grid(validate(make(id * 7 % 4096)), sf, band)));
                for (std::size_t a = 0; a < sets.size(); ++a) {
                    for (std::size_t b = 0; b < sets.size(); ++b) {
                        if (a == b || (a * 7) % 6 == (b * 7) % 6) continue;
                        ++pairs;
                        for (const auto& re : sets[a]) collisions += sets[b].count(re);
                    }
                }
            }
        }
    }
    return {collisions == 0, format("%ld cross-class pairs over %zu families/modes/symbol sets, %ld colliding REs", pairs,
                                    variants.size(), collisions)};
}

// 4, 5 ---------------------------------------------------------------------
SubframeSchedule expand_any(const PrsConfig& c) { return expand(validate(c)); }

Outcome schedule_oracle() {
    oracle::Rng rng(4000);
    int mismatches = 0, total = 0;
    for (auto tech : {Technology::lte, Technology::ltem, Technology::nbiot}) {
        for (int i = 0; i < 1000; ++i) {
            const auto c = oracle::random_config(rng, tech);
            if (oracle::slots(expand_any(c)) != oracle::slots(c)) ++mismatches;
            ++total;
        }
    }
    return {mismatches == 0, format("%d random configs (1000 per family), %d differ from the brute-force evaluator", total,
                                    mismatches)};
}

Outcome muting_properties() {
    oracle::Rng rng(5000);
    int violations = 0, total = 0;
    for (auto tech : {Technology::lte, Technology::ltem, Technology::nbiot}) {
        for (int i = 0; i < 1000; ++i) {
            auto c = oracle::random_config(rng, tech);
            // Force a pattern so the property is exercised on every config.
            if (auto* l = std::get_if<LtePrsConfig>(&c); l && !l->muting) l->muting = oracle::random_muting(rng);
            if (auto* m = std::get_if<LtemPrsConfig>(&c); m && !m->muting) m->muting = oracle::random_muting(rng);
            if (auto* n = std::get_if<NprsConfig>(&c)) {
                if (n->part_a && !n->part_a->muting) n->part_a->muting = oracle::random_muting(rng);
                if (n->part_b && !n->part_b->muting) n->part_b->muting = oracle::random_muting(rng);
            }
            const auto muted = expand_any(c);
            const auto unmuted = expand_any(oracle::with_muting(c, false));
            bool ok = expand_any(oracle::with_muting(c, true)) == unmuted;
            for (const auto& e : muted.entries()) ok = ok && unmuted.is_transmitted(e.abs_sf);
            if (!ok) ++violations;
            ++total;
        }
    }
    return {violations == 0, format("%d random muted configs, %d violate subset or all-ones identity", total, violations)};
}

// 6 ------------------------------------------------------------------------
double ratio_at(double snr_db, int n_occasions, std::uint64_t seed) {
    LtePrsConfig c;
    c.physical_cell_id = 2;
    const auto cfg = validate(c);
    const auto schedule = expand(cfg);
    const auto replica = prs_grid(cfg, 0);
    Link link;
    link.true_delay_s = 0.9e-6;
    link.taps = profile_taps(ChannelProfile::awgn);
    link.gains = {cplx(1.0, 0.0)};
    link.snr_db = snr_db;
    Rng rng(seed);
    const CellGrid cell{&link, &replica};
    const auto profile = accumulate([&](int) { return synthesize_rx_grid(std::span(&cell, 1), 50, 1.0, rng, &replica); },
                                    [&](int) { return replica; }, schedule, n_occasions, ReceiverOptions{});
    return peak_to_floor_db(profile);
}

Outcome accumulation_gain() {
    int wins = 0;
    double sum1 = 0.0, sum8 = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const double r8 = ratio_at(-10.0, 8, 6000 + t);
        const double r1 = ratio_at(-10.0, 1, 9000 + t);
        sum1 += r1;
        sum8 += r8;
        if (r8 > r1) ++wins;
    }
    return {wins >= 190, format("-10 dB per RE: 8 occasions beat 1 in %d/200 trials (mean ratio %.1f dB vs %.1f dB)", wins,
                                sum8 / 200, sum1 / 200)};
}

// 7 ------------------------------------------------------------------------
Outcome jacobian_check() {
    oracle::Rng rng(7000);
    std::uniform_real_distribution<double> u(-1500.0, 1500.0);
    double worst = 0.0;
    int points = 0;
    while (points < 100) {
        TdoaProblem p;
        p.reference = {u(rng), u(rng)};
        for (int i = 0; i < 5; ++i) {
            p.neighbors.push_back({u(rng), u(rng)});
            p.rstd_s.push_back(u(rng) / kSpeedOfLight);
        }
        const Position x{u(rng), u(rng)};
        bool near = distance(x, p.reference) < 1.0;
        for (const auto& n : p.neighbors) near = near || distance(x, n) < 1.0;
        if (near) continue;
        const auto j = jacobian(x, p);
        const double h = 1e-3;
        for (int axis = 0; axis < 2; ++axis) {
            Position a = x, b = x;
            (axis == 0 ? a.x : a.y) += h;
            (axis == 0 ? b.x : b.y) -= h;
            const auto ra = residual(a, p), rb = residual(b, p);
            for (std::size_t i = 0; i < ra.size(); ++i) {
                const double an = j[i][static_cast<std::size_t>(axis)];
                const double fd = (ra[i] - rb[i]) / (2 * h);
                worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
            }
        }
        ++points;
    }
    return {worst < 1e-6, format("100 random points, worst relative error %.2e", worst)};
}

// 8 ------------------------------------------------------------------------
Outcome part_a_example() {
    NprsConfig c;
    c.part_a = NprsBitmapConfig{parse_bits("0110000000"), std::nullopt};
    const auto s = expand_nprs(c, {parse_bits("1000111111")});
    bool ok = s.size() == 2048;
    for (int sf = 0; sf < kCycleSubframes; ++sf) ok = ok && s.is_transmitted(sf) == (sf % 10 == 1 || sf % 10 == 2);
    int flagged = -1;
    try {
        expand_nprs(c, {parse_bits("1010111111")});
    } catch (const PartANotInvalid& e) {
        flagged = e.subframe();
    }
    return {ok && flagged == 2, format("NPRS in subframes {1,2} of all 1024 frames: %s; subframe 2 marked valid raises "
                                       "PartANotInvalid at subframe %d",
                                       ok ? "yes" : "no", flagged)};
}

// 9 ------------------------------------------------------------------------
Outcome lpp_round_trip() {
    oracle::Rng rng(9000);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto m = oracle::random_message(rng);
        if (!(lpp::decode(lpp::encode(m)) == m)) ++failures;
    }
    const auto s = desk();
    const TechnologyPlan plan(s, find_technology(s, "lte"));
    const auto drop = run_drop(s, plan, 0);
    const bool done = drop.session_phase == lpp::Phase::done && drop.transcript.size() == 5;
    return {failures == 0 && done, format("1000 random messages, %d round-trip failures; %zu-message session ends in %s",
                                          failures, drop.transcript.size(), lpp::to_string(drop.session_phase).c_str())};
}

// 10 -----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const auto base = fs::temp_directory_path() / "otdoa_acceptance_determinism";
    fs::remove_all(base);
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string(OTDOA_SIM_PATH) + " run --scenario " OTDOA_SOURCE_DIR
                                "/scenarios/fig5-desk.yaml --seed 42 --drops 5 --tech all --out " +
                                (base / run).string() + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "run command failed"};
    }
    int files = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        if (slurp(e.path()) != slurp(base / "b" / e.path().filename())) ++differing;
    }
    fs::remove_all(base);
    return {files == 13 && differing == 0,
            format("two `run --seed 42` invocations: %d CSV files, %d differ", files, differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bandwidth ordering", bandwidth_ordering},
        {"noise-free oracle", noise_free_oracle},
        {"reuse-6 disjointness", reuse_disjointness},
        {"schedule oracle equivalence", schedule_oracle},
        {"muting properties", muting_properties},
        {"accumulation gain", accumulation_gain},
        {"Jacobian vs finite differences", jacobian_check},
        {"Part A bitmap example", part_a_example},
        {"LPP round trip and session", lpp_round_trip},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
