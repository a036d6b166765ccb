#include "otdoa/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace otdoa {

namespace {

int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.is_null() ? 0 : mark.line + 1;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) { throw ScenarioError(message, line_of(node)); }

void require_map(const YAML::Node& node, const std::string& what) {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
}

void check_keys(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> allowed) {
    require_map(node, what);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail(kv.first, "unknown key '" + key + "' in " + what);
        }
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, "'" + key + "' has invalid value '" + node.Scalar() + "'");
    }
}

template <typename T>
T required(const YAML::Node& parent, const char* key) {
    const auto node = parent[key];
    if (!node) fail(parent, std::string("missing key '") + key + "'");
    return scalar<T>(node, key);
}

template <typename T>
void optional_into(const YAML::Node& parent, const char* key, T& out) {
    if (const auto node = parent[key]) out = scalar<T>(node, key);
}

template <typename T>
std::optional<T> optional_of(const YAML::Node& parent, const char* key) {
    if (const auto node = parent[key]) return scalar<T>(node, key);
    return std::nullopt;
}

BitString bits_of(const YAML::Node& node, const std::string& key) {
    const auto text = scalar<std::string>(node, key);
    try {
        return parse_bits(text);
    } catch (const Error& e) {
        fail(node, "'" + key + "': " + e.what());
    }
}

std::optional<MutingPattern> muting_of(const YAML::Node& parent) {
    if (const auto node = parent["muting"]) return MutingPattern{bits_of(node, "muting")};
    return std::nullopt;
}

PrsConfig prs_from(const YAML::Node& node) {
    require_map(node, "prs");
    const auto family = required<std::string>(node, "family");
    if (family == "lte") {
        check_keys(node, "lte prs",
                   {"family", "bandwidth_prbs", "carrier_prbs", "period_T_prs", "occasion_length", "subframe_offset",
                    "muting", "physical_cell_id"});
        LtePrsConfig c;
        optional_into(node, "bandwidth_prbs", c.bandwidth_prbs);
        optional_into(node, "carrier_prbs", c.carrier_prbs);
        optional_into(node, "period_T_prs", c.period_T_prs);
        optional_into(node, "occasion_length", c.occasion_length);
        optional_into(node, "subframe_offset", c.subframe_offset);
        c.muting = muting_of(node);
        optional_into(node, "physical_cell_id", c.physical_cell_id);
        return c;
    }
    if (family == "ltem") {
        check_keys(node, "ltem prs",
                   {"family", "bandwidth_prbs", "carrier_prbs", "period_T_prs", "occasion_length", "occasion_interval",
                    "subframe_offset", "prs_id", "hopping", "muting", "muting_group_size"});
        LtemPrsConfig c;
        optional_into(node, "bandwidth_prbs", c.bandwidth_prbs);
        optional_into(node, "carrier_prbs", c.carrier_prbs);
        optional_into(node, "period_T_prs", c.period_T_prs);
        optional_into(node, "occasion_length", c.occasion_length);
        c.occasion_interval = optional_of<int>(node, "occasion_interval");
        optional_into(node, "subframe_offset", c.subframe_offset);
        optional_into(node, "prs_id", c.prs_id);
        if (const auto h = node["hopping"]) {
            check_keys(h, "hopping", {"n_bands", "band_prb_offsets"});
            HoppingConfig hop;
            hop.n_bands = required<int>(h, "n_bands");
            const auto offs = h["band_prb_offsets"];
            if (!offs || !offs.IsSequence()) fail(h, "hopping needs a band_prb_offsets list");
            for (const auto& o : offs) hop.band_prb_offsets.push_back(scalar<int>(o, "band_prb_offsets"));
            c.hopping = hop;
        }
        c.muting = muting_of(node);
        c.muting_group_size = optional_of<int>(node, "muting_group_size");
        return c;
    }
    if (family == "nbiot") {
        check_keys(node, "nbiot prs",
                   {"family", "part_a", "part_b", "prs_id", "deployment_mode", "carrier_prbs", "inband_prb_index"});
        NprsConfig c;
        if (const auto a = node["part_a"]) {
            check_keys(a, "part_a", {"nprs_bitmap", "muting"});
            NprsBitmapConfig part;
            if (!a["nprs_bitmap"]) fail(a, "part_a needs nprs_bitmap");
            part.nprs_bitmap = bits_of(a["nprs_bitmap"], "nprs_bitmap");
            part.muting = muting_of(a);
            c.part_a = part;
        }
        if (const auto b = node["part_b"]) {
            check_keys(b, "part_b", {"period_T_prs", "offset_fraction_a", "occasion_length", "muting"});
            NprsPeriodicConfig part;
            optional_into(b, "period_T_prs", part.period_T_prs);
            if (const auto f = b["offset_fraction_a"]) {
                try {
                    part.offset_eighths = parse_eighths(scalar<std::string>(f, "offset_fraction_a"));
                } catch (const ConfigError& e) {
                    fail(f, e.what());
                }
            }
            optional_into(b, "occasion_length", part.occasion_length);
            part.muting = muting_of(b);
            c.part_b = part;
        }
        optional_into(node, "prs_id", c.prs_id);
        if (const auto m = node["deployment_mode"]) {
            try {
                c.deployment_mode = parse_deployment_mode(scalar<std::string>(m, "deployment_mode"));
            } catch (const ConfigError& e) {
                fail(m, e.what());
            }
        }
        optional_into(node, "carrier_prbs", c.carrier_prbs);
        optional_into(node, "inband_prb_index", c.inband_prb_index);
        return c;
    }
    fail(node["family"], "unknown PRS family '" + family + "' (lte, ltem, nbiot)");
}

void emit_bits(YAML::Emitter& out, const char* key, const BitString& bits) {
    out << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << format_bits(bits);
}

void emit_prs(YAML::Emitter& out, const PrsConfig& cfg) {
    out << YAML::BeginMap;
    if (const auto* c = std::get_if<LtePrsConfig>(&cfg)) {
        out << YAML::Key << "family" << YAML::Value << "lte";
        out << YAML::Key << "bandwidth_prbs" << YAML::Value << c->bandwidth_prbs;
        out << YAML::Key << "carrier_prbs" << YAML::Value << c->carrier_prbs;
        out << YAML::Key << "period_T_prs" << YAML::Value << c->period_T_prs;
        out << YAML::Key << "occasion_length" << YAML::Value << c->occasion_length;
        out << YAML::Key << "subframe_offset" << YAML::Value << c->subframe_offset;
        if (c->muting) emit_bits(out, "muting", c->muting->bits);
        out << YAML::Key << "physical_cell_id" << YAML::Value << c->physical_cell_id;
    } else if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        out << YAML::Key << "family" << YAML::Value << "ltem";
        out << YAML::Key << "bandwidth_prbs" << YAML::Value << m->bandwidth_prbs;
        out << YAML::Key << "carrier_prbs" << YAML::Value << m->carrier_prbs;
        out << YAML::Key << "period_T_prs" << YAML::Value << m->period_T_prs;
        out << YAML::Key << "occasion_length" << YAML::Value << m->occasion_length;
        if (m->occasion_interval) out << YAML::Key << "occasion_interval" << YAML::Value << *m->occasion_interval;
        out << YAML::Key << "subframe_offset" << YAML::Value << m->subframe_offset;
        out << YAML::Key << "prs_id" << YAML::Value << m->prs_id;
        if (m->hopping) {
            out << YAML::Key << "hopping" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "n_bands" << YAML::Value << m->hopping->n_bands;
            out << YAML::Key << "band_prb_offsets" << YAML::Value << YAML::Flow << m->hopping->band_prb_offsets;
            out << YAML::EndMap;
        }
        if (m->muting) emit_bits(out, "muting", m->muting->bits);
        if (m->muting_group_size) out << YAML::Key << "muting_group_size" << YAML::Value << *m->muting_group_size;
    } else {
        const auto& n = std::get<NprsConfig>(cfg);
        out << YAML::Key << "family" << YAML::Value << "nbiot";
        if (n.part_a) {
            out << YAML::Key << "part_a" << YAML::Value << YAML::BeginMap;
            emit_bits(out, "nprs_bitmap", n.part_a->nprs_bitmap);
            if (n.part_a->muting) emit_bits(out, "muting", n.part_a->muting->bits);
            out << YAML::EndMap;
        }
        if (n.part_b) {
            out << YAML::Key << "part_b" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "period_T_prs" << YAML::Value << n.part_b->period_T_prs;
            out << YAML::Key << "offset_fraction_a" << YAML::Value << YAML::DoubleQuoted
                << format_eighths(n.part_b->offset_eighths);
            out << YAML::Key << "occasion_length" << YAML::Value << n.part_b->occasion_length;
            if (n.part_b->muting) emit_bits(out, "muting", n.part_b->muting->bits);
            out << YAML::EndMap;
        }
        out << YAML::Key << "prs_id" << YAML::Value << n.prs_id;
        out << YAML::Key << "deployment_mode" << YAML::Value << to_string(n.deployment_mode);
        out << YAML::Key << "carrier_prbs" << YAML::Value << n.carrier_prbs;
        out << YAML::Key << "inband_prb_index" << YAML::Value << n.inband_prb_index;
    }
    out << YAML::EndMap;
}

SpectralWindow parse_window(const YAML::Node& node) {
    const auto text = scalar<std::string>(node, "window");
    if (text == "hann") return SpectralWindow::hann;
    if (text == "rectangular") return SpectralWindow::rectangular;
    fail(node, "window must be hann or rectangular, got '" + text + "'");
}

ReceiverOptions receiver_from(const YAML::Node& node) {
    check_keys(node, "receiver",
               {"fft_size", "oversampling", "first_path_threshold_db", "detection_margin_db", "search_window_s", "window",
                "rstd_resolution_s"});
    ReceiverOptions r;
    optional_into(node, "fft_size", r.fft_size);
    optional_into(node, "oversampling", r.oversampling);
    optional_into(node, "first_path_threshold_db", r.first_path_threshold_db);
    optional_into(node, "detection_margin_db", r.detection_margin_db);
    optional_into(node, "search_window_s", r.search_window_s);
    if (const auto w = node["window"]) r.window = parse_window(w);
    if (const auto q = node["rstd_resolution_s"]) {
        if (q.IsScalar() && q.Scalar() == "Ts") {
            r.rstd_resolution_s = kTs;
        } else {
            r.rstd_resolution_s = scalar<double>(q, "rstd_resolution_s");
        }
    }
    if (r.oversampling < 1 || r.fft_size < 128 || r.fft_size % 128 != 0) {
        fail(node, "receiver needs oversampling >= 1 and fft_size a multiple of 128");
    }
    return r;
}

TechnologySetup technology_from(const YAML::Node& node) {
    check_keys(node, "technology", {"name", "prs", "valid_subframes", "band", "fft_size"});
    TechnologySetup t;
    t.name = required<std::string>(node, "name");
    if (!node["prs"]) fail(node, "technology '" + t.name + "' has no prs section");
    t.prs = prs_from(node["prs"]);
    if (const auto v = node["valid_subframes"]) t.valid_subframes = bits_of(v, "valid_subframes");
    if (const auto b = node["band"]) {
        const int band = scalar<int>(b, "band");
        if (band < 0 || band > 0xFFFF) fail(b, "band out of range");
        t.band = static_cast<std::uint16_t>(band);
    }
    if (const auto f = node["fft_size"]) {
        t.fft_size = scalar<int>(f, "fft_size");
        if (*t.fft_size < 128 || *t.fft_size % 128 != 0) fail(f, "fft_size must be a multiple of 128");
    }
    return t;
}

Scenario scenario_from(const YAML::Node& root) {
    check_keys(root, "scenario",
               {"name", "seed", "n_drops", "n_occasions", "deployment", "muting", "receiver", "technologies", "cells"});
    Scenario s;
    optional_into(root, "name", s.name);
    optional_into(root, "seed", s.seed);
    optional_into(root, "n_drops", s.n_drops);
    optional_into(root, "n_occasions", s.n_occasions);
    if (s.n_drops < 0) fail(root["n_drops"], "n_drops must be >= 0");
    if (s.n_occasions < 1) fail(root["n_occasions"], "n_occasions must be >= 1");

    if (const auto d = root["deployment"]) {
        check_keys(d, "deployment",
                   {"isd_m", "rings", "carrier_hz", "tx_power_dbm", "noise_figure_db", "penetration_loss_db", "carrier_prbs", "channel_profile",
                    "min_distance_m", "snr_override_db"});
        optional_into(d, "isd_m", s.deployment.isd_m);
        optional_into(d, "rings", s.deployment.rings);
        optional_into(d, "carrier_hz", s.deployment.carrier_hz);
        optional_into(d, "tx_power_dbm", s.deployment.tx_power_dbm);
        optional_into(d, "noise_figure_db", s.deployment.noise_figure_db);
        optional_into(d, "penetration_loss_db", s.deployment.penetration_loss_db);
        optional_into(d, "carrier_prbs", s.deployment.carrier_prbs);
        if (const auto p = d["channel_profile"]) {
            try {
                s.channel = parse_channel_profile(scalar<std::string>(p, "channel_profile"));
            } catch (const Error& e) {
                fail(p, e.what());
            }
        }
        optional_into(d, "min_distance_m", s.min_distance_m);
        s.snr_override_db = optional_of<double>(d, "snr_override_db");
        if (s.deployment.isd_m <= 0.0 || s.deployment.rings < 0) fail(d, "deployment needs isd_m > 0 and rings >= 0");
    }
    if (const auto m = root["muting"]) {
        check_keys(m, "muting", {"plan", "length"});
        if (const auto p = m["plan"]) {
            try {
                s.muting_plan = parse_muting_plan(scalar<std::string>(p, "plan"));
            } catch (const Error& e) {
                fail(p, e.what());
            }
        }
        optional_into(m, "length", s.muting_length);
    }
    if (const auto r = root["receiver"]) s.receiver = receiver_from(r);

    const auto techs = root["technologies"];
    if (!techs || !techs.IsSequence() || techs.size() == 0) fail(root, "scenario needs a non-empty technologies list");
    std::set<std::string> names;
    for (const auto& t : techs) {
        s.technologies.push_back(technology_from(t));
        if (!names.insert(s.technologies.back().name).second) {
            fail(t, "duplicate technology name '" + s.technologies.back().name + "'");
        }
    }
    if (const auto cells = root["cells"]) {
        if (!cells.IsSequence()) fail(cells, "cells must be a list");
        for (const auto& c : cells) {
            check_keys(c, "cell", {"cell", "technology", "prs"});
            CellOverride o;
            o.cell = required<int>(c, "cell");
            o.technology = required<std::string>(c, "technology");
            if (!names.count(o.technology)) fail(c, "cell override names unknown technology '" + o.technology + "'");
            if (!c["prs"]) fail(c, "cell override needs a prs section");
            o.prs = prs_from(c["prs"]);
            s.cells.push_back(o);
        }
    }
    return s;
}

YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ScenarioError("YAML syntax error: " + e.msg, e.mark.line + 1);
    }
}

// Validation errors are attributed to the line of the config they stem from.
int find_line(const std::string& yaml_text, const Scenario& s, const std::string& tech, int cell) {
    const auto root = load_yaml(yaml_text);
    if (cell >= 0) {
        if (const auto cells = root["cells"]) {
            for (std::size_t i = 0; i < s.cells.size(); ++i) {
                if (s.cells[i].cell == cell && s.cells[i].technology == tech) return line_of(cells[i]["prs"]);
            }
        }
    }
    const auto techs = root["technologies"];
    for (std::size_t i = 0; i < s.technologies.size(); ++i) {
        if (s.technologies[i].name == tech) return line_of(techs[i]["prs"]);
    }
    return 0;
}

struct ValidationFailure {
    std::string technology;
    int cell;  // -1 when the template itself fails
    std::string message;
};

std::optional<ValidationFailure> first_failure(const Scenario& s) {
    const auto deployment = hex_layout(s.deployment);
    for (const auto& tech : s.technologies) {
        for (const auto& cell : deployment.cells) {
            try {
                const auto cfg = validate(cell_config(s, tech, cell));
                if (cfg.technology() == Technology::nbiot) {
                    const auto valid = valid_subframes_of(tech, cfg.config());
                    (void)expand(cfg, &valid);
                }
            } catch (const Error& e) {
                const bool overridden = std::any_of(s.cells.begin(), s.cells.end(), [&](const CellOverride& o) {
                    return o.cell == cell.index && o.technology == tech.name;
                });
                return ValidationFailure{tech.name, overridden ? cell.index : -1,
                                         "technology '" + tech.name + "', cell " + std::to_string(cell.index) + ": " +
                                             e.what()};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

ScenarioError::ScenarioError(const std::string& message, int line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string to_string(MutingPlan plan) {
    switch (plan) {
        case MutingPlan::none: return "none";
        case MutingPlan::from_template: return "template";
        case MutingPlan::site_staggered: return "site_staggered";
    }
    return "?";
}

MutingPlan parse_muting_plan(const std::string& text) {
    if (text == "none") return MutingPlan::none;
    if (text == "template") return MutingPlan::from_template;
    if (text == "site_staggered") return MutingPlan::site_staggered;
    throw Error("muting plan '" + text + "' not in {none, template, site_staggered}");
}

std::string format_eighths(int eighths) { return std::to_string(eighths) + "/8"; }

int parse_eighths(const std::string& text) {
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const int v = std::stoi(text, &used);
            if (used == text.size() && v == 0) return 0;
        } else if (text.substr(slash + 1) == "8") {
            const auto num = text.substr(0, slash);
            const int v = std::stoi(num, &used);
            if (used == num.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw DomainViolation("offset_fraction_a", text, "{0, 1/8, ..., 7/8}");
}

Scenario parse_scenario(const std::string& yaml_text) {
    const auto root = load_yaml(yaml_text);
    if (!root || root.IsNull()) throw ScenarioError("empty scenario file");
    Scenario s = scenario_from(root);
    if (const auto failure = first_failure(s)) {
        throw ScenarioValidationError(failure->message, find_line(yaml_text, s, failure->technology, failure->cell));
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& scenario) {
    if (const auto failure = first_failure(scenario)) throw ScenarioValidationError(failure->message);
}

std::string write_scenario(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::Key << "n_drops" << YAML::Value << s.n_drops;
    out << YAML::Key << "n_occasions" << YAML::Value << s.n_occasions;

    out << YAML::Key << "deployment" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "isd_m" << YAML::Value << s.deployment.isd_m;
    out << YAML::Key << "rings" << YAML::Value << s.deployment.rings;
    out << YAML::Key << "carrier_hz" << YAML::Value << s.deployment.carrier_hz;
    out << YAML::Key << "tx_power_dbm" << YAML::Value << s.deployment.tx_power_dbm;
    out << YAML::Key << "noise_figure_db" << YAML::Value << s.deployment.noise_figure_db;
    out << YAML::Key << "penetration_loss_db" << YAML::Value << s.deployment.penetration_loss_db;
    out << YAML::Key << "carrier_prbs" << YAML::Value << s.deployment.carrier_prbs;
    out << YAML::Key << "channel_profile" << YAML::Value << to_string(s.channel);
    out << YAML::Key << "min_distance_m" << YAML::Value << s.min_distance_m;
    if (s.snr_override_db) out << YAML::Key << "snr_override_db" << YAML::Value << *s.snr_override_db;
    out << YAML::EndMap;

    out << YAML::Key << "muting" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "plan" << YAML::Value << to_string(s.muting_plan);
    out << YAML::Key << "length" << YAML::Value << s.muting_length;
    out << YAML::EndMap;

    const auto& r = s.receiver;
    out << YAML::Key << "receiver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "fft_size" << YAML::Value << r.fft_size;
    out << YAML::Key << "oversampling" << YAML::Value << r.oversampling;
    out << YAML::Key << "first_path_threshold_db" << YAML::Value << r.first_path_threshold_db;
    out << YAML::Key << "detection_margin_db" << YAML::Value << r.detection_margin_db;
    out << YAML::Key << "search_window_s" << YAML::Value << r.search_window_s;
    out << YAML::Key << "window" << YAML::Value << (r.window == SpectralWindow::hann ? "hann" : "rectangular");
    out << YAML::Key << "rstd_resolution_s" << YAML::Value << r.rstd_resolution_s;
    out << YAML::EndMap;

    out << YAML::Key << "technologies" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.technologies) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << t.name;
        out << YAML::Key << "band" << YAML::Value << t.band;
        if (t.fft_size) out << YAML::Key << "fft_size" << YAML::Value << *t.fft_size;
        if (t.valid_subframes) emit_bits(out, "valid_subframes", *t.valid_subframes);
        out << YAML::Key << "prs" << YAML::Value;
        emit_prs(out, t.prs);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    if (!s.cells.empty()) {
        out << YAML::Key << "cells" << YAML::Value << YAML::BeginSeq;
        for (const auto& c : s.cells) {
            out << YAML::BeginMap;
            out << YAML::Key << "cell" << YAML::Value << c.cell;
            out << YAML::Key << "technology" << YAML::Value << c.technology;
            out << YAML::Key << "prs" << YAML::Value;
            emit_prs(out, c.prs);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

PrsConfig parse_prs_config(const std::string& yaml_text) { return prs_from(load_yaml(yaml_text)); }

std::string write_prs_config(const PrsConfig& config) {
    YAML::Emitter out;
    emit_prs(out, config);
    return std::string(out.c_str()) + "\n";
}

const TechnologySetup& find_technology(const Scenario& scenario, const std::string& name) {
    for (const auto& t : scenario.technologies) {
        if (t.name == name) return t;
    }
    throw ScenarioError("scenario has no technology named '" + name + "'");
}

PrsConfig cell_config(const Scenario& scenario, const TechnologySetup& tech, const Cell& cell) {
    for (const auto& o : scenario.cells) {
        if (o.cell == cell.index && o.technology == tech.name) return o.prs;
    }
    PrsConfig cfg = tech.prs;
    std::optional<MutingPattern> muting;
    if (scenario.muting_plan == MutingPlan::site_staggered) {
        BitString bits(static_cast<std::size_t>(std::max(scenario.muting_length, 1)), false);
        bits[static_cast<std::size_t>(cell.site / 2) % bits.size()] = true;
        muting = MutingPattern{bits};
    }
    std::visit(
        [&](auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, LtePrsConfig>) {
                c.physical_cell_id = cell.index;
                if (scenario.muting_plan != MutingPlan::from_template) c.muting = muting;
            } else if constexpr (std::is_same_v<T, LtemPrsConfig>) {
                c.prs_id = cell.index;
                if (scenario.muting_plan != MutingPlan::from_template) c.muting = muting;
            } else {
                c.prs_id = cell.index;
                if (scenario.muting_plan != MutingPlan::from_template) {
                    if (c.part_a) c.part_a->muting = muting;
                    if (c.part_b) c.part_b->muting = muting;
                }
            }
        },
        cfg);
    return cfg;
}

ValidSubframeBitmap valid_subframes_of(const TechnologySetup& tech, const PrsConfig& cell_config) {
    if (tech.valid_subframes) return {*tech.valid_subframes};
    if (const auto* n = std::get_if<NprsConfig>(&cell_config)) return complement_of_part_a(*n);
    return {BitString(10, true)};
}

}  // namespace otdoa
