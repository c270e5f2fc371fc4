#include "urbanaq/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "urbanaq/timeutil.hpp"

namespace urbanaq {

using nlohmann::json;

namespace {

Quantity quantity_from(const std::string& code) {
    auto q = parse_quantity(code);
    if (!q) throw ConfigError("unknown quantity code '" + code + "'");
    return *q;
}

GeoPoint point_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(where + ": expected [lat, lon]");
    }
    GeoPoint p{j[0].get<double>(), j[1].get<double>()};
    if (!p.is_valid()) throw ConfigError(where + ": coordinate out of range");
    return p;
}

LinkModel link_from(const json& j, LinkModel base) {
    base.range_m = j.value("range_m", base.range_m);
    base.loss_prob = j.value("loss_prob", base.loss_prob);
    base.latency_s = j.value("latency_s", base.latency_s);
    return base;
}

QuantityField quantity_field_from(const json& j) {
    QuantityField f;
    f.baseline = j.value("baseline", 0.0);
    f.diurnal_amplitude = j.value("diurnal_amplitude", 0.0);
    f.diurnal_peak_hour = j.value("diurnal_peak_hour", 15.0);
    f.traffic_coupling = j.value("traffic_coupling", 0.0);
    f.noise_sigma = j.value("noise_sigma", 0.0);
    if (j.contains("plumes")) {
        for (const auto& pj : j.at("plumes")) {
            Plume p;
            p.center = GeoPoint{pj.at("lat").get<double>(), pj.at("lon").get<double>()};
            p.sigma_m = pj.value("sigma_m", 100.0);
            p.amplitude = pj.value("amplitude", 0.0);
            f.plumes.push_back(p);
        }
    }
    return f;
}

SensorSpec sensor_from(Quantity q, const json& j) {
    SensorSpec s = default_sensor_spec(q);
    s.warmup_s = j.value("warmup_s", s.warmup_s);
    s.t90_s = j.value("t90_s", s.t90_s);
    s.lod = j.value("lod", s.lod);
    s.resolution = j.value("resolution", s.resolution);
    // CO is stored in mg/m3 but its sensor figures are quoted in ppm.
    if (j.contains("lod_ppm")) {
        const double ppm = j.at("lod_ppm").get<double>();
        s.lod = q == Quantity::CO ? co_ppm_to_mg_m3(ppm) : ppm;
    }
    if (j.contains("resolution_ppm")) {
        const double ppm = j.at("resolution_ppm").get<double>();
        s.resolution = q == Quantity::CO ? co_ppm_to_mg_m3(ppm) : ppm;
    }
    return s;
}

NodeConfig node_from(const json& j) {
    NodeConfig n;
    n.descriptor.node_id = j.at("id").get<std::string>();
    const std::string where = "node " + n.descriptor.node_id;
    const auto kind_name = j.at("kind").get<std::string>();
    auto kind = parse_node_kind(kind_name);
    if (!kind) throw ConfigError(where + ": unknown kind '" + kind_name + "'");
    n.descriptor.kind = *kind;

    if (j.contains("sensors")) {
        for (const auto& code : j.at("sensors")) {
            n.descriptor.sensor_suite.push_back(quantity_from(code.get<std::string>()));
        }
    } else {
        n.descriptor.sensor_suite = default_suite(*kind);
    }
    if (j.contains("extra_sensors")) {
        for (const auto& code : j.at("extra_sensors")) {
            const Quantity q = quantity_from(code.get<std::string>());
            if (!n.descriptor.has_sensor(q)) n.descriptor.sensor_suite.push_back(q);
        }
    }
    if (j.contains("radios")) {
        for (const auto& rj : j.at("radios")) {
            const auto name = rj.get<std::string>();
            bool found = false;
            for (auto r : {Radio::ShortRangeFixed, Radio::ShortRangeMobile, Radio::WideArea}) {
                if (radio_name(r) == name) {
                    n.descriptor.radios.push_back(r);
                    found = true;
                }
            }
            if (!found) throw ConfigError(where + ": unknown radio '" + name + "'");
        }
    } else {
        n.descriptor.radios = default_radios(*kind);
    }
    if (j.contains("position")) n.descriptor.home_position = point_from(j.at("position"), where);
    n.path_tag = j.value("path", std::string{});
    n.route = j.value("route", std::string{});
    n.speed_mps = j.value("speed_mps", n.speed_mps);
    n.route_offset_s = j.value("route_offset_s", n.route_offset_s);
    if (j.contains("bias")) {
        for (const auto& [code, bj] : j.at("bias").items()) {
            n.bias[quantity_from(code)] = Bias{bj.value("add", 0.0), bj.value("mul", 1.0)};
        }
    }
    return n;
}

}  // namespace

const NodeConfig* ScenarioConfig::find_node(std::string_view id) const noexcept {
    for (const auto& n : nodes) {
        if (n.descriptor.node_id == id) return &n;
    }
    return nullptr;
}

SensorSpec ScenarioConfig::sensor_spec(Quantity q) const {
    auto it = sensors.find(q);
    return it != sensors.end() ? it->second : default_sensor_spec(q);
}

void validate_scenario(const ScenarioConfig& cfg) {
    if (cfg.duration_s < 0) throw ConfigError("duration_s must be >= 0");
    if (cfg.network.sample_period_s <= 0) throw ConfigError("sample_period_s must be > 0");
    if (cfg.network.uplink_period_s <= 0) throw ConfigError("uplink_period_s must be > 0");
    try {
        validate_link(cfg.network.short_range_fixed);
        validate_link(cfg.network.short_range_mobile);
        validate_link(cfg.network.wide_area);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("network: ") + e.what());
    }
    for (const auto& [q, s] : cfg.sensors) {
        if (s.warmup_s < 0 || !(s.t90_s > 0) || s.lod < 0 || s.resolution < 0) {
            throw ConfigError("sensor " + std::string(quantity_code(q)) + ": invalid spec");
        }
    }

    std::set<std::string> ids;
    int coordinators = 0;
    bool has_static_reporters = false;
    for (const auto& n : cfg.nodes) {
        const auto& d = n.descriptor;
        const std::string where = "node " + d.node_id;
        if (!ids.insert(d.node_id).second) throw ConfigError("duplicate node id " + d.node_id);
        if (d.node_id.find_first_of(",;/\\\n\r ") != std::string::npos) {
            throw ConfigError(where + ": id must not contain separators or spaces");
        }
        try {
            validate_descriptor(d);
        } catch (const ValidationError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (d.kind == NodeKind::Coordinator) ++coordinators;
        if (d.kind != NodeKind::Mobile && d.kind != NodeKind::Coordinator &&
            !d.sensor_suite.empty()) {
            has_static_reporters = true;
        }
        if (!n.path_tag.empty() && !cfg.paths.contains(n.path_tag)) {
            throw ConfigError(where + ": unresolved path '" + n.path_tag + "'");
        }
        if (d.kind == NodeKind::Mobile) {
            auto it = cfg.paths.find(n.route);
            if (n.route.empty() || it == cfg.paths.end()) {
                throw ConfigError(where + ": unresolved route '" + n.route + "'");
            }
            if (it->second.empty()) throw ConfigError(where + ": route '" + n.route + "' is empty");
            if (!(n.speed_mps > 0)) throw ConfigError(where + ": speed_mps must be > 0");
        }
        for (auto q : d.sensor_suite) {
            if (!cfg.field.has(q)) {
                throw ConfigError(where + ": field has no model for " +
                                  std::string(quantity_code(q)));
            }
        }
    }
    if (coordinators > 1) throw ConfigError("more than one coordinator");
    if (coordinators == 0 && has_static_reporters) {
        throw ConfigError("static nodes need a coordinator");
    }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    ScenarioConfig cfg;
    try {
        const json j = json::parse(json_text);
        cfg.name = j.value("name", std::string{"unnamed"});
        if (j.contains("start_time")) {
            const auto text = j.at("start_time").get<std::string>();
            auto t = parse_iso8601(text);
            if (!t) throw ConfigError("start_time: not ISO-8601 UTC: " + text);
            cfg.start_time = *t;
        }
        cfg.duration_s = j.value("duration_s", cfg.duration_s);
        cfg.seed = j.value("seed", cfg.seed);

        if (j.contains("network")) {
            const auto& nj = j.at("network");
            cfg.network.sample_period_s = nj.value("sample_period_s", cfg.network.sample_period_s);
            cfg.network.uplink_period_s = nj.value("uplink_period_s", cfg.network.uplink_period_s);
            if (nj.contains("short_range_fixed")) {
                cfg.network.short_range_fixed =
                    link_from(nj.at("short_range_fixed"), cfg.network.short_range_fixed);
            }
            if (nj.contains("short_range_mobile")) {
                cfg.network.short_range_mobile =
                    link_from(nj.at("short_range_mobile"), cfg.network.short_range_mobile);
            }
            if (nj.contains("wide_area")) {
                cfg.network.wide_area = link_from(nj.at("wide_area"), cfg.network.wide_area);
            }
        }
        if (j.contains("sensors")) {
            for (const auto& [code, sj] : j.at("sensors").items()) {
                const Quantity q = quantity_from(code);
                cfg.sensors[q] = sensor_from(q, sj);
            }
        }
        if (j.contains("paths")) {
            for (const auto& [name, pj] : j.at("paths").items()) {
                std::vector<GeoPoint> pts;
                for (const auto& v : pj) pts.push_back(point_from(v, "path " + name));
                cfg.paths.emplace(name, Path(std::move(pts)));
            }
        }
        std::map<Quantity, QuantityField> fields;
        if (j.contains("field")) {
            for (const auto& [code, fj] : j.at("field").at("quantities").items()) {
                fields[quantity_from(code)] = quantity_field_from(fj);
            }
        }
        cfg.field = FieldModel(cfg.seed, std::move(fields));
        if (j.contains("nodes")) {
            for (const auto& nj : j.at("nodes")) cfg.nodes.push_back(node_from(nj));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read scenario file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

}  // namespace urbanaq
