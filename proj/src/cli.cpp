#include "urbanaq/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "urbanaq/analytics.hpp"
#include "urbanaq/indexes.hpp"
#include "urbanaq/netsim.hpp"
#include "urbanaq/scenario.hpp"
#include "urbanaq/store.hpp"
#include "urbanaq/timeutil.hpp"

namespace urbanaq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMetaFile = "nodes.json";

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    out << text;
    out.flush();
    if (!out) throw StorageError("cannot write " + file.string());
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot read " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
}

json scenario_meta(const ScenarioConfig& cfg) {
    json nodes = json::array();
    for (const auto& n : cfg.nodes) {
        json j;
        j["id"] = n.descriptor.node_id;
        j["kind"] = node_kind_name(n.descriptor.kind);
        if (!n.path_tag.empty()) j["path"] = n.path_tag;
        if (!n.route.empty()) j["route"] = n.route;
        if (n.descriptor.home_position) {
            j["position"] = {n.descriptor.home_position->lat, n.descriptor.home_position->lon};
        }
        json suite = json::array();
        for (auto q : n.descriptor.sensor_suite) suite.push_back(quantity_code(q));
        j["sensors"] = suite;
        nodes.push_back(j);
    }
    json meta;
    meta["scenario"] = cfg.name;
    meta["seed"] = cfg.seed;
    meta["start_time"] = format_iso8601(cfg.start_time);
    meta["duration_s"] = cfg.duration_s;
    meta["sample_period_s"] = cfg.network.sample_period_s;
    meta["uplink_period_s"] = cfg.network.uplink_period_s;
    meta["nodes"] = nodes;
    return meta;
}

struct NodeMeta {
    std::string id;
    NodeKind kind = NodeKind::Fixed;
    std::string path;
    std::optional<GeoPoint> position;
};

struct DataMeta {
    Timestamp start_time = 0;
    Timestamp uplink_period_s = 900;
    std::vector<NodeMeta> nodes;
};

DataMeta load_meta(const fs::path& data_dir) {
    DataMeta meta;
    const fs::path file = data_dir / kMetaFile;
    if (!fs::exists(file)) return meta;
    try {
        const json j = json::parse(read_text(file));
        if (j.contains("start_time")) {
            meta.start_time = parse_iso8601(j.at("start_time").get<std::string>()).value_or(0);
        }
        meta.uplink_period_s = j.value("uplink_period_s", meta.uplink_period_s);
        for (const auto& nj : j.at("nodes")) {
            NodeMeta n;
            n.id = nj.at("id").get<std::string>();
            n.kind = parse_node_kind(nj.at("kind").get<std::string>()).value_or(NodeKind::Fixed);
            n.path = nj.value("path", std::string{});
            if (nj.contains("position")) {
                n.position = GeoPoint{nj.at("position")[0].get<double>(), nj.at("position")[1].get<double>()};
            }
            meta.nodes.push_back(std::move(n));
        }
    } catch (const json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
    if (meta.uplink_period_s <= 0) throw DataError(file.string() + ": uplink_period_s must be > 0");
    return meta;
}

std::vector<Measurement> load_all(const fs::path& data_dir) {
    if (!fs::is_directory(data_dir / "measurements")) {
        throw DataError("no measurement store under " + data_dir.string());
    }
    Store store(data_dir);
    return store.query(QueryFilter{});
}

void remove_if_exists(const fs::path& p) {
    std::error_code ec;
    fs::remove_all(p, ec);
}

std::string three_sig(double v) { return format_decimal(round_significant(v, 3)); }

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const TrafficIndexError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const FieldError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const AnalyticsError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const StorageError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ValidationError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace

int simulate(const fs::path& scenario, const fs::path& out_dir, std::optional<std::uint64_t> seed,
             std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ScenarioConfig cfg = load_scenario(scenario);
        if (seed) cfg.set_seed(*seed);

        ensure_dir(out_dir);
        remove_if_exists(out_dir / "measurements");
        int code = kExitOk;
        {
            Store store(out_dir);
            RunOptions opts;
            std::string index_lines;
            opts.on_receipt = [&](const ServerReceipt& r) { store.append(r.measurements); };
            opts.on_indexes = [&](std::span<const IndexValue> values) {
                for (const auto& v : values) index_lines += serialize_index(v) + '\n';
            };
            const SimulationResult result = run(cfg, opts);
            store.sync();

            std::string log;
            for (const auto& d : result.deliveries) log += serialize_delivery(d) + '\n';
            write_text(out_dir / "delivery_log.csv", log);
            write_text(out_dir / "indexes.csv", index_lines);
            write_text(out_dir / kMetaFile, scenario_meta(cfg).dump(2) + '\n');

            struct Counts {
                std::size_t emitted = 0, coordinator = 0, server = 0, lost = 0;
            };
            std::map<std::string, Counts> per_node;
            for (const auto& d : result.deliveries) {
                Counts& c = per_node[d.node_id];
                ++c.emitted;
                switch (d.outcome) {
                    case DeliveryOutcome::DeliveredToCoordinator: ++c.coordinator; break;
                    case DeliveryOutcome::DeliveredToServer: ++c.server; break;
                    case DeliveryOutcome::Lost: ++c.lost; break;
                }
            }
            std::ostringstream summary;
            summary << "scenario " << cfg.name << " seed " << cfg.seed << " from "
                    << format_iso8601(cfg.start_time) << " for " << cfg.duration_s << " s\n";
            summary << std::left << std::setw(8) << "node" << std::right << std::setw(10) << "emitted"
                    << std::setw(13) << "via-coord" << std::setw(10) << "direct" << std::setw(8)
                    << "lost" << std::setw(11) << "loss-rate" << '\n';
            Counts total;
            for (const auto& [id, c] : per_node) {
                const double rate = c.emitted ? static_cast<double>(c.lost) / static_cast<double>(c.emitted) : 0.0;
                summary << std::left << std::setw(8) << id << std::right << std::setw(10) << c.emitted
                        << std::setw(13) << c.coordinator << std::setw(10) << c.server << std::setw(8)
                        << c.lost << std::setw(11) << std::fixed << std::setprecision(4) << rate
                        << '\n';
                total.emitted += c.emitted;
                total.lost += c.lost;
            }
            summary << "stored " << store.size() << " measurements, " << result.receipts.size()
                    << " server receipts, " << result.empty_uplinks << " empty uplinks, loss rate "
                    << std::fixed << std::setprecision(4)
                    << (total.emitted ? static_cast<double>(total.lost) / static_cast<double>(total.emitted) : 0.0)
                    << '\n';
            write_text(out_dir / "summary.txt", summary.str());
            out << summary.str();
        }
        return code;
    });
}

int indexes(const fs::path& data_dir, const fs::path& out_dir, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&] {
        const DataMeta meta = load_meta(data_dir);
        const std::vector<Measurement> all = load_all(data_dir);
        ensure_dir(out_dir);
        remove_if_exists(out_dir / "indexes");
        ensure_dir(out_dir / "indexes");
        if (all.empty()) {
            out << "no measurements\n";
            return kExitOk;
        }

        // Replay on the uplink grid: a tick at t sees everything stamped before t.
        const Timestamp period = meta.uplink_period_s;
        const Timestamp origin = meta.start_time != 0 ? meta.start_time : all.front().timestamp;
        auto grid_after = [&](Timestamp ts) {
            const Timestamp k = (ts - origin) / period + 1;
            return origin + k * period;
        };
        IndexEngine engine;
        std::map<std::string, std::string> per_station;
        std::map<std::pair<std::string, IndexKind>, IndexValue> latest;
        std::size_t i = 0;
        Timestamp tick = grid_after(all.front().timestamp);
        const Timestamp last_tick = grid_after(all.back().timestamp);
        for (; tick <= last_tick; tick += period) {
            while (i < all.size() && all[i].timestamp < tick) engine.ingest(all[i++]);
            for (const auto& v : engine.update(tick)) {
                per_station[v.station_id] += serialize_index(v) + '\n';
                latest[{v.station_id, v.kind}] = v;
            }
        }
        for (const auto& [station, text] : per_station) {
            write_text(out_dir / "indexes" / (station + ".csv"), text);
        }
        for (const auto& [key, v] : latest) {
            out << std::left << std::setw(8) << key.first << std::setw(8) << index_kind_name(key.second)
                << std::setw(10) << color_name(v.color);
            if (v.value) out << format_decimal(round_significant(*v.value, 4));
            out << " @ " << format_iso8601(v.window_end) << '\n';
        }
        return kExitOk;
    });
}

int compare(const fs::path& data_dir, CompareMode mode, const fs::path& out_dir, double radius_m,
            std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!(radius_m > 0.0)) throw ConfigError("--radius-m must be > 0");
        const DataMeta meta = load_meta(data_dir);
        if (meta.nodes.empty()) throw DataError("missing node metadata " + (data_dir / kMetaFile).string());
        const std::vector<Measurement> all = load_all(data_dir);

        std::map<std::string, const NodeMeta*> by_id;
        for (const auto& n : meta.nodes) by_id[n.id] = &n;
        auto kind_of = [&](const Measurement& m) -> const NodeMeta* {
            auto it = by_id.find(m.node_id);
            return it == by_id.end() ? nullptr : it->second;
        };

        std::vector<Measurement> a;
        std::vector<Measurement> b;
        CompareOptions opts;
        json extra;
        if (mode == CompareMode::Paths) {
            opts.label_a = "traffic";
            opts.label_b = "fitness";
            for (const auto& m : all) {
                const NodeMeta* n = kind_of(m);
                if (n == nullptr || n->kind != NodeKind::Fixed) continue;
                if (n->path == opts.label_a) a.push_back(m);
                if (n->path == opts.label_b) b.push_back(m);
            }
        } else {
            opts.label_a = "mobile";
            opts.label_b = "fixed";
            std::vector<Station> stations;
            for (const auto& n : meta.nodes) {
                if (n.kind == NodeKind::Fixed && n.position) stations.push_back({n.id, *n.position});
            }
            std::vector<Measurement> mobile;
            for (const auto& m : all) {
                const NodeMeta* n = kind_of(m);
                if (n != nullptr && n->kind == NodeKind::Mobile) mobile.push_back(m);
            }
            const Association assoc = associate_mobile_to_fixed(mobile, stations, radius_m);
            std::set<std::string> used;
            json counts = json::object();
            for (const auto& [station, idx] : assoc.by_station) {
                used.insert(station);
                counts[station] = idx.size();
                for (auto k : idx) a.push_back(mobile[k]);
            }
            std::sort(a.begin(), a.end(), record_order);
            for (const auto& m : all) {
                if (used.contains(m.node_id)) b.push_back(m);
            }
            extra["radius_m"] = radius_m;
            extra["associated"] = counts;
            extra["unassociated"] = assoc.unassociated.size();
        }
        if (a.empty() || b.empty()) {
            throw DataError("population '" + (a.empty() ? opts.label_a : opts.label_b) + "' is empty");
        }

        const ComparisonReport report = compare_populations(a, b, opts);

        ensure_dir(out_dir);
        remove_if_exists(out_dir / "pmf");
        ensure_dir(out_dir / "pmf");
        json rows = json::array();
        std::ostringstream table;
        table << std::left << std::setw(30) << "quantity" << std::right << std::setw(14)
              << ("M_" + report.label_a) << std::setw(14) << ("M_" + report.label_b) << std::setw(10)
              << "eta" << '\n';
        for (const auto& r : report.rows) {
            json row;
            row["quantity"] = quantity_code(r.quantity);
            row["unit"] = quantity_unit(r.quantity);
            row["mean_a"] = r.mean_a;
            row["mean_b"] = r.mean_b;
            row["eta"] = round_significant(r.eta, 3);
            row["n_a"] = r.n_a;
            row["n_b"] = r.n_b;
            row["below_lod_rate_a"] = r.below_lod_rate_a;
            row["below_lod_rate_b"] = r.below_lod_rate_b;
            rows.push_back(row);

            for (const auto& [label, pmf] : {std::pair{report.label_a, &r.pmf_a},
                                            std::pair{report.label_b, &r.pmf_b}}) {
                std::string text = "# bin_center probability\n";
                for (std::size_t k = 0; k < pmf->probabilities.size(); ++k) {
                    text += format_decimal(pmf->bin_center(k)) + ' ' +
                            format_decimal(pmf->probabilities[k]) + '\n';
                }
                write_text(out_dir / "pmf" / (std::string(quantity_code(r.quantity)) + "_" + label + ".dat"),
                           text);
            }
            table << std::left << std::setw(30) << quantity_label(r.quantity) << std::right
                  << std::setw(14) << format_decimal(round_significant(r.mean_a, 4)) << std::setw(14)
                  << format_decimal(round_significant(r.mean_b, 4)) << std::setw(10)
                  << three_sig(r.eta) << "  " << quantity_unit(r.quantity) << '\n';
        }
        json doc;
        doc["mode"] = mode == CompareMode::Paths ? "paths" : "mobile-fixed";
        doc["label_a"] = report.label_a;
        doc["label_b"] = report.label_b;
        doc["eta_definition"] = "|1 - mean_a / mean_b|";
        doc["rows"] = rows;
        json inc = json::array();
        for (auto q : report.incomparable) inc.push_back(quantity_code(q));
        doc["incomparable"] = inc;
        for (const auto& [k, v] : extra.items()) doc[k] = v;
        write_text(out_dir / "comparison.json", doc.dump(2) + '\n');
        write_text(out_dir / "comparison.txt", table.str());
        out << table.str();
        return kExitOk;
    });
}

int traffic(const fs::path& access_config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::ifstream in(access_config);
        if (!in) throw ConfigError("cannot read access config: " + access_config.string());
        TrafficAccessConfig cfg;
        std::string id;
        try {
            json j = json::parse(in);
            id = j.value("id", std::string{});
            cfg.base_congestion = j.value("base_congestion", cfg.base_congestion);
            for (const auto& [name, share] : j.at("composition").items()) {
                auto c = parse_vehicle_class(name);
                if (!c) throw ConfigError("unknown vehicle class '" + name + "'");
                cfg.composition[*c] = share.get<double>();
            }
            const auto slope = j.value("slope", std::string{"flat"});
            auto s = parse_slope(slope);
            if (!s) throw ConfigError("unknown slope '" + slope + "'");
            cfg.slope = *s;
            cfg.steepness_pct = j.value("steepness_pct", 0.0);
            const auto loc = j.value("localization", std::string{"residential"});
            auto l = parse_localization(loc);
            if (!l) throw ConfigError("unknown localization '" + loc + "'");
            cfg.localization = *l;
            if (j.contains("maneuvers")) {
                for (const auto& [name, share] : j.at("maneuvers").items()) {
                    auto m = parse_maneuver(name);
                    if (!m) throw ConfigError("unknown maneuver '" + name + "'");
                    cfg.maneuvers[*m] = share.get<double>();
                }
            } else {
                cfg.maneuvers[Maneuver::Straight] = 1.0;
            }
            if (j.contains("maneuver_weight")) {
                for (const auto& [name, g] : j.at("maneuver_weight").items()) {
                    auto m = parse_maneuver(name);
                    if (!m) throw ConfigError("unknown maneuver '" + name + "'");
                    cfg.maneuver_weight[*m] = g.get<double>();
                }
            }
        } catch (const json::exception& e) {
            throw ConfigError(access_config.string() + ": " + e.what());
        }
        const TrafficBreakdown b = traffic_breakdown(cfg);
        auto fmt = [](double v) { return format_decimal(round_significant(v, 8)); };
        if (!id.empty()) out << "access " << id << '\n';
        out << "s_b " << fmt(cfg.base_congestion) << '\n'
            << "K1  " << fmt(b.k1) << '\n'
            << "K2  " << fmt(b.k2) << '\n'
            << "K3  " << fmt(b.k3) << '\n'
            << "K4  " << fmt(b.k4) << '\n'
            << "TI  " << fmt(b.ti) << " EV/s\n";
        return kExitOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Urban air-quality sensor network simulator and analytics"};
    app.require_subcommand(1, 1);

    std::string scenario_path, out_dir, data_dir, mode = "paths", config_path;
    std::optional<std::uint64_t> seed;
    double radius_m = kDefaultAssociationRadiusM;

    auto* sim = app.add_subcommand("simulate", "Run a scenario and store its measurements");
    sim->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_option("--seed", seed, "Override the scenario seed");

    auto* idx = app.add_subcommand("indexes", "Replay stored data through the index pipeline");
    idx->add_option("--data", data_dir, "Directory written by simulate")->required();
    idx->add_option("--out", out_dir, "Output directory")->required();

    auto* cmp = app.add_subcommand("compare", "Compare two measurement populations");
    cmp->add_option("--data", data_dir, "Directory written by simulate")->required();
    cmp->add_option("--mode", mode, "paths | mobile-fixed")
        ->check(CLI::IsMember({"paths", "mobile-fixed"}));
    cmp->add_option("--out", out_dir, "Output directory")->required();
    cmp->add_option("--radius-m", radius_m, "Association radius in meters");

    auto* trf = app.add_subcommand("traffic", "Evaluate the traffic index of one access");
    trf->add_option("--config,config", config_path, "Access config JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (sim->parsed()) return simulate(scenario_path, out_dir, seed, out, err);
    if (idx->parsed()) return indexes(data_dir, out_dir, out, err);
    if (cmp->parsed()) {
        return compare(data_dir, mode == "paths" ? CompareMode::Paths : CompareMode::MobileFixed,
                       out_dir, radius_m, out, err);
    }
    return traffic(config_path, out, err);
}

}  // namespace urbanaq::cli
