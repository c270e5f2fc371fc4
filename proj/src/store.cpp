#include "urbanaq/store.hpp"

#include <algorithm>
#include <fstream>

#include "urbanaq/timeutil.hpp"

namespace urbanaq {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_number(std::string_view s, const char* field) {
    auto v = parse_decimal(s);
    if (!v) throw ParseError(std::string("bad ") + field + " '" + std::string(s) + "'");
    return *v;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string flags_text(FlagSet flags) {
    std::string out;
    for (auto f : {MeasurementFlag::BelowLoD, MeasurementFlag::WarmingUp, MeasurementFlag::Quantized}) {
        if (!flags.has(f)) continue;
        if (!out.empty()) out += ';';
        out += flag_name(f);
    }
    return out;
}

}  // namespace

std::string serialize_measurement(const Measurement& m) {
    std::string line = format_iso8601(m.timestamp);
    line += ',';
    line += m.node_id;
    line += ',';
    line += format_decimal(m.position.lat);
    line += ',';
    line += format_decimal(m.position.lon);
    line += ',';
    line += quantity_code(m.quantity);
    line += ',';
    line += format_decimal(m.value);
    line += ',';
    line += quantity_unit(m.quantity);
    line += ',';
    line += flags_text(m.flags);
    return line;
}

Measurement parse_measurement(std::string_view line) {
    const auto fields = split(strip_cr(line), ',');
    if (fields.size() != 8) throw ParseError("expected 8 fields, got " + std::to_string(fields.size()));
    Measurement m;
    auto ts = parse_iso8601(fields[0]);
    if (!ts) throw ParseError("bad timestamp '" + std::string(fields[0]) + "'");
    m.timestamp = *ts;
    if (fields[1].empty()) throw ParseError("empty node_id");
    m.node_id = std::string(fields[1]);
    m.position.lat = parse_number(fields[2], "lat");
    m.position.lon = parse_number(fields[3], "lon");
    auto q = parse_quantity(fields[4]);
    if (!q) throw ParseError("unknown quantity '" + std::string(fields[4]) + "'");
    m.quantity = *q;
    m.value = parse_number(fields[5], "value");
    if (fields[6] != quantity_unit(*q)) {
        throw ParseError("unit '" + std::string(fields[6]) + "' does not match " +
                         std::string(fields[4]));
    }
    if (!fields[7].empty()) {
        for (auto name : split(fields[7], ';')) {
            auto f = parse_flag(name);
            if (!f) throw ParseError("unknown flag '" + std::string(name) + "'");
            m.flags.set(*f);
        }
    }
    return m;
}

std::string serialize_index(const IndexValue& v) {
    std::string line(index_kind_name(v.kind));
    line += ',';
    line += v.station_id;
    line += ',';
    line += format_iso8601(v.window_end);
    line += ',';
    if (v.value) line += format_decimal(*v.value);
    line += ',';
    line += color_name(v.color);
    return line;
}

IndexValue parse_index(std::string_view line) {
    const auto fields = split(strip_cr(line), ',');
    if (fields.size() != 5) throw ParseError("expected 5 fields");
    IndexValue v;
    bool kind_ok = false;
    for (auto k : {IndexKind::AqiO3, IndexKind::AqiPm, IndexKind::Tci, IndexKind::Ti}) {
        if (index_kind_name(k) == fields[0]) {
            v.kind = k;
            kind_ok = true;
        }
    }
    if (!kind_ok) throw ParseError("unknown index kind '" + std::string(fields[0]) + "'");
    v.station_id = std::string(fields[1]);
    auto ts = parse_iso8601(fields[2]);
    if (!ts) throw ParseError("bad window_end");
    v.window_end = *ts;
    if (!fields[3].empty()) v.value = parse_number(fields[3], "value");
    bool color_ok = false;
    for (auto c : {Color::Green, Color::Yellow, Color::Orange, Color::Red, Color::DarkRed,
                   Color::Blue, Color::DarkBlue, Color::Unknown}) {
        if (color_name(c) == fields[4]) {
            v.color = c;
            color_ok = true;
        }
    }
    if (!color_ok) throw ParseError("unknown color '" + std::string(fields[4]) + "'");
    return v;
}

std::string serialize_delivery(const DeliveryRecord& r) {
    std::string line = format_iso8601(r.timestamp);
    line += ',';
    line += r.node_id;
    line += ',';
    line += quantity_code(r.quantity);
    line += ',';
    line += outcome_name(r.outcome);
    line += ',';
    line += radio_name(r.link);
    line += ',';
    line += r.relay;
    line += ',';
    line += std::to_string(r.arrival_ms);
    return line;
}

bool QueryFilter::matches(const Measurement& m) const {
    if (m.timestamp < t0 || m.timestamp >= t1) return false;
    if (node_ids && !node_ids->contains(m.node_id)) return false;
    if (quantities && !quantities->contains(m.quantity)) return false;
    if (circle && haversine_distance(m.position, circle->center) > circle->radius_m) return false;
    return true;
}

bool record_order(const Measurement& a, const Measurement& b) noexcept {
    return std::tie(a.timestamp, a.node_id, a.quantity) < std::tie(b.timestamp, b.node_id, b.quantity);
}

Store::Store(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "measurements", ec);
    if (ec) throw StorageError("cannot create " + (root_ / "measurements").string() + ": " + ec.message());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root_ / "measurements")) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw StorageError("cannot read " + file.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            Measurement m;
            try {
                m = parse_measurement(line);
            } catch (const ParseError& e) {
                throw StorageError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
            if (keys_.emplace(m.node_id, m.timestamp, m.quantity).second) records_.push_back(std::move(m));
        }
    }
}

Store::~Store() {
    try {
        sync();
    } catch (...) {  // NOLINT(bugprone-empty-catch): destructor must not throw
    }
}

fs::path Store::day_file(const std::string& day) const { return root_ / "measurements" / (day + ".csv"); }

std::size_t Store::append(std::span<const Measurement> ms) {
    std::map<std::string, std::string> chunks;
    std::size_t written = 0;
    for (const auto& m : ms) {
        validate_measurement(m);
        if (!keys_.emplace(m.node_id, m.timestamp, m.quantity).second) continue;
        records_.push_back(m);
        const std::string day = format_day(m.timestamp);
        chunks[day] += serialize_measurement(m);
        chunks[day] += '\n';
        dirty_days_.insert(day);
        ++written;
    }
    for (const auto& [day, text] : chunks) {
        std::ofstream out(day_file(day), std::ios::app | std::ios::binary);
        out << text;
        out.flush();
        if (!out) throw StorageError("write failed: " + day_file(day).string());
    }
    return written;
}

std::vector<Measurement> Store::query(const QueryFilter& filter) const {
    std::vector<Measurement> out;
    if (filter.t0 >= filter.t1) return out;
    for (const auto& m : records_) {
        if (filter.matches(m)) out.push_back(m);
    }
    std::sort(out.begin(), out.end(), record_order);
    return out;
}

void Store::sync() {
    if (dirty_days_.empty()) return;
    std::map<std::string, std::vector<const Measurement*>> by_day;
    for (const auto& m : records_) {
        const std::string day = format_day(m.timestamp);
        if (dirty_days_.contains(day)) by_day[day].push_back(&m);
    }
    for (auto& [day, rows] : by_day) {
        std::sort(rows.begin(), rows.end(),
                  [](const Measurement* a, const Measurement* b) { return record_order(*a, *b); });
        const fs::path target = day_file(day);
        fs::path tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
            for (const auto* m : rows) out << serialize_measurement(*m) << '\n';
            out.flush();
            if (!out) throw StorageError("write failed: " + tmp.string());
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec) throw StorageError("rename failed: " + target.string() + ": " + ec.message());
    }
    dirty_days_.clear();
}

}  // namespace urbanaq
