#pragma once

// Append-only, day-partitioned text storage for measurements, plus the
// line formats for delivery logs and index records. Formats are described in
// docs/formats.md.

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "urbanaq/domain.hpp"
#include "urbanaq/indexes.hpp"
#include "urbanaq/netsim.hpp"

namespace urbanaq {

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// timestamp,node_id,lat,lon,quantity,value,unit,flags
std::string serialize_measurement(const Measurement& m);
/// Throws ParseError with the reason on malformed input.
Measurement parse_measurement(std::string_view line);

/// kind,station_id,window_end,value,color
std::string serialize_index(const IndexValue& v);
IndexValue parse_index(std::string_view line);

/// emitted_at,node_id,quantity,outcome,link,relay,arrival_ms
std::string serialize_delivery(const DeliveryRecord& r);

struct GeoCircle {
    GeoPoint center;
    double radius_m = 0.0;
};

struct QueryFilter {
    Timestamp t0 = std::numeric_limits<Timestamp>::min();
    Timestamp t1 = std::numeric_limits<Timestamp>::max();  ///< exclusive
    std::optional<std::set<std::string>> node_ids;
    std::optional<std::set<Quantity>> quantities;
    std::optional<GeoCircle> circle;

    [[nodiscard]] bool matches(const Measurement& m) const;
};

/// Orders by (timestamp, node_id, quantity).
bool record_order(const Measurement& a, const Measurement& b) noexcept;

/// Day-partitioned measurement files under `<root>/measurements/`.
/// Appends go straight to disk; sync() (also run by the destructor) rewrites
/// any day file that received out-of-order lines so every file is time-sorted.
class Store {
public:
    /// Creates the directory if needed and loads every existing day file.
    explicit Store(std::filesystem::path root);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Returns how many were new; (node_id, timestamp, quantity) duplicates are skipped.
    std::size_t append(std::span<const Measurement> ms);
    std::size_t append(const ReportBatch& batch) { return append(batch.measurements); }
    std::size_t append(const Measurement& m) { return append(std::span<const Measurement>(&m, 1)); }

    /// Matching records in record_order.
    [[nodiscard]] std::vector<Measurement> query(const QueryFilter& filter) const;
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }

    void sync();

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

private:
    using Key = std::tuple<std::string, Timestamp, Quantity>;

    std::filesystem::path day_file(const std::string& day) const;

    std::filesystem::path root_;
    std::vector<Measurement> records_;
    std::set<Key> keys_;
    std::set<std::string> dirty_days_;
};

}  // namespace urbanaq
