#pragma once

// Discrete-event simulation of the reporting pipeline: nodes sample every T_N,
// deliver over short-range links (mobile nodes fall back to the wide-area
// uplink), the coordinator batches every T_I and the server ingests.

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "urbanaq/domain.hpp"
#include "urbanaq/indexes.hpp"
#include "urbanaq/link.hpp"
#include "urbanaq/scenario.hpp"

namespace urbanaq {

/// Simulation clock in milliseconds since scenario start.
using SimTimeMs = std::int64_t;

enum class DeliveryOutcome : std::uint8_t { DeliveredToCoordinator, DeliveredToServer, Lost };
std::string_view outcome_name(DeliveryOutcome o) noexcept;

/// Uniform draw in [0, 1) from the top 53 bits; independent of the standard
/// library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) noexcept;

// ---- Event queue -----------------------------------------------------------

struct SampleTick {
    std::size_t node = 0;
};
struct UplinkTick {};
struct Delivery {
    std::size_t emitted_index = 0;  ///< into SimulationResult::emitted
    DeliveryOutcome outcome = DeliveryOutcome::DeliveredToCoordinator;
};
struct BatchArrival {
    std::size_t pending = 0;  ///< index of the in-flight coordinator batch
};
using EventPayload = std::variant<SampleTick, UplinkTick, Delivery, BatchArrival>;

struct Event {
    SimTimeMs time = 0;
    std::uint64_t sequence = 0;
    EventPayload payload;
};

/// Min-queue on (time, insertion sequence).
class EventQueue {
public:
    void push(SimTimeMs time, EventPayload payload);
    Event pop();
    [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
};

// ---- Routing ---------------------------------------------------------------

/// A static node a mobile node can hand its readings to.
struct StaticNode {
    std::string node_id;
    GeoPoint position;
};

struct Topology {
    std::string coordinator_id;
    std::vector<StaticNode> static_nodes;  ///< fixed, weather and coordinator nodes
    NetworkParams params;
};

struct RouteDecision {
    DeliveryOutcome outcome = DeliveryOutcome::Lost;
    Radio link = Radio::ShortRangeFixed;
    std::string relay;       ///< static node that received a mobile reading
    double latency_s = 0.0;
};

/// Fixed and weather nodes use the short-range link to the coordinator (star).
/// Mobile nodes use the short-range mobile link when a static node is within
/// range, else the wide-area link straight to the server. Loss is Bernoulli.
RouteDecision route_measurement(const Measurement& m, NodeKind kind, const Topology& topo,
                                std::mt19937_64& rng);

// ---- Coordinator -----------------------------------------------------------

class Coordinator {
public:
    explicit Coordinator(std::string id) : id_(std::move(id)) {}

    void receive(Measurement m) { buffer_.push_back(std::move(m)); }

    /// Batches every buffered measurement stamped before `uplink_time`
    /// (the window [t - T_I, t) plus any late arrivals from earlier windows),
    /// ordered by (timestamp, node_id, quantity). Returns nullopt when nothing
    /// qualifies (an empty batch is not an error).
    std::optional<ReportBatch> uplink(Timestamp uplink_time);

    [[nodiscard]] std::size_t buffered() const noexcept { return buffer_.size(); }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
    std::vector<Measurement> buffer_;
};

/// Free-function form; clears batched items from `buffer`.
std::optional<ReportBatch> coordinator_uplink(const std::string& coordinator_id,
                                              Timestamp uplink_time,
                                              std::vector<Measurement>& buffer);

// ---- Simulation ------------------------------------------------------------

struct DeliveryRecord {
    std::size_t emitted_index = 0;
    std::string node_id;
    Timestamp timestamp = 0;
    Quantity quantity = Quantity::Temperature;
    DeliveryOutcome outcome = DeliveryOutcome::Lost;
    Radio link = Radio::ShortRangeFixed;
    std::string relay;
    SimTimeMs arrival_ms = 0;  ///< time the hop completed (or would have)
};

enum class ReceiptSource : std::uint8_t { CoordinatorBatch, Direct };

/// One ingestion at the server: either a coordinator batch or one direct reading.
struct ServerReceipt {
    ReceiptSource source = ReceiptSource::CoordinatorBatch;
    SimTimeMs arrival_ms = 0;
    Timestamp arrival_time = 0;  ///< absolute UTC, floor of arrival
    std::string coordinator_id;
    std::vector<Measurement> measurements;
};

struct RunOptions {
    bool compute_indexes = true;
    std::shared_ptr<const ThermalModel> thermal_model = std::make_shared<IdentityThermalModel>();
    std::function<void(const ServerReceipt&)> on_receipt;
    std::function<void(std::span<const IndexValue>)> on_indexes;
};

struct SimulationResult {
    std::vector<Measurement> emitted;      ///< sampling order
    std::vector<DeliveryRecord> deliveries;
    std::vector<ServerReceipt> receipts;   ///< server ingestion order
    std::vector<IndexValue> indexes;
    std::size_t empty_uplinks = 0;

    [[nodiscard]] std::size_t count(DeliveryOutcome o) const noexcept;
    /// Measurements that reached the server, in ingestion order.
    [[nodiscard]] std::vector<Measurement> server_measurements() const;
};

/// Runs the scenario to completion. Throws ConfigError on an invalid scenario.
SimulationResult run(const ScenarioConfig& scenario, const RunOptions& options = {});

}  // namespace urbanaq
