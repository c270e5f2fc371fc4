#include "urbanaq/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace urbanaq {

void validate_link(const LinkModel& link) {
    if (!(link.loss_prob >= 0.0 && link.loss_prob <= 1.0)) {
        throw ValidationError("loss_prob", "outside [0, 1]");
    }
    if (!(link.range_m > 0.0)) throw ValidationError("range_m", "must be > 0");
    if (!(link.latency_s >= 0.0) || !std::isfinite(link.latency_s)) {
        throw ValidationError("latency_s", "must be finite and >= 0");
    }
}

std::string_view outcome_name(DeliveryOutcome o) noexcept {
    switch (o) {
        case DeliveryOutcome::DeliveredToCoordinator: return "coordinator";
        case DeliveryOutcome::DeliveredToServer: return "server";
        case DeliveryOutcome::Lost: return "lost";
    }
    return "?";
}

double unit_uniform(std::mt19937_64& rng) noexcept {
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

void EventQueue::push(SimTimeMs time, EventPayload payload) {
    heap_.push(Event{time, next_sequence_++, std::move(payload)});
}

Event EventQueue::pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
}

namespace {

bool survives(const LinkModel& link, std::mt19937_64& rng) {
    return !(unit_uniform(rng) < link.loss_prob);
}

SimTimeMs to_ms(double seconds) { return static_cast<SimTimeMs>(std::llround(seconds * 1000.0)); }

}  // namespace

RouteDecision route_measurement(const Measurement& m, NodeKind kind, const Topology& topo,
                                std::mt19937_64& rng) {
    const NetworkParams& net = topo.params;
    RouteDecision d;
    if (kind == NodeKind::Coordinator) {
        d.outcome = DeliveryOutcome::DeliveredToCoordinator;
        d.relay = topo.coordinator_id;
        return d;
    }
    if (kind != NodeKind::Mobile) {
        d.link = Radio::ShortRangeFixed;
        d.relay = topo.coordinator_id;
        d.latency_s = net.short_range_fixed.latency_s;
        d.outcome = survives(net.short_range_fixed, rng) ? DeliveryOutcome::DeliveredToCoordinator
                                                         : DeliveryOutcome::Lost;
        return d;
    }

    // Mobile: nearest static node within short-range reach, lowest id on ties.
    const StaticNode* relay = nullptr;
    double best = net.short_range_mobile.range_m;
    if (!topo.coordinator_id.empty()) {
        for (const auto& s : topo.static_nodes) {
            const double dist = haversine_distance(m.position, s.position);
            if (dist > net.short_range_mobile.range_m) continue;
            if (relay == nullptr || dist < best || (dist == best && s.node_id < relay->node_id)) {
                relay = &s;
                best = dist;
            }
        }
    }
    if (relay == nullptr) {
        d.link = Radio::WideArea;
        d.latency_s = net.wide_area.latency_s;
        d.outcome = survives(net.wide_area, rng) ? DeliveryOutcome::DeliveredToServer
                                                 : DeliveryOutcome::Lost;
        return d;
    }
    d.link = Radio::ShortRangeMobile;
    d.relay = relay->node_id;
    d.latency_s = net.short_range_mobile.latency_s;
    bool ok = survives(net.short_range_mobile, rng);
    if (relay->node_id != topo.coordinator_id) {
        // Second hop through the fixed network.
        d.latency_s += net.short_range_fixed.latency_s;
        ok = survives(net.short_range_fixed, rng) && ok;
    }
    d.outcome = ok ? DeliveryOutcome::DeliveredToCoordinator : DeliveryOutcome::Lost;
    return d;
}

std::optional<ReportBatch> coordinator_uplink(const std::string& coordinator_id,
                                              Timestamp uplink_time,
                                              std::vector<Measurement>& buffer) {
    auto split = std::stable_partition(buffer.begin(), buffer.end(), [&](const Measurement& m) {
        return m.timestamp >= uplink_time;
    });
    if (split == buffer.end()) return std::nullopt;
    ReportBatch batch;
    batch.coordinator_id = coordinator_id;
    batch.uplink_time = uplink_time;
    batch.measurements.assign(std::make_move_iterator(split), std::make_move_iterator(buffer.end()));
    buffer.erase(split, buffer.end());
    std::sort(batch.measurements.begin(), batch.measurements.end(),
              [](const Measurement& a, const Measurement& b) {
                  return std::tie(a.timestamp, a.node_id, a.quantity) <
                         std::tie(b.timestamp, b.node_id, b.quantity);
              });
    return batch;
}

std::optional<ReportBatch> Coordinator::uplink(Timestamp uplink_time) {
    return coordinator_uplink(id_, uplink_time, buffer_);
}

std::size_t SimulationResult::count(DeliveryOutcome o) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        deliveries.begin(), deliveries.end(), [o](const DeliveryRecord& r) { return r.outcome == o; }));
}

std::vector<Measurement> SimulationResult::server_measurements() const {
    std::vector<Measurement> out;
    for (const auto& r : receipts) out.insert(out.end(), r.measurements.begin(), r.measurements.end());
    return out;
}

namespace {

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts),
          engine_(opts.thermal_model) {
        topo_.params = cfg.network;
        for (const auto& n : cfg.nodes) {
            const auto& d = n.descriptor;
            if (d.kind == NodeKind::Coordinator) {
                topo_.coordinator_id = d.node_id;
                coordinator_.emplace(d.node_id);
            }
            if (d.kind != NodeKind::Mobile && d.home_position) {
                topo_.static_nodes.push_back({d.node_id, *d.home_position});
            }
        }
        for (const auto& n : cfg.nodes) {
            const auto& d = n.descriptor;
            if (d.sensor_suite.empty()) continue;
            std::map<Quantity, SensorSpec> specs;
            for (auto q : d.sensor_suite) specs.emplace(q, cfg.sensor_spec(q));
            std::optional<Trajectory> traj;
            if (d.kind == NodeKind::Mobile) {
                traj = Trajectory{&cfg.paths.at(n.route), n.speed_mps, n.route_offset_s};
            }
            nodes_.emplace_back(d, cfg.start_time, std::move(specs), traj, n.bias, cfg.field);
            link_rng_.emplace_back(mix_seed(mix_seed(cfg.seed, stable_hash("links")),
                                            stable_hash(d.node_id)));
        }
    }

    SimulationResult run() {
        if (cfg_.duration_s <= 0) return std::move(result_);
        const SimTimeMs period_ms = cfg_.network.sample_period_s * 1000;
        for (std::size_t i = 0; i < nodes_.size(); ++i) queue_.push(0, SampleTick{i});
        if (coordinator_) queue_.push(cfg_.network.uplink_period_s * 1000, UplinkTick{});

        SimTimeMs now = 0;
        while (!queue_.empty()) {
            Event ev = queue_.pop();
            now = ev.time;
            std::visit(
                [&](auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, SampleTick>) {
                        on_sample(p, now);
                        if (now + period_ms < cfg_.duration_s * 1000) queue_.push(now + period_ms, p);
                    } else if constexpr (std::is_same_v<T, UplinkTick>) {
                        on_uplink(now);
                        const SimTimeMs next = now + cfg_.network.uplink_period_s * 1000;
                        if (now < cfg_.duration_s * 1000) queue_.push(next, UplinkTick{});
                    } else if constexpr (std::is_same_v<T, Delivery>) {
                        on_delivery(p, now);
                    } else {
                        on_batch_arrival(p, now);
                    }
                },
                ev.payload);
        }
        // Late arrivals after the last scheduled uplink.
        if (coordinator_ && coordinator_->buffered() > 0) {
            on_uplink(now + 1000 - (now % 1000));
            while (!queue_.empty()) {
                Event ev = queue_.pop();
                on_batch_arrival(std::get<BatchArrival>(ev.payload), ev.time);
            }
        }
        return std::move(result_);
    }

private:
    Timestamp absolute(SimTimeMs ms) const {
        return cfg_.start_time + ms / 1000;
    }

    void on_sample(const SampleTick& tick, SimTimeMs now) {
        SensorNode& node = nodes_[tick.node];
        const NodeKind kind = node.descriptor().kind;
        for (auto& m : node.sample(cfg_.field, absolute(now))) {
            validate_measurement(m);
            const RouteDecision d = route_measurement(m, kind, topo_, link_rng_[tick.node]);
            const std::size_t idx = result_.emitted.size();
            DeliveryRecord rec{idx,      m.node_id, m.timestamp, m.quantity, d.outcome,
                               d.link,   d.relay,   now + to_ms(d.latency_s)};
            result_.emitted.push_back(std::move(m));
            if (d.outcome != DeliveryOutcome::Lost) {
                queue_.push(rec.arrival_ms, Delivery{idx, d.outcome});
            }
            result_.deliveries.push_back(std::move(rec));
        }
    }

    void on_delivery(const Delivery& del, SimTimeMs now) {
        const Measurement& m = result_.emitted[del.emitted_index];
        if (del.outcome == DeliveryOutcome::DeliveredToCoordinator) {
            coordinator_->receive(m);
            return;
        }
        ServerReceipt r;
        r.source = ReceiptSource::Direct;
        r.arrival_ms = now;
        r.arrival_time = absolute(now);
        r.measurements.push_back(m);
        ingest(std::move(r), std::nullopt);
    }

    void on_uplink(SimTimeMs now) {
        auto batch = coordinator_->uplink(absolute(now));
        if (!batch) {
            ++result_.empty_uplinks;
            return;
        }
        pending_.push_back(std::move(*batch));
        queue_.push(now + to_ms(cfg_.network.wide_area.latency_s), BatchArrival{pending_.size() - 1});
    }

    void on_batch_arrival(const BatchArrival& arrival, SimTimeMs now) {
        ReportBatch& batch = pending_[arrival.pending];
        ServerReceipt r;
        r.source = ReceiptSource::CoordinatorBatch;
        r.arrival_ms = now;
        r.arrival_time = absolute(now);
        r.coordinator_id = batch.coordinator_id;
        r.measurements = std::move(batch.measurements);
        ingest(std::move(r), batch.uplink_time);
    }

    /// Stores the receipt and, for coordinator batches, refreshes the indexes
    /// with windows ending at the batch's uplink time.
    void ingest(ServerReceipt r, std::optional<Timestamp> index_time) {
        if (opts_.on_receipt) opts_.on_receipt(r);
        if (opts_.compute_indexes) {
            engine_.ingest(r.measurements);
            if (index_time) {
                auto values = engine_.update(*index_time);
                if (opts_.on_indexes) opts_.on_indexes(values);
                result_.indexes.insert(result_.indexes.end(), values.begin(), values.end());
            }
        }
        result_.receipts.push_back(std::move(r));
    }

    const ScenarioConfig& cfg_;
    const RunOptions& opts_;
    Topology topo_;
    std::optional<Coordinator> coordinator_;
    std::vector<SensorNode> nodes_;
    std::vector<std::mt19937_64> link_rng_;
    EventQueue queue_;
    std::vector<ReportBatch> pending_;
    IndexEngine engine_;
    SimulationResult result_;
};

}  // namespace

SimulationResult run(const ScenarioConfig& scenario, const RunOptions& options) {
    validate_scenario(scenario);
    Simulation sim(scenario, options);
    return sim.run();
}

}  // namespace urbanaq
