#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "urbanaq/netsim.hpp"

using namespace urbanaq;

namespace {

Measurement at(std::string node, Timestamp t, GeoPoint p, Quantity q = Quantity::O3) {
    Measurement m;
    m.node_id = std::move(node);
    m.timestamp = t;
    m.position = p;
    m.quantity = q;
    m.value = 1.0;
    return m;
}

Topology two_statics() {
    Topology topo;
    topo.coordinator_id = "C0";
    topo.static_nodes = {{"C0", {43.716, 10.400}}, {"F1", {43.716, 10.405}}};
    return topo;
}

std::size_t gas_pairs(const std::vector<Measurement>& ms) {
    std::set<std::pair<std::string, Timestamp>> pairs;
    for (const auto& m : ms) {
        if (is_ndir_gas(m.quantity) || m.quantity == Quantity::O3) pairs.emplace(m.node_id, m.timestamp);
    }
    return pairs.size();
}

}  // namespace

TEST(EventQueue, OrdersByTimeThenInsertion) {
    EventQueue q;
    q.push(10, UplinkTick{});
    q.push(5, SampleTick{1});
    q.push(5, SampleTick{2});
    EXPECT_EQ(std::get<SampleTick>(q.pop().payload).node, 1U);
    EXPECT_EQ(std::get<SampleTick>(q.pop().payload).node, 2U);
    EXPECT_EQ(q.pop().time, 10);
    EXPECT_TRUE(q.empty());
}

TEST(UnitUniform, InHalfOpenUnitInterval) {
    std::mt19937_64 rng(1);
    double sum = 0.0;
    for (int i = 0; i < 100'000; ++i) {
        const double u = unit_uniform(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100'000, 0.5, 0.01);
}

TEST(Route, FixedNodeGoesToCoordinator) {
    std::mt19937_64 rng(1);
    const auto d = route_measurement(at("F1", 0, {43.716, 10.405}), NodeKind::Fixed, two_statics(), rng);
    EXPECT_EQ(d.outcome, DeliveryOutcome::DeliveredToCoordinator);
    EXPECT_EQ(d.link, Radio::ShortRangeFixed);
    EXPECT_EQ(d.relay, "C0");
}

TEST(Route, MobileNearCoordinatorUsesShortRange) {
    std::mt19937_64 rng(1);
    const auto d =
        route_measurement(at("M1", 0, {43.716, 10.4005}), NodeKind::Mobile, two_statics(), rng);
    EXPECT_EQ(d.outcome, DeliveryOutcome::DeliveredToCoordinator);
    EXPECT_EQ(d.link, Radio::ShortRangeMobile);
    EXPECT_EQ(d.relay, "C0");
    EXPECT_DOUBLE_EQ(d.latency_s, 0.2);
}

TEST(Route, MobileNearFixedRelaysTwoHops) {
    std::mt19937_64 rng(1);
    const auto d =
        route_measurement(at("M1", 0, {43.716, 10.4051}), NodeKind::Mobile, two_statics(), rng);
    EXPECT_EQ(d.relay, "F1");
    EXPECT_DOUBLE_EQ(d.latency_s, 0.7);
}

TEST(Route, MobileOutOfRangeFallsBackToWideArea) {
    std::mt19937_64 rng(1);
    const auto d = route_measurement(at("M1", 0, {43.730, 10.43}), NodeKind::Mobile, two_statics(), rng);
    EXPECT_EQ(d.outcome, DeliveryOutcome::DeliveredToServer);
    EXPECT_EQ(d.link, Radio::WideArea);
    EXPECT_TRUE(d.relay.empty());
}

TEST(Route, CertainLoss) {
    Topology topo = two_statics();
    topo.params.short_range_fixed.loss_prob = 1.0;
    std::mt19937_64 rng(1);
    EXPECT_EQ(route_measurement(at("F1", 0, {43.716, 10.405}), NodeKind::Fixed, topo, rng).outcome,
              DeliveryOutcome::Lost);
}

TEST(CoordinatorUplink, EmptyBufferGivesNoBatch) {
    Coordinator c("C0");
    EXPECT_FALSE(c.uplink(900).has_value());
}

TEST(CoordinatorUplink, BatchesOnlyEarlierReadingsInCanonicalOrder) {
    Coordinator c("C0");
    c.receive(at("F2", 600, {43.7, 10.4}));
    c.receive(at("F1", 600, {43.7, 10.4}, Quantity::CO2));
    c.receive(at("F1", 600, {43.7, 10.4}, Quantity::Temperature));
    c.receive(at("F1", 900, {43.7, 10.4}));
    const auto b = c.uplink(900);
    ASSERT_TRUE(b.has_value());
    ASSERT_EQ(b->measurements.size(), 3U);
    EXPECT_EQ(b->measurements[0].node_id, "F1");
    EXPECT_EQ(b->measurements[0].quantity, Quantity::Temperature);
    EXPECT_EQ(b->measurements[2].node_id, "F2");
    EXPECT_EQ(b->uplink_time, 900);
    EXPECT_EQ(c.buffered(), 1U);
}

TEST(Run, TwentySevenGasReportsPerWindow) {
    const auto scenario = fixture::star(9, 3600);
    const auto res = run(scenario, {.compute_indexes = false});
    std::size_t batches = 0;
    for (const auto& r : res.receipts) {
        ASSERT_EQ(r.source, ReceiptSource::CoordinatorBatch);
        EXPECT_EQ(gas_pairs(r.measurements), 27U);
        ++batches;
    }
    EXPECT_EQ(batches, 4U);
}

TEST(Run, HourlyCountPerGasQuantity) {
    const auto res = run(fixture::star(9, 3600), {.compute_indexes = false});
    std::map<Quantity, std::size_t> per;
    for (const auto& m : res.server_measurements()) ++per[m.quantity];
    for (auto q : {Quantity::HC, Quantity::CO2, Quantity::CO, Quantity::O3}) EXPECT_EQ(per[q], 108U);
}

TEST(Run, FixedNodeCardinality) {
    const auto res = run(fixture::star(3, 7200), {.compute_indexes = false});
    std::map<std::pair<std::string, Quantity>, std::size_t> per;
    std::size_t flagged = 0;
    for (const auto& m : res.emitted) {
        ++per[{m.node_id, m.quantity}];
        flagged += m.flags.has(MeasurementFlag::WarmingUp) ? 1 : 0;
    }
    EXPECT_EQ(per.size(), 3 * default_suite(NodeKind::Fixed).size());
    for (const auto& [k, n] : per) EXPECT_EQ(n, 7200U / 300U) << k.first;
    // First three samples of each NDIR gas arrive flagged, not dropped.
    EXPECT_EQ(flagged, 3U * 3U * 3U);
}

TEST(Run, ZeroDurationEmitsNothing) {
    const auto res = run(fixture::star(3, 0));
    EXPECT_TRUE(res.emitted.empty());
    EXPECT_TRUE(res.receipts.empty());
}

TEST(Run, RejectsInvalidScenario) {
    auto s = fixture::star(2, 900);
    s.nodes.push_back(s.nodes[1]);
    EXPECT_THROW(run(s), ConfigError);
}

TEST(Run, DeterministicForFixedSeed) {
    auto s = fixture::star(3, 7200, true);
    s.network.short_range_fixed.loss_prob = 0.2;
    s.network.wide_area.loss_prob = 0.1;
    s.field.quantities()[Quantity::O3].noise_sigma = 3.0;
    const auto a = run(s);
    const auto b = run(s);
    ASSERT_EQ(a.emitted.size(), b.emitted.size());
    EXPECT_EQ(a.emitted, b.emitted);
    EXPECT_EQ(a.server_measurements(), b.server_measurements());
    EXPECT_EQ(a.indexes, b.indexes);
    s.set_seed(99);
    const auto c = run(s);
    EXPECT_NE(a.server_measurements(), c.server_measurements());
}

class Conservation : public ::testing::TestWithParam<double> {};

TEST_P(Conservation, DeliveredPlusLostEqualsEmitted) {
    auto s = fixture::star(4, 6 * 3600, true);
    s.network.short_range_fixed.loss_prob = GetParam();
    s.network.short_range_mobile.loss_prob = GetParam();
    s.network.wide_area.loss_prob = GetParam() / 2;
    const auto res = run(s, {.compute_indexes = false});
    const std::size_t delivered = res.server_measurements().size();
    EXPECT_EQ(delivered + res.count(DeliveryOutcome::Lost), res.emitted.size());
    using Key = std::pair<std::string, Quantity>;
    std::map<Key, std::size_t> emitted, arrived, lost;
    for (const auto& m : res.emitted) ++emitted[{m.node_id, m.quantity}];
    for (const auto& m : res.server_measurements()) ++arrived[{m.node_id, m.quantity}];
    for (const auto& d : res.deliveries) {
        if (d.outcome == DeliveryOutcome::Lost) ++lost[{d.node_id, d.quantity}];
    }
    for (const auto& [k, n] : emitted) EXPECT_EQ(arrived[k] + lost[k], n) << k.first;
    EXPECT_EQ(res.deliveries.size(), res.emitted.size());
    if (GetParam() == 0.0) EXPECT_EQ(res.count(DeliveryOutcome::Lost), 0U);
    if (GetParam() == 1.0) EXPECT_EQ(res.count(DeliveryOutcome::DeliveredToCoordinator), 0U);
}

INSTANTIATE_TEST_SUITE_P(LossRates, Conservation, ::testing::Values(0.0, 0.05, 0.3, 1.0));

TEST(Run, CausalityAndUniqueIngestion) {
    auto s = fixture::star(4, 4 * 3600, true);
    s.network.short_range_fixed.loss_prob = 0.1;
    const auto res = run(s, {.compute_indexes = false});
    for (const auto& d : res.deliveries) {
        EXPECT_GE(d.arrival_ms, (d.timestamp - s.start_time) * 1000);
    }
    std::set<std::tuple<std::string, Timestamp, Quantity>> seen;
    SimTimeMs last = 0;
    for (const auto& r : res.receipts) {
        EXPECT_GE(r.arrival_ms, last);
        last = r.arrival_ms;
        for (const auto& m : r.measurements) {
            EXPECT_LE(m.timestamp, r.arrival_time);
            EXPECT_TRUE(seen.emplace(m.node_id, m.timestamp, m.quantity).second);
        }
    }
}

TEST(Run, MobileOffRangeReadingsGoDirect) {
    const auto res = run(fixture::star(1, 4 * 3600, true), {.compute_indexes = false});
    std::size_t direct = 0;
    for (const auto& d : res.deliveries) {
        if (d.node_id != "M1") continue;
        if (d.link == Radio::WideArea) {
            EXPECT_EQ(d.outcome, DeliveryOutcome::DeliveredToServer);
            ++direct;
        }
    }
    EXPECT_GT(direct, 0U);
    EXPECT_GT(res.count(DeliveryOutcome::DeliveredToServer), 0U);
}
