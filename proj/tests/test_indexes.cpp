#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "urbanaq/indexes.hpp"

using namespace urbanaq;

namespace {

Measurement sample(std::string station, Timestamp t, Quantity q, double v, FlagSet flags = {}) {
    Measurement m;
    m.node_id = std::move(station);
    m.timestamp = t;
    m.position = {43.716, 10.4};
    m.quantity = q;
    m.value = v;
    m.flags = flags;
    return m;
}

TrafficAccessConfig straight_only(std::map<VehicleClass, double> mix) {
    TrafficAccessConfig c;
    c.composition = std::move(mix);
    c.maneuvers = {{Maneuver::Straight, 1.0}};
    return c;
}

}  // namespace

TEST(AqiBands, OzoneBoundariesAreLeftClosed) {
    EXPECT_EQ(classify_o3(0.0), Color::Green);
    EXPECT_EQ(classify_o3(99.999), Color::Green);
    EXPECT_EQ(classify_o3(100.0), Color::Yellow);
    EXPECT_EQ(classify_o3(179.9), Color::Yellow);
    EXPECT_EQ(classify_o3(180.0), Color::Orange);
    EXPECT_EQ(classify_o3(240.0), Color::Red);
    EXPECT_EQ(classify_o3(1e6), Color::Red);
}

TEST(AqiBands, ParticulateBoundaries) {
    EXPECT_EQ(classify_pm(9.99), Color::Green);
    EXPECT_EQ(classify_pm(10.0), Color::Yellow);
    EXPECT_EQ(classify_pm(25.0), Color::Orange);
    EXPECT_EQ(classify_pm(59.99), Color::Orange);
    EXPECT_EQ(classify_pm(60.0), Color::Red);
}

TEST(TciBands, AllBoundaries) {
    EXPECT_EQ(classify_tci(-13.0), Color::DarkBlue);
    EXPECT_EQ(classify_tci(-0.001), Color::DarkBlue);
    EXPECT_EQ(classify_tci(0.0), Color::Blue);
    EXPECT_EQ(classify_tci(9.0), Color::Green);
    EXPECT_EQ(classify_tci(26.0), Color::Orange);
    EXPECT_EQ(classify_tci(32.0), Color::Red);
    EXPECT_EQ(classify_tci(38.0), Color::DarkRed);
    EXPECT_EQ(classify_tci(45.999), Color::DarkRed);
    EXPECT_EQ(classify_tci(46.0), Color::Unknown);
    EXPECT_EQ(classify_tci(-13.001), Color::Unknown);
}

TEST(AqiWindow, AveragesUnflaggedOnly) {
    const std::vector<Measurement> w{
        sample("F1", 100, Quantity::O3, 90.0), sample("F1", 400, Quantity::O3, 120.0),
        sample("F1", 700, Quantity::O3, 0.0, FlagSet(MeasurementFlag::WarmingUp)),
        sample("F1", 700, Quantity::PM25, 300.0)};
    const IndexValue v = aqi_o3(w, "F1", 900);
    ASSERT_TRUE(v.value.has_value());
    EXPECT_DOUBLE_EQ(*v.value, 105.0);
    EXPECT_EQ(v.color, Color::Yellow);
    EXPECT_EQ(v.kind, IndexKind::AqiO3);
}

TEST(AqiWindow, EmptyIsUnknown) {
    const IndexValue v = aqi_pm({}, "F1", 900);
    EXPECT_FALSE(v.value.has_value());
    EXPECT_EQ(v.color, Color::Unknown);
}

TEST(Tci, IdentityModelUsesAirTemperature) {
    IdentityThermalModel id;
    const IndexValue v = tci(id, 27.0, 40.0, 1.0, 50.0);
    EXPECT_EQ(*v.value, 27.0);
    EXPECT_EQ(v.color, Color::Orange);
    EXPECT_THROW(tci(id, 27.0, 40.0, 1.0, 120.0), std::invalid_argument);
    EXPECT_THROW(tci(id, std::nan(""), 40.0, 1.0, 50.0), std::invalid_argument);
}

TEST(Tci, ApparentTemperatureRisesWithRadiationAndHumidity) {
    ApparentTemperatureModel at;
    const double base = at.evaluate(25.0, 25.0, 1.0, 50.0);
    EXPECT_GT(at.evaluate(25.0, 45.0, 1.0, 50.0), base);
    EXPECT_GT(at.evaluate(25.0, 25.0, 1.0, 80.0), base);
    EXPECT_LT(at.evaluate(25.0, 25.0, 5.0, 50.0), base);
}

TEST(TrafficIndex, CarsAndMotorcyclesUphillBusiness) {
    TrafficAccessConfig c = straight_only({{VehicleClass::Car, 0.5}, {VehicleClass::Motorcycle, 0.5}});
    c.slope = Slope::Uphill;
    c.steepness_pct = 5.0;
    c.localization = Localization::Business;
    const TrafficBreakdown b = traffic_breakdown(c);
    EXPECT_NEAR(b.k1, 1.0 / 0.665, 1e-12);
    EXPECT_NEAR(b.k2, 0.85, 1e-12);
    EXPECT_NEAR(b.k3, 0.85, 1e-12);
    EXPECT_NEAR(b.k4, 1.0, 1e-12);
    const double expected = oracle::traffic_index(
        {{0.5, 0.5}, {1.0, 0.33}, +1, 5.0, 0.85, {1.0}, {1.0}});
    EXPECT_NEAR(b.ti, expected, 1e-9);
    EXPECT_NEAR(b.ti, 1955.64, 0.01);
}

TEST(TrafficIndex, AllCarsFlatResidentialIsBaseCongestion) {
    const TrafficBreakdown b = traffic_breakdown(straight_only({{VehicleClass::Car, 1.0}}));
    EXPECT_DOUBLE_EQ(b.ti, 1800.0);
    EXPECT_EQ(traffic_index(straight_only({{VehicleClass::Car, 1.0}}), "A1").station_id, "A1");
}

TEST(TrafficIndex, DownhillAndTurnsFollowTables) {
    TrafficAccessConfig c = straight_only({{VehicleClass::Bus, 0.2}, {VehicleClass::Car, 0.8}});
    c.slope = Slope::Downhill;
    c.steepness_pct = 4.0;
    c.localization = Localization::Industrial;
    c.maneuvers = {{Maneuver::Straight, 0.5}, {Maneuver::TurnLeft, 0.3}, {Maneuver::TurnRight, 0.2}};
    const double expected = oracle::traffic_index(
        {{0.2, 0.8}, {2.25, 1.0}, -1, 4.0, 0.93, {0.5, 0.3, 0.2}, {1.0, 1.75, 1.25}});
    EXPECT_NEAR(traffic_breakdown(c).ti, expected, 1e-9);
}

TEST(TrafficIndex, RejectsBadShares) {
    EXPECT_THROW(traffic_breakdown(straight_only({{VehicleClass::Car, 0.6}})), TrafficIndexError);
    EXPECT_THROW(traffic_breakdown(straight_only({{VehicleClass::Car, 1.2}, {VehicleClass::Bus, -0.2}})),
                 TrafficIndexError);
    TrafficAccessConfig steep = straight_only({{VehicleClass::Car, 1.0}});
    steep.slope = Slope::Uphill;
    steep.steepness_pct = 40.0;
    EXPECT_THROW(traffic_breakdown(steep), TrafficIndexError);
}

TEST(TrafficIndex, PositiveAndMonotoneInHeavyShare) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        const auto ti = [](double truck) {
            return traffic_breakdown(
                       straight_only({{VehicleClass::Truck, truck}, {VehicleClass::Car, 1.0 - truck}}))
                .ti;
        };
        ASSERT_GT(ti(hi), 0.0);
        ASSERT_LE(ti(hi), ti(lo));
    }
}

TEST(IndexEngine, SlidingWindowAndStationOrder) {
    IndexEngine engine;
    engine.ingest(sample("F2", 0, Quantity::O3, 200.0));
    engine.ingest(sample("F1", 3600, Quantity::O3, 50.0));
    auto v = engine.update(3600);
    ASSERT_EQ(v.size(), 2U);
    EXPECT_EQ(v[0].station_id, "F1");
    EXPECT_EQ(v[1].color, Color::Orange);
    // Eight hours later F2's only sample has left the window.
    v = engine.update(8 * 3600);
    ASSERT_EQ(v.size(), 2U);
    EXPECT_EQ(v[1].station_id, "F2");
    EXPECT_EQ(v[1].color, Color::Unknown);
    EXPECT_EQ(v[0].color, Color::Green);
}

TEST(IndexEngine, TciNeedsAllInputsAndSkipsDegraded) {
    IndexEngine engine;
    engine.ingest(sample("F1", 0, Quantity::Temperature, 20.0));
    engine.ingest(sample("F1", 0, Quantity::RadiantTemperature, 20.0));
    engine.ingest(sample("F1", 0, Quantity::WindSpeed, 1.0));
    EXPECT_TRUE(engine.update(300).empty());
    engine.ingest(sample("F1", 0, Quantity::RelativeHumidity, 50.0));
    engine.ingest(sample("F1", 200, Quantity::O3, 0.0, FlagSet(MeasurementFlag::WarmingUp)));
    const auto v = update_indexes_on_ingest(engine, {}, 300);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v[0].kind, IndexKind::Tci);
    EXPECT_EQ(v[0].color, Color::Green);
}

TEST(Bands, MonotoneInValue) {
    // Severity order of each table, mildest first.
    const auto rank_aqi = [](Color c) {
        switch (c) {
            case Color::Green: return 0;
            case Color::Yellow: return 1;
            case Color::Orange: return 2;
            default: return 3;
        }
    };
    const auto rank_tci = [](Color c) {
        switch (c) {
            case Color::DarkBlue: return 0;
            case Color::Blue: return 1;
            case Color::Green: return 2;
            case Color::Orange: return 3;
            case Color::Red: return 4;
            default: return 5;
        }
    };
    int prev_o3 = 0, prev_pm = 0, prev_tci = 0;
    for (double v = 0.0; v < 400.0; v += 0.01) {
        ASSERT_GE(rank_aqi(classify_o3(v)), prev_o3);
        ASSERT_GE(rank_aqi(classify_pm(v)), prev_pm);
        prev_o3 = rank_aqi(classify_o3(v));
        prev_pm = rank_aqi(classify_pm(v));
    }
    for (double t = -13.0; t < 46.0; t += 0.01) {
        ASSERT_GE(rank_tci(classify_tci(t)), prev_tci) << t;
        prev_tci = rank_tci(classify_tci(t));
    }
}

TEST(TrafficIndex, InvariantUnderShareRescaling) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.01, 1.0), k(0.1, 50.0);
    const VehicleClass cls[] = {VehicleClass::Bicycle, VehicleClass::Car, VehicleClass::Truck, VehicleClass::Tram};
    for (int i = 0; i < 200; ++i) {
        std::vector<double> raw(4);
        for (auto& x : raw) x = u(rng);
        const double c = k(rng);
        auto normalised = [&](double scale) {
            double s = 0.0;
            for (double x : raw) s += x * scale;
            std::map<VehicleClass, double> mix;
            for (std::size_t j = 0; j < 4; ++j) mix[cls[j]] = raw[j] * scale / s;
            return traffic_breakdown(straight_only(mix)).ti;
        };
        ASSERT_NEAR(normalised(c), normalised(1.0), 1e-9 * normalised(1.0));
    }
}

TEST(TrafficIndex, DecreasingInManeuverWeight) {
    TrafficAccessConfig c = straight_only({{VehicleClass::Car, 1.0}});
    c.maneuvers = {{Maneuver::Straight, 0.5}, {Maneuver::TurnLeft, 0.5}};
    c.maneuver_weight[Maneuver::TurnLeft] = 1.25;
    double prev = traffic_breakdown(c).ti;
    for (double g = 1.3; g <= 1.75 + 1e-12; g += 0.05) {
        c.maneuver_weight[Maneuver::TurnLeft] = g;
        const double ti = traffic_breakdown(c).ti;
        EXPECT_LT(ti, prev);
        prev = ti;
    }
}

TEST(TrafficIndex, DecreasingInEquivalentWeight) {
    // E is a fixed table; moving share onto a class with larger E raises
    // sum(a_i E_i) exactly as raising that E would.
    const VehicleClass by_e[] = {VehicleClass::Bicycle, VehicleClass::Motorcycle, VehicleClass::Car,
                                 VehicleClass::Truck,   VehicleClass::Bus,        VehicleClass::Tram};
    double prev = std::numeric_limits<double>::infinity();
    for (auto c : by_e) {
        const double ti = traffic_breakdown(straight_only({{c, 1.0}})).ti;
        EXPECT_LT(ti, prev) << vehicle_class_name(c);
        prev = ti;
    }
}

TEST(AqiWindow, PermutationInvariantAndMatchesBruteMean) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Measurement> w;
        std::vector<double> vals;
        const int n = 1 + trial * 2;
        for (int i = 0; i < n; ++i) {
            const double v = u(rng);
            w.push_back(sample("F1", 300 * i, Quantity::O3, v));
            vals.push_back(v);
        }
        const double a = *aqi_o3(w, "F1", 0).value;
        std::shuffle(w.begin(), w.end(), rng);
        const double b = *aqi_o3(w, "F1", 0).value;
        const double ref = oracle::brute_mean(vals);
        EXPECT_NEAR(a, ref, 1e-12 * ref);
        EXPECT_NEAR(b, ref, 1e-12 * ref);
    }
}
