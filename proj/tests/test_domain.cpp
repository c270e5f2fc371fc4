#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "urbanaq/domain.hpp"

using namespace urbanaq;

namespace {

Measurement reading(Quantity q, double value) {
    Measurement m;
    m.node_id = "F1";
    m.timestamp = 1'427'846'400;
    m.position = {43.716, 10.4};
    m.quantity = q;
    m.value = value;
    return m;
}

}  // namespace

TEST(ValidateMeasurement, AcceptsTypicalCo2) {
    const Measurement m = reading(Quantity::CO2, 423.26);
    EXPECT_EQ(validate_measurement(m), m);
}

TEST(ValidateMeasurement, RejectsNegativeConcentration) {
    try {
        validate_measurement(reading(Quantity::PM25, -1.0));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "value");
        EXPECT_EQ(e.reason(), "negative");
    }
}

TEST(ValidateMeasurement, NegativeTemperatureIsFine) {
    EXPECT_NO_THROW(validate_measurement(reading(Quantity::Temperature, -4.0)));
}

TEST(ValidateMeasurement, RejectsLatitudeOutOfRange) {
    Measurement m = reading(Quantity::O3, 50.0);
    m.position.lat = 91.0;
    try {
        validate_measurement(m);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "position");
        EXPECT_EQ(e.reason(), "out of range");
    }
}

TEST(ValidateMeasurement, RejectsNaN) {
    EXPECT_THROW(validate_measurement(reading(Quantity::Temperature, std::nan(""))), ValidationError);
    Measurement m = reading(Quantity::Temperature, 1.0);
    m.position.lon = std::numeric_limits<double>::infinity();
    EXPECT_THROW(validate_measurement(m), ValidationError);
}

TEST(Quantities, CodesRoundTripAndUnitsAreFixed) {
    for (auto q : kAllQuantities) {
        auto parsed = parse_quantity(quantity_code(q));
        ASSERT_TRUE(parsed.has_value());
        EXPECT_EQ(*parsed, q);
        EXPECT_FALSE(quantity_unit(q).empty());
    }
    EXPECT_EQ(quantity_unit(Quantity::CO), "mg/m3");
    EXPECT_EQ(quantity_unit(Quantity::CO2), "ppmV");
    EXPECT_FALSE(parse_quantity("nox").has_value());
}

TEST(Quantities, CoConversionAt25C) {
    // 1 ppm CO = 28.01 / 24.47 mg/m3 at 298.15 K and 1013 hPa.
    const double molar_volume = 8.314462618 * 298.15 / 101300.0 * 1000.0;
    EXPECT_NEAR(co_ppm_to_mg_m3(1.0), 28.01 / molar_volume, 1e-12);
    EXPECT_NEAR(co_ppm_to_mg_m3(1.0), 1.1447, 1e-3);
    EXPECT_NEAR(co_mg_m3_to_ppm(co_ppm_to_mg_m3(7.3)), 7.3, 1e-12);
}

TEST(Descriptor, KindRules) {
    NodeDescriptor mobile{"M1", NodeKind::Mobile, default_suite(NodeKind::Mobile),
                          default_radios(NodeKind::Mobile), std::nullopt};
    EXPECT_NO_THROW(validate_descriptor(mobile));
    mobile.sensor_suite.push_back(Quantity::WindSpeed);
    EXPECT_THROW(validate_descriptor(mobile), ValidationError);

    NodeDescriptor m2{"M2", NodeKind::Mobile, {}, {Radio::ShortRangeFixed}, std::nullopt};
    EXPECT_THROW(validate_descriptor(m2), ValidationError);

    NodeDescriptor fixed{"F1", NodeKind::Fixed, default_suite(NodeKind::Fixed), {},
                         GeoPoint{43.7, 10.4}};
    EXPECT_THROW(validate_descriptor(fixed), ValidationError);  // no radio
    fixed.radios = default_radios(NodeKind::Fixed);
    EXPECT_NO_THROW(validate_descriptor(fixed));
    fixed.home_position.reset();
    EXPECT_THROW(validate_descriptor(fixed), ValidationError);

    NodeDescriptor weather{"W1", NodeKind::WeatherStation, {Quantity::CO2},
                           default_radios(NodeKind::WeatherStation), GeoPoint{43.7, 10.4}};
    EXPECT_THROW(validate_descriptor(weather), ValidationError);
}

TEST(Haversine, IdentityIsZero) {
    const GeoPoint a{43.716, 10.4};
    EXPECT_EQ(haversine_distance(a, a), 0.0);
}

TEST(Haversine, MilliDegreeOfLatitude) {
    // Closed form on the sphere: R * dphi = 6371000 * 0.001 * pi / 180.
    const double expected = 6'371'000.0 * 0.001 * std::numbers::pi / 180.0;
    EXPECT_NEAR(expected, 111.19, 0.01);
    EXPECT_NEAR(haversine_distance({43.716, 10.4}, {43.717, 10.4}), expected, 1e-6);
}

TEST(Haversine, SymmetryTriangleAndOracleAgreement) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(43.68, 43.75);
    std::uniform_real_distribution<double> lon(10.35, 10.45);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{lat(rng), lon(rng)};
        const GeoPoint b{lat(rng), lon(rng)};
        const GeoPoint c{lat(rng), lon(rng)};
        const double ab = haversine_distance(a, b);
        EXPECT_EQ(ab, haversine_distance(b, a));
        EXPECT_GE(ab, 0.0);
        const double ac = haversine_distance(a, c);
        const double cb = haversine_distance(c, b);
        EXPECT_LE(ab, (ac + cb) * (1.0 + 1e-6));
        EXPECT_NEAR(ab, oracle::great_circle_m(a.lat, a.lon, b.lat, b.lon), 1e-6 * std::max(1.0, ab));
    }
}

TEST(FlagSet, DegradedOnlyForLodAndWarmup) {
    FlagSet f;
    EXPECT_FALSE(f.degraded());
    f.set(MeasurementFlag::Quantized);
    EXPECT_FALSE(f.degraded());
    f.set(MeasurementFlag::BelowLoD);
    EXPECT_TRUE(f.degraded());
    EXPECT_TRUE(FlagSet(MeasurementFlag::WarmingUp).degraded());
}
