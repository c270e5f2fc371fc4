#pragma once

// Small hand-built scenarios shared by the simulation tests.

#include <string>

#include "urbanaq/scenario.hpp"

namespace fixture {

inline urbanaq::FieldModel flat_field(std::uint64_t seed = 1) {
    using urbanaq::Quantity;
    std::map<Quantity, urbanaq::QuantityField> cfg;
    const std::pair<Quantity, double> base[] = {
        {Quantity::Temperature, 14.7}, {Quantity::RelativeHumidity, 70.2},
        {Quantity::DewPoint, 9.8},     {Quantity::WindSpeed, 0.69},
        {Quantity::RadiantTemperature, 15.1}, {Quantity::PM25, 14.8},
        {Quantity::HC, 3.12},          {Quantity::CO2, 451.1},
        {Quantity::CO, 2.28},          {Quantity::O3, 51.33},
        {Quantity::Pressure, 1013.0},  {Quantity::SolarRadiation, 250.0},
        {Quantity::Rain, 0.0}};
    for (auto [q, v] : base) {
        urbanaq::QuantityField f;
        f.baseline = v;
        cfg[q] = f;
    }
    return urbanaq::FieldModel(seed, cfg);
}

/// One coordinator plus `n_fixed` gas-suite fixed nodes 100 m apart along a
/// parallel, and optionally a mobile node on a 2 km east-west route.
inline urbanaq::ScenarioConfig star(int n_fixed, urbanaq::Timestamp duration_s,
                                    bool with_mobile = false) {
    using namespace urbanaq;
    ScenarioConfig s;
    s.name = "star";
    s.duration_s = duration_s;
    s.field = flat_field();
    const GeoPoint origin{43.716, 10.400};
    NodeConfig c;
    c.descriptor = {"C0", NodeKind::Coordinator, {}, default_radios(NodeKind::Coordinator), origin};
    s.nodes.push_back(c);
    for (int i = 0; i < n_fixed; ++i) {
        NodeConfig f;
        f.descriptor = {"F" + std::to_string(i + 1), NodeKind::Fixed, default_suite(NodeKind::Fixed),
                        default_radios(NodeKind::Fixed),
                        GeoPoint{origin.lat, origin.lon + 0.00124 * (i + 1)}};
        s.nodes.push_back(f);
    }
    if (with_mobile) {
        s.paths["route"] = Path({origin, GeoPoint{origin.lat, origin.lon + 0.0248}});
        NodeConfig m;
        m.descriptor = {"M1", NodeKind::Mobile, default_suite(NodeKind::Mobile),
                        default_radios(NodeKind::Mobile), std::nullopt};
        m.route = "route";
        s.nodes.push_back(m);
    }
    return s;
}

}  // namespace fixture
