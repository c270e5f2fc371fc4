#include "urbanaq/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace urbanaq {

namespace {

struct QuantityInfo {
    Quantity q;
    std::string_view code;
    std::string_view unit;
    std::string_view label;
};

constexpr QuantityInfo kQuantityTable[] = {
    {Quantity::Temperature, "temp", "degC", "temperature"},
    {Quantity::RelativeHumidity, "rh", "%", "relative humidity"},
    {Quantity::DewPoint, "dew", "degC", "dew point"},
    {Quantity::WindSpeed, "wind", "m/s", "wind speed"},
    {Quantity::RadiantTemperature, "trad", "degC", "radiant temperature"},
    {Quantity::PM25, "pm25", "ug/m3", "PM 2.5"},
    {Quantity::HC, "hc", "ppmV", "unburned hydrocarbons (HC)"},
    {Quantity::CO2, "co2", "ppmV", "carbon dioxide (CO2)"},
    {Quantity::CO, "co", "mg/m3", "carbon monoxide (CO)"},
    {Quantity::O3, "o3", "ug/m3", "ozone (O3)"},
    {Quantity::Pressure, "press", "hPa", "atmospheric pressure"},
    {Quantity::SolarRadiation, "solar", "W/m2", "solar radiation"},
    {Quantity::Rain, "rain", "mm", "rain"},
};

const QuantityInfo& info(Quantity q) noexcept {
    return kQuantityTable[static_cast<std::size_t>(q)];
}

// Molar volume of an ideal gas at 25 degC and 1013 hPa, in L/mol.
constexpr double kGasConstant = 8.314462618;
constexpr double kReferenceKelvin = 298.15;
constexpr double kReferencePa = 101'300.0;
constexpr double kCoMolarMass = 28.010;  // g/mol

double molar_volume_litres() noexcept {
    return kGasConstant * kReferenceKelvin / kReferencePa * 1000.0;
}

double to_radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

}  // namespace

bool GeoPoint::is_valid() const noexcept {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
           lon >= -180.0 && lon <= 180.0;
}

std::string_view quantity_code(Quantity q) noexcept { return info(q).code; }
std::string_view quantity_unit(Quantity q) noexcept { return info(q).unit; }
std::string_view quantity_label(Quantity q) noexcept { return info(q).label; }

std::optional<Quantity> parse_quantity(std::string_view code) noexcept {
    for (const auto& entry : kQuantityTable) {
        if (entry.code == code) return entry.q;
    }
    return std::nullopt;
}

bool is_non_negative(Quantity q) noexcept {
    switch (q) {
        case Quantity::PM25:
        case Quantity::HC:
        case Quantity::CO2:
        case Quantity::CO:
        case Quantity::O3:
        case Quantity::WindSpeed:
        case Quantity::SolarRadiation:
        case Quantity::Rain:
            return true;
        default:
            return false;
    }
}

bool is_ndir_gas(Quantity q) noexcept {
    return q == Quantity::CO || q == Quantity::CO2 || q == Quantity::HC;
}

double co_ppm_to_mg_m3(double ppm) noexcept { return ppm * kCoMolarMass / molar_volume_litres(); }
double co_mg_m3_to_ppm(double mg_m3) noexcept {
    return mg_m3 * molar_volume_litres() / kCoMolarMass;
}

std::string_view flag_name(MeasurementFlag f) noexcept {
    switch (f) {
        case MeasurementFlag::BelowLoD: return "below_lod";
        case MeasurementFlag::WarmingUp: return "warming_up";
        case MeasurementFlag::Quantized: return "quantized";
    }
    return "?";
}

std::optional<MeasurementFlag> parse_flag(std::string_view name) noexcept {
    for (auto f : {MeasurementFlag::BelowLoD, MeasurementFlag::WarmingUp,
                   MeasurementFlag::Quantized}) {
        if (flag_name(f) == name) return f;
    }
    return std::nullopt;
}

std::string_view node_kind_name(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::Fixed: return "fixed";
        case NodeKind::Mobile: return "mobile";
        case NodeKind::Coordinator: return "coordinator";
        case NodeKind::WeatherStation: return "weather";
    }
    return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept {
    for (auto k : {NodeKind::Fixed, NodeKind::Mobile, NodeKind::Coordinator,
                   NodeKind::WeatherStation}) {
        if (node_kind_name(k) == name) return k;
    }
    return std::nullopt;
}

std::string_view radio_name(Radio r) noexcept {
    switch (r) {
        case Radio::ShortRangeFixed: return "short_range_fixed";
        case Radio::ShortRangeMobile: return "short_range_mobile";
        case Radio::WideArea: return "wide_area";
    }
    return "?";
}

bool NodeDescriptor::has_sensor(Quantity q) const noexcept {
    return std::find(sensor_suite.begin(), sensor_suite.end(), q) != sensor_suite.end();
}

bool NodeDescriptor::has_radio(Radio r) const noexcept {
    return std::find(radios.begin(), radios.end(), r) != radios.end();
}

bool NodeDescriptor::has_gas_suite() const noexcept {
    return std::any_of(sensor_suite.begin(), sensor_suite.end(), is_ndir_gas);
}

bool kind_allows(NodeKind kind, Quantity q) noexcept {
    switch (kind) {
        case NodeKind::Fixed:
        case NodeKind::Coordinator:
            return q != Quantity::SolarRadiation && q != Quantity::Rain;
        case NodeKind::Mobile:
            return q != Quantity::WindSpeed && q != Quantity::RadiantTemperature &&
                   q != Quantity::PM25 && q != Quantity::SolarRadiation && q != Quantity::Rain;
        case NodeKind::WeatherStation:
            return q == Quantity::Temperature || q == Quantity::RelativeHumidity ||
                   q == Quantity::DewPoint || q == Quantity::WindSpeed ||
                   q == Quantity::SolarRadiation || q == Quantity::Rain ||
                   q == Quantity::Pressure;
    }
    return false;
}

std::vector<Radio> default_radios(NodeKind kind) {
    switch (kind) {
        case NodeKind::Mobile:
            return {Radio::ShortRangeFixed, Radio::ShortRangeMobile, Radio::WideArea};
        case NodeKind::Coordinator:
            return {Radio::ShortRangeFixed, Radio::ShortRangeMobile, Radio::WideArea};
        case NodeKind::Fixed:
        case NodeKind::WeatherStation:
            return {Radio::ShortRangeFixed};
    }
    return {};
}

std::vector<Quantity> default_suite(NodeKind kind) {
    using Q = Quantity;
    switch (kind) {
        case NodeKind::Fixed:
            return {Q::Temperature, Q::RelativeHumidity, Q::DewPoint, Q::WindSpeed,
                    Q::RadiantTemperature, Q::HC, Q::CO2, Q::CO, Q::O3, Q::Pressure};
        case NodeKind::Mobile:
            return {Q::Temperature, Q::RelativeHumidity, Q::DewPoint, Q::HC,
                    Q::CO2, Q::CO, Q::O3, Q::Pressure};
        case NodeKind::WeatherStation:
            return {Q::Temperature, Q::RelativeHumidity, Q::DewPoint, Q::WindSpeed,
                    Q::SolarRadiation, Q::Rain};
        case NodeKind::Coordinator:
            return {};
    }
    return {};
}

ValidationError::ValidationError(std::string field, std::string reason)
    : std::runtime_error(field + ": " + reason),
      field_(std::move(field)),
      reason_(std::move(reason)) {}

const Measurement& validate_measurement(const Measurement& m) {
    if (m.node_id.empty()) throw ValidationError("node_id", "empty");
    if (!m.position.is_valid()) throw ValidationError("position", "out of range");
    if (!std::isfinite(m.value)) throw ValidationError("value", "not finite");
    if (is_non_negative(m.quantity) && m.value < 0.0) {
        throw ValidationError("value", "negative");
    }
    return m;
}

void validate_descriptor(const NodeDescriptor& d) {
    if (d.node_id.empty()) throw ValidationError("node_id", "empty");
    for (auto q : d.sensor_suite) {
        if (!kind_allows(d.kind, q)) {
            throw ValidationError("sensor_suite", std::string(quantity_code(q)) +
                                                      " not allowed on " +
                                                      std::string(node_kind_name(d.kind)));
        }
    }
    auto require = [&](Radio r) {
        if (!d.has_radio(r)) {
            throw ValidationError("radios", std::string("missing ") + std::string(radio_name(r)));
        }
    };
    switch (d.kind) {
        case NodeKind::Mobile:
            require(Radio::ShortRangeFixed);
            require(Radio::ShortRangeMobile);
            require(Radio::WideArea);
            break;
        case NodeKind::Coordinator:
            require(Radio::ShortRangeFixed);
            require(Radio::WideArea);
            break;
        case NodeKind::Fixed:
        case NodeKind::WeatherStation:
            require(Radio::ShortRangeFixed);
            break;
    }
    if (d.kind != NodeKind::Mobile) {
        if (!d.home_position) throw ValidationError("home_position", "missing");
        if (!d.home_position->is_valid()) throw ValidationError("home_position", "out of range");
    }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double phi1 = to_radians(a.lat);
    const double phi2 = to_radians(b.lat);
    const double dphi = phi2 - phi1;
    const double dlambda = to_radians(b.lon - a.lon);
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace urbanaq
