#pragma once

// Core value types shared by every module: positions, quantities and units,
// measurements, node descriptors and coordinator batches.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace urbanaq {

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

struct GeoPoint {
    double lat = 0.0;  ///< decimal degrees, WGS84
    double lon = 0.0;

    [[nodiscard]] bool is_valid() const noexcept;
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

enum class Quantity : std::uint8_t {
    Temperature,
    RelativeHumidity,
    DewPoint,
    WindSpeed,
    RadiantTemperature,
    PM25,
    HC,
    CO2,
    CO,
    O3,
    Pressure,
    SolarRadiation,
    Rain,
};

inline constexpr Quantity kAllQuantities[] = {
    Quantity::Temperature, Quantity::RelativeHumidity, Quantity::DewPoint,
    Quantity::WindSpeed,   Quantity::RadiantTemperature, Quantity::PM25,
    Quantity::HC,          Quantity::CO2,              Quantity::CO,
    Quantity::O3,          Quantity::Pressure,         Quantity::SolarRadiation,
    Quantity::Rain,
};

/// Short lowercase code used in files and on the command line ("co2", "pm25", ...).
std::string_view quantity_code(Quantity q) noexcept;
/// The one unit each quantity is stored in. CO is mg/m3.
std::string_view quantity_unit(Quantity q) noexcept;
/// Human label, e.g. "carbon dioxide (CO2)".
std::string_view quantity_label(Quantity q) noexcept;
std::optional<Quantity> parse_quantity(std::string_view code) noexcept;

/// Concentrations and wind speed; values must be >= 0.
bool is_non_negative(Quantity q) noexcept;
/// Quantities read by the NDIR gas sensor (CO, CO2, HC), which needs a warm-up.
bool is_ndir_gas(Quantity q) noexcept;

/// CO conversion at 25 degC and 1013 hPa.
double co_ppm_to_mg_m3(double ppm) noexcept;
double co_mg_m3_to_ppm(double mg_m3) noexcept;

enum class MeasurementFlag : std::uint8_t {
    BelowLoD = 1U << 0U,
    WarmingUp = 1U << 1U,
    Quantized = 1U << 2U,
};

class FlagSet {
public:
    constexpr FlagSet() = default;
    constexpr FlagSet(MeasurementFlag f) : bits_(static_cast<std::uint8_t>(f)) {}  // NOLINT

    [[nodiscard]] constexpr bool has(MeasurementFlag f) const noexcept {
        return (bits_ & static_cast<std::uint8_t>(f)) != 0;
    }
    constexpr FlagSet& set(MeasurementFlag f) noexcept {
        bits_ |= static_cast<std::uint8_t>(f);
        return *this;
    }
    [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
    [[nodiscard]] constexpr std::uint8_t bits() const noexcept { return bits_; }
    /// BelowLoD or WarmingUp: the value must not feed indexes or means.
    [[nodiscard]] constexpr bool degraded() const noexcept {
        return has(MeasurementFlag::BelowLoD) || has(MeasurementFlag::WarmingUp);
    }

    friend constexpr bool operator==(FlagSet, FlagSet) = default;

private:
    std::uint8_t bits_ = 0;
};

std::string_view flag_name(MeasurementFlag f) noexcept;
std::optional<MeasurementFlag> parse_flag(std::string_view name) noexcept;

struct Measurement {
    std::string node_id;
    Timestamp timestamp = 0;
    GeoPoint position;
    Quantity quantity = Quantity::Temperature;
    double value = 0.0;
    FlagSet flags;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

enum class NodeKind : std::uint8_t { Fixed, Mobile, Coordinator, WeatherStation };
enum class Radio : std::uint8_t { ShortRangeFixed, ShortRangeMobile, WideArea };

std::string_view node_kind_name(NodeKind k) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept;
std::string_view radio_name(Radio r) noexcept;

struct NodeDescriptor {
    std::string node_id;
    NodeKind kind = NodeKind::Fixed;
    std::vector<Quantity> sensor_suite;
    std::vector<Radio> radios;
    std::optional<GeoPoint> home_position;  ///< required unless Mobile

    [[nodiscard]] bool has_sensor(Quantity q) const noexcept;
    [[nodiscard]] bool has_radio(Radio r) const noexcept;
    [[nodiscard]] bool has_gas_suite() const noexcept;
};

/// Quantities a node of this kind may carry.
bool kind_allows(NodeKind kind, Quantity q) noexcept;
/// Radios fitted by default to a node of this kind.
std::vector<Radio> default_radios(NodeKind kind);
/// Default sensor suite for a node of this kind.
std::vector<Quantity> default_suite(NodeKind kind);

struct ReportBatch {
    std::string coordinator_id;
    Timestamp uplink_time = 0;
    std::vector<Measurement> measurements;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, std::string reason);

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

/// Returns `m` unchanged when every measurement invariant holds, otherwise throws
/// ValidationError naming the offending field.
const Measurement& validate_measurement(const Measurement& m);

/// Throws ValidationError when kind, radios, suite or home position disagree.
void validate_descriptor(const NodeDescriptor& d);

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

}  // namespace urbanaq
