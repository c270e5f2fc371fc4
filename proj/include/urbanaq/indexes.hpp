#pragma once

// Air-quality (O3, PM2.5), thermal-comfort and traffic indexes with their
// colour bands. All bands are left-closed, right-open.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbanaq/domain.hpp"

namespace urbanaq {

enum class IndexKind : std::uint8_t { AqiO3, AqiPm, Tci, Ti };
enum class Color : std::uint8_t { Green, Yellow, Orange, Red, DarkRed, Blue, DarkBlue, Unknown };

std::string_view index_kind_name(IndexKind k) noexcept;
std::string_view color_name(Color c) noexcept;

struct IndexValue {
    IndexKind kind = IndexKind::AqiO3;
    std::string station_id;
    Timestamp window_end = 0;
    std::optional<double> value;  ///< empty when there was nothing to average
    Color color = Color::Unknown;

    friend bool operator==(const IndexValue&, const IndexValue&) = default;
};

inline constexpr Timestamp kO3WindowS = 8 * 3600;
inline constexpr Timestamp kPmWindowS = 24 * 3600;

/// Ozone 8 h mean bands, ug/m3: <100 green, <180 yellow, <240 orange, else red.
Color classify_o3(double mean);
/// PM2.5 24 h mean bands, ug/m3: <10 green, <25 yellow, <60 orange, else red.
Color classify_pm(double mean);
/// Thermal index bands in degC over [-13, 46); Unknown outside that range.
Color classify_tci(double t);

/// Mean of the unflagged O3 values in `window`. Unknown colour when none remain.
IndexValue aqi_o3(std::span<const Measurement> window, std::string station_id,
                  Timestamp window_end);
IndexValue aqi_pm(std::span<const Measurement> window, std::string station_id,
                  Timestamp window_end);

/// Maps (air temperature, mean radiant temperature, wind, relative humidity)
/// to an equivalent temperature in degC.
class ThermalModel {
public:
    virtual ~ThermalModel() = default;
    [[nodiscard]] virtual double evaluate(double air_c, double radiant_c, double wind_mps,
                                          double rh_pct) const = 0;
    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
};

/// Returns the air temperature untouched.
class IdentityThermalModel final : public ThermalModel {
public:
    [[nodiscard]] double evaluate(double air_c, double, double, double) const override {
        return air_c;
    }
    [[nodiscard]] std::string_view name() const noexcept override { return "identity"; }
};

/// Steadman apparent temperature with a radiation term:
///   AT = Ta + 0.348 e - 0.70 ws + 0.70 Q / (ws + 10) - 4.25
/// where e is vapour pressure in hPa and Q the net radiative gain in W/m2,
/// linearised as 4 sigma Ta^3 (Tmrt - Ta).
class ApparentTemperatureModel final : public ThermalModel {
public:
    [[nodiscard]] double evaluate(double air_c, double radiant_c, double wind_mps,
                                  double rh_pct) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "apparent"; }
};

/// Throws std::invalid_argument for non-finite inputs or rh outside [0, 100].
IndexValue tci(const ThermalModel& model, double air_c, double radiant_c, double wind_mps,
               double rh_pct, std::string station_id = {}, Timestamp window_end = 0);

// ---- Traffic index ---------------------------------------------------------

enum class VehicleClass : std::uint8_t { Bicycle, Motorcycle, Car, Truck, Bus, Tram };
enum class Localization : std::uint8_t { Residential, Commercial, Industrial, Business };
enum class Maneuver : std::uint8_t { Straight, TurnRight, TurnLeft };
enum class Slope : std::uint8_t { Flat, Uphill, Downhill };

/// Equivalent-vehicle weight E of each class.
double equivalent_vehicles(VehicleClass c) noexcept;
/// K3 for the access location.
double localization_factor(Localization l) noexcept;

std::string_view vehicle_class_name(VehicleClass c) noexcept;
std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept;
std::optional<Localization> parse_localization(std::string_view s) noexcept;
std::optional<Maneuver> parse_maneuver(std::string_view s) noexcept;
std::optional<Slope> parse_slope(std::string_view s) noexcept;
std::string_view maneuver_name(Maneuver m) noexcept;

struct TrafficAccessConfig {
    double base_congestion = 1800.0;  ///< s_b
    std::map<VehicleClass, double> composition;  ///< shares a_i, summing to 1
    Slope slope = Slope::Flat;
    double steepness_pct = 0.0;  ///< |i|, direction given by `slope`
    Localization localization = Localization::Residential;
    std::map<Maneuver, double> maneuvers;  ///< shares b_i, summing to 1
    /// Interference weight G per maneuver. Turning weights are ranges in the
    /// reference table; the defaults take the upper end.
    std::map<Maneuver, double> maneuver_weight{
        {Maneuver::Straight, 1.0}, {Maneuver::TurnRight, 1.25}, {Maneuver::TurnLeft, 1.75}};
};

class TrafficIndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrafficBreakdown {
    double k1 = 0.0;  ///< composition, 1 / sum(a_i E_i)
    double k2 = 0.0;  ///< steepness
    double k3 = 0.0;  ///< localization
    double k4 = 0.0;  ///< maneuvering, 1 / sum(b_i G_i)
    double ti = 0.0;  ///< s_b K1 K2 K3 K4, equivalent vehicles per unit time
};

/// Throws TrafficIndexError when shares do not sum to 1, are negative, a
/// weighted sum is zero, or the slope factor is not positive.
TrafficBreakdown traffic_breakdown(const TrafficAccessConfig& cfg);
IndexValue traffic_index(const TrafficAccessConfig& cfg, std::string access_id = {});

// ---- Online index maintenance ----------------------------------------------

/// Keeps per-station sliding windows and recomputes every index on demand.
class IndexEngine {
public:
    explicit IndexEngine(std::shared_ptr<const ThermalModel> model =
                             std::make_shared<IdentityThermalModel>());

    /// Degraded (below-LoD, warming-up) samples are ignored.
    void ingest(const Measurement& m);
    void ingest(std::span<const Measurement> ms) {
        for (const auto& m : ms) ingest(m);
    }

    /// AQI windows cover (t - W, t]; TCI uses the latest inputs at or before t.
    /// Stations appear in id order; a kind is emitted only for stations that
    /// have ever reported its input quantity.
    std::vector<IndexValue> update(Timestamp t);

private:
    struct Station {
        std::multimap<Timestamp, double> o3;
        std::multimap<Timestamp, double> pm;
        std::map<Quantity, std::map<Timestamp, double>> thermal;
        bool saw_o3 = false;
        bool saw_pm = false;
    };
    std::shared_ptr<const ThermalModel> model_;
    std::map<std::string, Station> stations_;
};

/// Convenience wrapper: ingest `batch` then update at `t`.
std::vector<IndexValue> update_indexes_on_ingest(IndexEngine& engine,
                                                 std::span<const Measurement> batch, Timestamp t);

}  // namespace urbanaq
