#include "urbanaq/indexes.hpp"

#include <cmath>

namespace urbanaq {

std::string_view index_kind_name(IndexKind k) noexcept {
    switch (k) {
        case IndexKind::AqiO3: return "AQI_O3";
        case IndexKind::AqiPm: return "AQI_PM";
        case IndexKind::Tci: return "TCI";
        case IndexKind::Ti: return "TI";
    }
    return "?";
}

std::string_view color_name(Color c) noexcept {
    switch (c) {
        case Color::Green: return "green";
        case Color::Yellow: return "yellow";
        case Color::Orange: return "orange";
        case Color::Red: return "red";
        case Color::DarkRed: return "dark_red";
        case Color::Blue: return "blue";
        case Color::DarkBlue: return "dark_blue";
        case Color::Unknown: return "unknown";
    }
    return "?";
}

namespace {

Color classify_aqi(double mean, double yellow_from, double orange_from, double red_from) {
    if (!std::isfinite(mean)) return Color::Unknown;
    if (mean < yellow_from) return Color::Green;
    if (mean < orange_from) return Color::Yellow;
    if (mean < red_from) return Color::Orange;
    return Color::Red;
}

IndexValue windowed_mean(IndexKind kind, Quantity q, std::span<const Measurement> window,
                         std::string station_id, Timestamp window_end) {
    IndexValue iv;
    iv.kind = kind;
    iv.station_id = std::move(station_id);
    iv.window_end = window_end;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : window) {
        if (m.quantity != q || m.flags.degraded()) continue;
        sum += m.value;
        ++n;
    }
    if (n == 0) return iv;
    iv.value = sum / static_cast<double>(n);
    iv.color = kind == IndexKind::AqiO3 ? classify_o3(*iv.value) : classify_pm(*iv.value);
    return iv;
}

}  // namespace

Color classify_o3(double mean) { return classify_aqi(mean, 100.0, 180.0, 240.0); }
Color classify_pm(double mean) { return classify_aqi(mean, 10.0, 25.0, 60.0); }

Color classify_tci(double t) {
    if (!std::isfinite(t) || t < -13.0 || t >= 46.0) return Color::Unknown;
    if (t >= 38.0) return Color::DarkRed;
    if (t >= 32.0) return Color::Red;
    if (t >= 26.0) return Color::Orange;
    if (t >= 9.0) return Color::Green;
    if (t >= 0.0) return Color::Blue;
    return Color::DarkBlue;
}

IndexValue aqi_o3(std::span<const Measurement> window, std::string station_id,
                  Timestamp window_end) {
    return windowed_mean(IndexKind::AqiO3, Quantity::O3, window, std::move(station_id),
                         window_end);
}

IndexValue aqi_pm(std::span<const Measurement> window, std::string station_id,
                  Timestamp window_end) {
    return windowed_mean(IndexKind::AqiPm, Quantity::PM25, window, std::move(station_id),
                         window_end);
}

double ApparentTemperatureModel::evaluate(double air_c, double radiant_c, double wind_mps,
                                          double rh_pct) const {
    constexpr double kStefanBoltzmann = 5.670374419e-8;
    const double vapour_hpa =
        rh_pct / 100.0 * 6.105 * std::exp(17.27 * air_c / (237.7 + air_c));
    const double air_k = air_c + 273.15;
    const double net_radiation = 4.0 * kStefanBoltzmann * air_k * air_k * air_k * (radiant_c - air_c);
    return air_c + 0.348 * vapour_hpa - 0.70 * wind_mps + 0.70 * net_radiation / (wind_mps + 10.0) -
           4.25;
}

IndexValue tci(const ThermalModel& model, double air_c, double radiant_c, double wind_mps,
               double rh_pct, std::string station_id, Timestamp window_end) {
    if (!std::isfinite(air_c) || !std::isfinite(radiant_c) || !std::isfinite(wind_mps) ||
        !std::isfinite(rh_pct)) {
        throw std::invalid_argument("tci: non-finite input");
    }
    if (rh_pct < 0.0 || rh_pct > 100.0) throw std::invalid_argument("tci: rh outside [0, 100]");
    IndexValue iv;
    iv.kind = IndexKind::Tci;
    iv.station_id = std::move(station_id);
    iv.window_end = window_end;
    iv.value = model.evaluate(air_c, radiant_c, wind_mps, rh_pct);
    iv.color = classify_tci(*iv.value);
    return iv;
}

// ---- Traffic index ---------------------------------------------------------

namespace {

constexpr std::pair<VehicleClass, std::string_view> kVehicleNames[] = {
    {VehicleClass::Bicycle, "bicycles"}, {VehicleClass::Motorcycle, "motorcycles"},
    {VehicleClass::Car, "cars"},         {VehicleClass::Truck, "trucks"},
    {VehicleClass::Bus, "buses"},        {VehicleClass::Tram, "trams"},
};

constexpr double kShareTolerance = 1e-9;
constexpr double kSteepnessGain = 0.03;

template <typename K>
double checked_share_sum(const std::map<K, double>& shares, const char* what) {
    double sum = 0.0;
    for (const auto& [k, a] : shares) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw TrafficIndexError(std::string(what) + ": shares must be finite and >= 0");
        }
        sum += a;
    }
    if (std::fabs(sum - 1.0) > kShareTolerance) {
        throw TrafficIndexError(std::string(what) + ": shares must sum to 1");
    }
    return sum;
}

}  // namespace

double equivalent_vehicles(VehicleClass c) noexcept {
    switch (c) {
        case VehicleClass::Bicycle: return 0.2;
        case VehicleClass::Motorcycle: return 0.33;
        case VehicleClass::Car: return 1.0;
        case VehicleClass::Truck: return 1.75;
        case VehicleClass::Bus: return 2.25;
        case VehicleClass::Tram: return 2.5;
    }
    return 1.0;
}

double localization_factor(Localization l) noexcept {
    switch (l) {
        case Localization::Residential: return 1.0;
        case Localization::Commercial: return 0.98;
        case Localization::Industrial: return 0.93;
        case Localization::Business: return 0.85;
    }
    return 1.0;
}

std::string_view vehicle_class_name(VehicleClass c) noexcept {
    for (const auto& [k, name] : kVehicleNames) {
        if (k == c) return name;
    }
    return "?";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept {
    for (const auto& [k, name] : kVehicleNames) {
        if (name == s) return k;
    }
    return std::nullopt;
}

std::optional<Localization> parse_localization(std::string_view s) noexcept {
    if (s == "residential") return Localization::Residential;
    if (s == "commercial") return Localization::Commercial;
    if (s == "industrial") return Localization::Industrial;
    if (s == "business") return Localization::Business;
    return std::nullopt;
}

std::string_view maneuver_name(Maneuver m) noexcept {
    switch (m) {
        case Maneuver::Straight: return "straight";
        case Maneuver::TurnRight: return "turn_right";
        case Maneuver::TurnLeft: return "turn_left";
    }
    return "?";
}

std::optional<Maneuver> parse_maneuver(std::string_view s) noexcept {
    for (auto m : {Maneuver::Straight, Maneuver::TurnRight, Maneuver::TurnLeft}) {
        if (maneuver_name(m) == s) return m;
    }
    return std::nullopt;
}

std::optional<Slope> parse_slope(std::string_view s) noexcept {
    if (s == "flat") return Slope::Flat;
    if (s == "uphill") return Slope::Uphill;
    if (s == "downhill") return Slope::Downhill;
    return std::nullopt;
}

TrafficBreakdown traffic_breakdown(const TrafficAccessConfig& cfg) {
    checked_share_sum(cfg.composition, "composition");
    checked_share_sum(cfg.maneuvers, "maneuvers");
    if (!(cfg.steepness_pct >= 0.0)) throw TrafficIndexError("steepness must be >= 0");

    double weighted_vehicles = 0.0;
    for (const auto& [cls, share] : cfg.composition) weighted_vehicles += share * equivalent_vehicles(cls);
    double weighted_maneuvers = 0.0;
    for (const auto& [m, share] : cfg.maneuvers) {
        auto it = cfg.maneuver_weight.find(m);
        if (it == cfg.maneuver_weight.end()) {
            throw TrafficIndexError("no weight for maneuver " + std::string(maneuver_name(m)));
        }
        weighted_maneuvers += share * it->second;
    }
    if (weighted_vehicles <= 0.0) throw TrafficIndexError("degenerate composition: sum(a E) = 0");
    if (weighted_maneuvers <= 0.0) throw TrafficIndexError("degenerate composition: sum(b G) = 0");

    TrafficBreakdown b;
    b.k1 = 1.0 / weighted_vehicles;
    switch (cfg.slope) {
        case Slope::Flat: b.k2 = 1.0; break;
        case Slope::Uphill: b.k2 = 1.0 - kSteepnessGain * cfg.steepness_pct; break;
        case Slope::Downhill: b.k2 = 1.0 + kSteepnessGain * cfg.steepness_pct; break;
    }
    if (b.k2 <= 0.0) throw TrafficIndexError("uphill steepness leaves no capacity (K2 <= 0)");
    b.k3 = localization_factor(cfg.localization);
    b.k4 = 1.0 / weighted_maneuvers;
    b.ti = cfg.base_congestion * b.k1 * b.k2 * b.k3 * b.k4;
    return b;
}

IndexValue traffic_index(const TrafficAccessConfig& cfg, std::string access_id) {
    IndexValue iv;
    iv.kind = IndexKind::Ti;
    iv.station_id = std::move(access_id);
    iv.value = traffic_breakdown(cfg).ti;
    return iv;
}

// ---- Online index maintenance ----------------------------------------------

IndexEngine::IndexEngine(std::shared_ptr<const ThermalModel> model) : model_(std::move(model)) {}

void IndexEngine::ingest(const Measurement& m) {
    if (m.flags.degraded()) return;
    Station& s = stations_[m.node_id];
    switch (m.quantity) {
        case Quantity::O3:
            s.o3.emplace(m.timestamp, m.value);
            s.saw_o3 = true;
            break;
        case Quantity::PM25:
            s.pm.emplace(m.timestamp, m.value);
            s.saw_pm = true;
            break;
        case Quantity::Temperature:
        case Quantity::RadiantTemperature:
        case Quantity::WindSpeed:
        case Quantity::RelativeHumidity:
            s.thermal[m.quantity][m.timestamp] = m.value;
            break;
        default:
            break;
    }
}

namespace {

std::optional<double> window_mean(std::multimap<Timestamp, double>& samples, Timestamp t,
                                  Timestamp width) {
    // Drop what can never re-enter a window ending at or after t.
    samples.erase(samples.begin(), samples.upper_bound(t - width));
    double sum = 0.0;
    std::size_t n = 0;
    for (auto it = samples.begin(); it != samples.end() && it->first <= t; ++it) {
        sum += it->second;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> latest_at(std::map<Timestamp, double>& series, Timestamp t) {
    auto it = series.upper_bound(t);
    if (it == series.begin()) return std::nullopt;
    --it;
    series.erase(series.begin(), it);
    return it->second;
}

}  // namespace

std::vector<IndexValue> IndexEngine::update(Timestamp t) {
    std::vector<IndexValue> out;
    for (auto& [id, s] : stations_) {
        if (s.saw_o3) {
            IndexValue iv{IndexKind::AqiO3, id, t, window_mean(s.o3, t, kO3WindowS), Color::Unknown};
            if (iv.value) iv.color = classify_o3(*iv.value);
            out.push_back(std::move(iv));
        }
        if (s.saw_pm) {
            IndexValue iv{IndexKind::AqiPm, id, t, window_mean(s.pm, t, kPmWindowS), Color::Unknown};
            if (iv.value) iv.color = classify_pm(*iv.value);
            out.push_back(std::move(iv));
        }
        auto air = latest_at(s.thermal[Quantity::Temperature], t);
        auto radiant = latest_at(s.thermal[Quantity::RadiantTemperature], t);
        auto wind = latest_at(s.thermal[Quantity::WindSpeed], t);
        auto rh = latest_at(s.thermal[Quantity::RelativeHumidity], t);
        if (air && radiant && wind && rh) {
            out.push_back(tci(*model_, *air, *radiant, *wind, *rh, id, t));
        }
    }
    return out;
}

std::vector<IndexValue> update_indexes_on_ingest(IndexEngine& engine,
                                                 std::span<const Measurement> batch, Timestamp t) {
    engine.ingest(batch);
    return engine.update(t);
}

}  // namespace urbanaq
