#include "urbanaq/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace urbanaq {

namespace {

constexpr double kDaySeconds = 86'400.0;
constexpr double kMorningPeakH = 7.5;
constexpr double kEveningPeakH = 18.0;
constexpr double kPeakWidthH = 1.5;

double gaussian_bump(double hour, double centre) noexcept {
    // Wrap the distance around midnight so the profile is periodic.
    double d = std::fabs(hour - centre);
    d = std::min(d, 24.0 - d);
    return std::exp(-0.5 * (d / kPeakWidthH) * (d / kPeakWidthH));
}

double seconds_of_day(Timestamp t) noexcept {
    auto s = t % static_cast<Timestamp>(kDaySeconds);
    if (s < 0) s += static_cast<Timestamp>(kDaySeconds);
    return static_cast<double>(s);
}

}  // namespace

double traffic_intensity(Timestamp t) noexcept {
    const double hour = seconds_of_day(t) / 3600.0;
    return std::min(1.0, gaussian_bump(hour, kMorningPeakH) + gaussian_bump(hour, kEveningPeakH));
}

FieldModel::FieldModel(std::uint64_t seed, std::map<Quantity, QuantityField> quantities)
    : seed_(seed), quantities_(std::move(quantities)) {}

const QuantityField& FieldModel::config(Quantity q) const {
    auto it = quantities_.find(q);
    if (it == quantities_.end()) {
        throw FieldError("quantity not configured in field: " + std::string(quantity_code(q)));
    }
    return it->second;
}

double FieldModel::value(Quantity q, const GeoPoint& p, Timestamp t) const {
    const QuantityField& cfg = config(q);
    const double phase =
        2.0 * std::numbers::pi * (seconds_of_day(t) - cfg.diurnal_peak_hour * 3600.0) / kDaySeconds;
    double v = cfg.baseline + cfg.diurnal_amplitude * std::cos(phase) +
               cfg.traffic_coupling * traffic_intensity(t);
    for (const auto& plume : cfg.plumes) {
        const double d = haversine_distance(p, plume.center);
        v += plume.amplitude * std::exp(-0.5 * (d / plume.sigma_m) * (d / plume.sigma_m));
    }
    if (is_non_negative(q)) v = std::max(0.0, v);
    if (q == Quantity::RelativeHumidity) v = std::clamp(v, 0.0, 100.0);
    return v;
}

double FieldModel::max_rate_per_second(Quantity q) const {
    const QuantityField& cfg = config(q);
    // d/dt of the cosine plus the steepest slope of a Gaussian rush-hour bump
    // (two bumps can overlap near midnight only negligibly).
    const double diurnal = std::fabs(cfg.diurnal_amplitude) * 2.0 * std::numbers::pi / kDaySeconds;
    const double bump_slope = std::exp(-0.5) / (kPeakWidthH * 3600.0);
    return diurnal + 2.0 * std::fabs(cfg.traffic_coupling) * bump_slope;
}

std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
}

NoiseStream::NoiseStream(std::uint64_t field_seed, std::string_view node_id, Quantity q,
                         double sigma)
    : engine_(mix_seed(mix_seed(field_seed, stable_hash(node_id)), static_cast<std::uint64_t>(q))),
      dist_(0.0, 1.0),
      sigma_(sigma) {}

double NoiseStream::next() {
    if (sigma_ <= 0.0) return 0.0;
    return sigma_ * dist_(engine_);
}

Path::Path(std::vector<GeoPoint> vertices) : vertices_(std::move(vertices)) {
    cumulative_.reserve(vertices_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (i > 0) total += haversine_distance(vertices_[i - 1], vertices_[i]);
        cumulative_.push_back(total);
    }
}

GeoPoint Path::at_distance(double s) const {
    if (vertices_.empty()) throw PathError("empty path");
    if (vertices_.size() == 1 || s <= 0.0) return vertices_.front();
    if (s >= length_m()) return vertices_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const auto hi = static_cast<std::size_t>(it - cumulative_.begin());
    const std::size_t lo = hi - 1;
    const double seg = cumulative_[hi] - cumulative_[lo];
    const double f = seg > 0.0 ? (s - cumulative_[lo]) / seg : 0.0;
    const GeoPoint& a = vertices_[lo];
    const GeoPoint& b = vertices_[hi];
    return {a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
}

double Path::distance_to(const GeoPoint& p) const {
    if (vertices_.empty()) throw PathError("empty path");
    double best = haversine_distance(p, vertices_.front());
    // Dense sampling is plenty at city scale; segments are at most a few km.
    constexpr double kStepM = 0.5;
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const double seg = cumulative_[i] - cumulative_[i - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(seg / kStepM)));
        for (int k = 0; k <= steps; ++k) {
            const double s = cumulative_[i - 1] + seg * k / steps;
            best = std::min(best, haversine_distance(p, at_distance(s)));
        }
    }
    return best;
}

GeoPoint path_position(const Path& path, double speed_mps, double t_seconds) {
    if (path.empty()) throw PathError("empty path");
    if (!(speed_mps > 0.0)) throw std::invalid_argument("speed must be positive");
    const double length = path.length_m();
    if (length <= 0.0) return path.vertices().front();
    double s = std::fmod(speed_mps * std::max(0.0, t_seconds), 2.0 * length);
    if (s > length) s = 2.0 * length - s;
    return path.at_distance(s);
}

}  // namespace urbanaq
