#pragma once

// Synthetic ground-truth environment. Every node reading is derived from the
// same deterministic field so that fixed and mobile populations share one oracle.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "urbanaq/domain.hpp"

namespace urbanaq {

/// Gaussian bump added on top of the baseline, e.g. exhaust along a busy road.
struct Plume {
    GeoPoint center;
    double sigma_m = 100.0;
    double amplitude = 0.0;
};

struct QuantityField {
    double baseline = 0.0;
    double diurnal_amplitude = 0.0;
    double diurnal_peak_hour = 15.0;  ///< UTC hour of the sinusoid maximum
    double traffic_coupling = 0.0;    ///< gain applied to traffic_intensity()
    std::vector<Plume> plumes;
    double noise_sigma = 0.0;  ///< consumed by sensor nodes, not by value()
};

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rush-hour traffic profile in [0, 1], periodic over a UTC day.
double traffic_intensity(Timestamp t) noexcept;

class FieldModel {
public:
    FieldModel() = default;
    FieldModel(std::uint64_t seed, std::map<Quantity, QuantityField> quantities);

    /// Noise-free value of `q` at (p, t). Concentrations are clamped at zero and
    /// relative humidity to [0, 100]. Throws FieldError for an unconfigured quantity.
    [[nodiscard]] double value(Quantity q, const GeoPoint& p, Timestamp t) const;

    [[nodiscard]] bool has(Quantity q) const noexcept { return quantities_.contains(q); }
    [[nodiscard]] const QuantityField& config(Quantity q) const;
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }
    [[nodiscard]] const std::map<Quantity, QuantityField>& quantities() const noexcept {
        return quantities_;
    }
    std::map<Quantity, QuantityField>& quantities() noexcept { return quantities_; }

    /// Upper bound on |value(q, p, t + 1) - value(q, p, t)|.
    [[nodiscard]] double max_rate_per_second(Quantity q) const;

private:
    std::uint64_t seed_ = 0;
    std::map<Quantity, QuantityField> quantities_;
};

/// Free-function form of FieldModel::value.
inline double field_value(const FieldModel& f, Quantity q, const GeoPoint& p, Timestamp t) {
    return f.value(q, p, t);
}

/// 64-bit FNV-1a, stable across platforms (std::hash is not).
std::uint64_t stable_hash(std::string_view text) noexcept;
/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// Reproducible white Gaussian noise for one (node, quantity) stream.
class NoiseStream {
public:
    NoiseStream(std::uint64_t field_seed, std::string_view node_id, Quantity q, double sigma);
    double next();

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_;
    double sigma_;
};

class PathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Polyline with precomputed arc length (haversine per segment).
class Path {
public:
    Path() = default;
    explicit Path(std::vector<GeoPoint> vertices);

    [[nodiscard]] std::span<const GeoPoint> vertices() const noexcept { return vertices_; }
    [[nodiscard]] double length_m() const noexcept {
        return cumulative_.empty() ? 0.0 : cumulative_.back();
    }
    [[nodiscard]] bool empty() const noexcept { return vertices_.empty(); }
    /// Point at arc length s, clamped to [0, length].
    [[nodiscard]] GeoPoint at_distance(double s) const;
    /// Distance in meters from p to the nearest point of the polyline (sampled).
    [[nodiscard]] double distance_to(const GeoPoint& p) const;

private:
    std::vector<GeoPoint> vertices_;
    std::vector<double> cumulative_;
};

/// Position after travelling for t seconds at `speed_mps`, bouncing back and
/// forth along the path. Throws PathError on an empty path and
/// std::invalid_argument for a non-positive speed.
GeoPoint path_position(const Path& path, double speed_mps, double t_seconds);

}  // namespace urbanaq
