#include "urbanaq/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urbanaq/timeutil.hpp"

namespace urbanaq {

SensorSpec default_sensor_spec(Quantity q) {
    SensorSpec s;
    s.quantity = q;
    switch (q) {
        case Quantity::CO:
            s.lod = co_ppm_to_mg_m3(5.0);
            s.resolution = co_ppm_to_mg_m3(1.0);
            break;
        case Quantity::CO2:
            s.lod = 10.0;
            s.resolution = 1.0;
            break;
        case Quantity::HC:
            s.lod = 5.0;
            s.resolution = 1.0;
            break;
        default:
            break;
    }
    return s;
}

double lag_filter(double prev, double target, double dt_s, double t90_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("lag_filter: dt must be positive");
    if (!(t90_s > 0.0)) throw std::invalid_argument("lag_filter: t90 must be positive");
    // exp(-ln(10) * dt / t90) == 10^(-dt / t90)
    const double remaining = std::pow(10.0, -dt_s / t90_s);
    return target + (prev - target) * remaining;
}

double quantize(double v, double resolution) {
    if (resolution <= 0.0) return v;
    return std::round(v / resolution) * resolution;
}

SensorNode::SensorNode(NodeDescriptor descriptor, Timestamp powered_since,
                       std::map<Quantity, SensorSpec> specs, std::optional<Trajectory> trajectory,
                       std::map<Quantity, Bias> bias, const FieldModel& field)
    : descriptor_(std::move(descriptor)),
      powered_since_(powered_since),
      specs_(std::move(specs)),
      trajectory_(trajectory),
      bias_(std::move(bias)) {
    if (descriptor_.kind == NodeKind::Mobile && !trajectory_) {
        throw std::invalid_argument("mobile node " + descriptor_.node_id + " has no trajectory");
    }
    for (auto q : descriptor_.sensor_suite) {
        if (!specs_.contains(q)) specs_.emplace(q, default_sensor_spec(q));
        noise_.emplace(q, NoiseStream(field.seed(), descriptor_.node_id, q,
                                      field.has(q) ? field.config(q).noise_sigma : 0.0));
    }
}

GeoPoint SensorNode::position_at(Timestamp t) const {
    GeoPoint p;
    if (trajectory_) {
        const double elapsed = static_cast<double>(t - powered_since_) + trajectory_->offset_s;
        p = path_position(*trajectory_->path, trajectory_->speed_mps, elapsed);
        // Micro-degree resolution (~0.1 m) keeps reported positions short.
        p.lat = std::round(p.lat * 1e6) / 1e6;
        p.lon = std::round(p.lon * 1e6) / 1e6;
    } else {
        p = descriptor_.home_position.value_or(GeoPoint{});
    }
    return p;
}

std::vector<Measurement> SensorNode::sample(const FieldModel& field, Timestamp t) {
    const GeoPoint position = position_at(t);
    const double dt = last_sample_ ? static_cast<double>(t - *last_sample_) : 0.0;
    std::vector<Measurement> out;
    out.reserve(descriptor_.sensor_suite.size());

    for (auto q : descriptor_.sensor_suite) {
        const SensorSpec& spec = specs_.at(q);
        double raw = field.value(q, position, t) + noise_.at(q).next();
        if (auto it = bias_.find(q); it != bias_.end()) raw = raw * it->second.mul + it->second.add;

        double filtered = raw;
        if (auto it = last_filtered_.find(q); it != last_filtered_.end() && dt > 0.0) {
            filtered = lag_filter(it->second, raw, dt, spec.t90_s);
        }
        last_filtered_[q] = filtered;

        Measurement m;
        m.node_id = descriptor_.node_id;
        m.timestamp = t;
        m.position = position;
        m.quantity = q;

        const bool warming = is_ndir_gas(q) && static_cast<double>(t - powered_since_) < spec.warmup_s;
        double v = filtered;
        if (warming) {
            m.flags.set(MeasurementFlag::WarmingUp);
            v = 0.0;
        } else if (spec.lod > 0.0 && v < spec.lod) {
            m.flags.set(MeasurementFlag::BelowLoD);
            v = 0.0;
        } else if (spec.resolution > 0.0) {
            v = quantize(v, spec.resolution);
            m.flags.set(MeasurementFlag::Quantized);
        }
        if (is_non_negative(q) && v < 0.0) v = 0.0;
        if (q == Quantity::RelativeHumidity) v = std::clamp(v, 0.0, 100.0);
        m.value = round_significant(v, kReportedSignificantDigits) + 0.0;
        out.push_back(std::move(m));
    }
    last_sample_ = t;
    return out;
}

}  // namespace urbanaq
