#pragma once

// Sensor-node behaviour: periodic sampling through the sensor physics chain
// (noise, bias, T90 lag, warm-up, limit of detection, quantization).

#include <map>
#include <optional>
#include <vector>

#include "urbanaq/domain.hpp"
#include "urbanaq/field.hpp"

namespace urbanaq {

struct SensorSpec {
    Quantity quantity = Quantity::Temperature;
    double warmup_s = 900.0;
    double t90_s = 90.0;
    double lod = 0.0;         ///< in the quantity's stored unit
    double resolution = 0.0;  ///< 0 means continuous
};

/// Factory defaults. NDIR gases: LoD 5/10/5 ppm and 1 ppm steps for CO/CO2/HC,
/// with the CO figures converted to mg/m3. Warm-up only applies to NDIR gases.
SensorSpec default_sensor_spec(Quantity q);

/// Additive/multiplicative offset applied to a node's readings of one quantity,
/// e.g. to model a sensor mounted closer to exhaust pipes.
struct Bias {
    double add = 0.0;
    double mul = 1.0;
};

/// First-order response with rate ln(10)/t90: a step reaches 90% after t90.
double lag_filter(double prev, double target, double dt_s, double t90_s);

/// Nearest multiple of `resolution`, ties away from zero; identity for 0.
double quantize(double v, double resolution);

inline constexpr int kReportedSignificantDigits = 6;

struct Trajectory {
    const Path* path = nullptr;
    double speed_mps = 4.0;
    double offset_s = 0.0;  ///< start offset along the back-and-forth traversal
};

/// One simulated sensor node: owns its filter state and noise streams.
class SensorNode {
public:
    SensorNode(NodeDescriptor descriptor, Timestamp powered_since,
               std::map<Quantity, SensorSpec> specs, std::optional<Trajectory> trajectory,
               std::map<Quantity, Bias> bias, const FieldModel& field);

    [[nodiscard]] const NodeDescriptor& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] GeoPoint position_at(Timestamp t) const;

    /// One measurement per quantity of the suite, in suite order.
    std::vector<Measurement> sample(const FieldModel& field, Timestamp t);

private:
    NodeDescriptor descriptor_;
    Timestamp powered_since_;
    std::map<Quantity, SensorSpec> specs_;
    std::optional<Trajectory> trajectory_;
    std::map<Quantity, Bias> bias_;
    std::map<Quantity, NoiseStream> noise_;
    std::map<Quantity, double> last_filtered_;
    std::optional<Timestamp> last_sample_;
};

}  // namespace urbanaq
