#pragma once

// Scenario configuration: nodes, named paths, field model, network parameters.
// Loaded from a JSON file; see docs/scenario.md for the schema.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbanaq/domain.hpp"
#include "urbanaq/field.hpp"
#include "urbanaq/link.hpp"
#include "urbanaq/nodes.hpp"

namespace urbanaq {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeConfig {
    NodeDescriptor descriptor;
    /// Name of the path a static node sits on ("traffic", "fitness", ...); may be empty.
    std::string path_tag;
    /// Mobile nodes: name of the route they ride and how fast.
    std::string route;
    double speed_mps = 4.0;
    double route_offset_s = 0.0;
    std::map<Quantity, Bias> bias;
};

struct ScenarioConfig {
    std::string name;
    Timestamp start_time = 1'427'846'400;  // 2015-04-01T00:00:00Z
    Timestamp duration_s = 86'400;
    std::uint64_t seed = 1;
    std::vector<NodeConfig> nodes;
    std::map<std::string, Path> paths;
    FieldModel field;
    NetworkParams network;
    std::map<Quantity, SensorSpec> sensors;  ///< overrides of default_sensor_spec

    /// Reseeds every stochastic component.
    void set_seed(std::uint64_t s) noexcept {
        seed = s;
        field.set_seed(s);
    }

    [[nodiscard]] const NodeConfig* find_node(std::string_view id) const noexcept;
    [[nodiscard]] SensorSpec sensor_spec(Quantity q) const;
};

/// Throws ConfigError on unresolved references, duplicate ids or invalid values.
void validate_scenario(const ScenarioConfig& cfg);

ScenarioConfig parse_scenario(const std::string& json_text);
/// Throws ConfigError naming the path when the file cannot be read.
ScenarioConfig load_scenario(const std::filesystem::path& file);

}  // namespace urbanaq
