#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chaostune/parameters.hpp"

namespace chaostune {

// Scripted mid-run perturbations. Events snap to the first control step
// whose time is >= at_time and fire exactly once.

struct SetControllerGains {
    std::optional<double> gamma1, gamma2, k;
};

struct SetSigmas {
    SigmaPair pair;
};

/// Overwrites fields of the physical plant only; the controller's model is
/// left as it was.
struct SetPlantParams {
    std::optional<double> delta, eps1, eps2, forcing_amp, forcing_freq, lin_stiffness;
};

/// Multiplies every subsequent control force reaching the plant.
struct ActuatorScale {
    double factor = 1.0;
};

/// Adds amplitude * sin(freq * (t - at_time)) to the plant force for `duration` seconds.
struct AdditiveDisturbance {
    double amplitude = 0.0;
    double freq = 0.0;
    double duration = 0.0;
};

struct ImpulseVelocity {
    double dv = 0.0;
};

using EventAction = std::variant<SetControllerGains, SetSigmas, SetPlantParams, ActuatorScale,
                                 AdditiveDisturbance, ImpulseVelocity>;

struct ScenarioEvent {
    double at_time = 0.0;
    EventAction action;
};

[[nodiscard]] std::string_view action_name(const EventAction& action) noexcept;

struct Scenario {
    std::string description;
    std::optional<SigmaBinding> binding;
    std::optional<Coupling> coupling;
    std::vector<ScenarioEvent> events;  // sorted by at_time
};

/// Parses the JSON scenario document; unknown keys and malformed events
/// throw ConfigError.
[[nodiscard]] Scenario parse_scenario(std::string_view json_text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] std::string scenario_to_json(const Scenario& scenario);

}  // namespace chaostune
