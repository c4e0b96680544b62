#pragma once

#include <string>
#include <string_view>

#include "chaostune/controller.hpp"
#include "chaostune/dynamics.hpp"

namespace chaostune {

/// Everything that defines one closed loop. `plant` is the physical system;
/// `model` is the controller's belief about it. They start out equal;
/// scripted plant overwrites and plant-side sigma bindings only touch `plant`.
struct ClosedLoop {
    PlantParams plant;
    PlantParams model;
    ControllerParams gains;
    ReferenceSignal reference;

    bool operator==(const ClosedLoop&) const = default;
};

/// A nameable scalar of the closed loop that a sigma can overwrite.
enum class ParamTarget {
    Gamma1,
    Gamma2,
    K,
    Delta,
    Eps1,
    Eps2,
    ForcingAmp,
    ForcingFreq,
    LinStiffness,
    ModelDelta,
    ModelEps1,
    ModelEps2,
    ModelForcingAmp,
    ModelForcingFreq,
    ModelLinStiffness,
};

/// Names: gamma1, gamma2, k, delta, eps1, eps2, forcing_amp, forcing_freq,
/// lin_stiffness and the same plant names prefixed with "model.".
[[nodiscard]] ParamTarget parse_target(std::string_view name);
[[nodiscard]] std::string_view target_name(ParamTarget target) noexcept;

[[nodiscard]] double& param_ref(ClosedLoop& loop, ParamTarget target) noexcept;
[[nodiscard]] double param_value(const ClosedLoop& loop, ParamTarget target) noexcept;

struct SigmaPair {
    double s1 = 0.0;
    double s2 = 0.0;

    bool operator==(const SigmaPair&) const = default;
};

/// Which two loop parameters s1 and s2 overwrite (gamma1, gamma2 by default).
struct SigmaBinding {
    ParamTarget first = ParamTarget::Gamma1;
    ParamTarget second = ParamTarget::Gamma2;

    /// "t1,t2"; throws UnknownTarget for unknown or repeated names.
    [[nodiscard]] static SigmaBinding parse(std::string_view spec);
    [[nodiscard]] std::string to_string() const;

    bool operator==(const SigmaBinding&) const = default;
};

/// Returns a copy of `loop` with the bound targets set to (s1, s2).
[[nodiscard]] ClosedLoop apply_sigmas(const ClosedLoop& loop, const SigmaPair& pair,
                                      const SigmaBinding& binding);

/// Current values of the bound targets.
[[nodiscard]] SigmaPair read_sigmas(const ClosedLoop& loop, const SigmaBinding& binding) noexcept;

/// Relation the sampler imposes between s1 and s2: s2 = ratio * s1, or an
/// independent draw of s2 when `uncoupled`.
struct Coupling {
    bool uncoupled = false;
    double ratio = -0.125;

    /// "uncoupled", a decimal number, or a fraction such as "-1/8".
    [[nodiscard]] static Coupling parse(std::string_view spec);
    [[nodiscard]] std::string to_string() const;

    bool operator==(const Coupling&) const = default;
};

}  // namespace chaostune
