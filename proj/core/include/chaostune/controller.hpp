#pragma once

#include <vector>

#include "chaostune/dynamics.hpp"

namespace chaostune {

/// Gains of the control Lyapunov function V = 1/2 (gamma1 e' + gamma2 e)^2
/// and its prescribed decay rate k (V' = -k V).
struct ControllerParams {
    double gamma1 = 12.0;
    double gamma2 = 4.0;
    double k = 115.0;

    bool operator==(const ControllerParams&) const = default;
};

void validate(const ControllerParams& cp);

struct Harmonic {
    int index = 1;
    double amplitude = 0.0;

    bool operator==(const Harmonic&) const = default;
};

/// qd(t) = sum_i a_i sin(i w t), default odd harmonics {1, 3, 5} with
/// amplitudes {0.1, 0.5, 1.0} at w = 1 rad/s.
struct ReferenceSignal {
    std::vector<Harmonic> harmonics{{1, 0.1}, {3, 0.5}, {5, 1.0}};
    double base_freq = 1.0;

    bool operator==(const ReferenceSignal&) const = default;
};

/// Indices must be positive and strictly increasing, amplitudes finite.
void validate(const ReferenceSignal& ref);

struct RefEval {
    double qd = 0.0;
    double qd_dot = 0.0;
    double qd_ddot = 0.0;
};

struct TrackingError {
    double e = 0.0;
    double e_dot = 0.0;
};

[[nodiscard]] RefEval reference_eval(const ReferenceSignal& ref, double t) noexcept;

/// e = qd - x, e' = qd' - v.
[[nodiscard]] TrackingError tracking_error(const PlantState& state, const RefEval& ref) noexcept;

/// Sliding variable gamma1 e' + gamma2 e; V vanishes exactly on its zero set.
[[nodiscard]] double clf_surface(double e, double e_dot, const ControllerParams& cp) noexcept;

[[nodiscard]] double clf_value(double e, double e_dot, const ControllerParams& cp) noexcept;

/// Acceleration the closed loop must realise so that
///   gamma1 e'' + gamma2 e' = -(k/2) (gamma1 e' + gamma2 e),
/// which is V' = -k V for the squared CLF:
///   x''_cmd = qd'' + (gamma2/gamma1) e' + (k / (2 gamma1)) (gamma1 e' + gamma2 e).
/// Throws GainDegenerate when gamma1 == 0.
[[nodiscard]] double commanded_accel(const PlantState& state, const RefEval& ref,
                                     const ControllerParams& cp);

/// Inverse dynamics against the controller's plant model:
///   u = (1 + eps1 x^2) x''_cmd - passive_force(t, x, v).
/// This follows from V' = -k V; a linear "+x" restoring term is included
/// by setting model.lin_stiffness = 1.
[[nodiscard]] double control_law(const PlantState& state, const RefEval& ref,
                                 const ControllerParams& cp, const PlantParams& model);

}  // namespace chaostune
