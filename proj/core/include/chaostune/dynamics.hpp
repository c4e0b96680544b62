#pragma once

// Forced Duffing-Van der Pol plant
//
//   x'' + delta x' + eps1 (x^2 x'' + x x'^2) + lin_stiffness x + eps2 x^3
//       = u(t) + forcing_amp cos(forcing_freq t)
//
// solved for x'' in state-space form (x1 = x, x2 = x'). Damping enters the
// numerator as -delta x', so positive delta dissipates energy.
// lin_stiffness is zero in the plain oscillator; setting it to 1 gives the
// variant whose inverse dynamics carry an extra "+x" term.

#include <cmath>
#include <concepts>
#include <optional>

#include "chaostune/error.hpp"

namespace chaostune {

inline constexpr double kDefaultDivergenceBound = 100.0;
inline constexpr double kMassGuard = 1e-9;

struct PlantParams {
    double delta = 0.5;
    double eps1 = 1.6;
    double eps2 = -0.8;
    double forcing_amp = 3.0;
    double forcing_freq = 10.0;
    double lin_stiffness = 0.0;

    bool operator==(const PlantParams&) const = default;
};

struct PlantState {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;

    bool operator==(const PlantState&) const = default;
};

/// Throws InvalidArgument when a field is non-finite or forcing_freq < 0.
void validate(const PlantParams& params);

[[nodiscard]] inline bool is_finite(const PlantState& s) noexcept {
    return std::isfinite(s.t) && std::isfinite(s.x) && std::isfinite(s.v);
}

/// Effective mass 1 + eps1 x^2; throws SingularMass when |mass| <= 1e-9.
[[nodiscard]] double effective_mass(double x, const PlantParams& params);

/// Sum of every plant force except the inertial term, evaluated at (t, x, v)
/// with no control input: -delta v - eps1 x v^2 - lin_stiffness x - eps2 x^3 + P cos(w t).
[[nodiscard]] double passive_force(double t, double x, double v, const PlantParams& params) noexcept;

/// x'' for the given state and control force `u`.
[[nodiscard]] double plant_accel(const PlantState& state, const PlantParams& params, double u);

template <typename F>
concept ControlInput = std::invocable<F, double, double, double> &&
    std::convertible_to<std::invoke_result_t<F, double, double, double>, double>;

/// One classical Runge-Kutta step of size dt. `u_of(t, x, v)` is queried at
/// each of the four stages. Returns nullopt when the result is non-finite.
template <ControlInput F>
[[nodiscard]] std::optional<PlantState> rk4_step(const PlantState& s, const PlantParams& params,
                                                 F&& u_of, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "rk4_step requires dt > 0");

    auto accel = [&](double t, double x, double v) {
        return plant_accel(PlantState{t, x, v}, params, u_of(t, x, v));
    };

    const double h2 = 0.5 * dt;
    const double k1x = s.v;
    const double k1v = accel(s.t, s.x, s.v);
    const double k2x = s.v + h2 * k1v;
    const double k2v = accel(s.t + h2, s.x + h2 * k1x, k2x);
    const double k3x = s.v + h2 * k2v;
    const double k3v = accel(s.t + h2, s.x + h2 * k2x, k3x);
    const double k4x = s.v + dt * k3v;
    const double k4v = accel(s.t + dt, s.x + dt * k3x, k4x);

    PlantState next{s.t + dt,
                    s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
                    s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    if (!is_finite(next)) return std::nullopt;
    return next;
}

}  // namespace chaostune
