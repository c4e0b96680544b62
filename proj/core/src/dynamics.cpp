#include "chaostune/dynamics.hpp"

#include <string>

namespace chaostune {

void validate(const PlantParams& p) {
    for (double f : {p.delta, p.eps1, p.eps2, p.forcing_amp, p.forcing_freq, p.lin_stiffness}) {
        if (!std::isfinite(f)) throw Error(ErrorCode::InvalidArgument, "plant parameter is not finite");
    }
    if (p.forcing_freq < 0.0) throw Error(ErrorCode::InvalidArgument, "forcing_freq must be >= 0");
}

double effective_mass(double x, const PlantParams& params) {
    const double mass = 1.0 + params.eps1 * x * x;
    // NaN passes through so the integrator reports it as a non-finite step.
    if (std::abs(mass) <= kMassGuard) {
        throw Error(ErrorCode::SingularMass, "1 + eps1 x^2 vanishes at x = " + std::to_string(x));
    }
    return mass;
}

double passive_force(double t, double x, double v, const PlantParams& p) noexcept {
    return -p.delta * v - p.eps1 * x * v * v - p.lin_stiffness * x - p.eps2 * x * x * x +
           p.forcing_amp * std::cos(p.forcing_freq * t);
}

double plant_accel(const PlantState& s, const PlantParams& params, double u) {
    const double mass = effective_mass(s.x, params);
    return (passive_force(s.t, s.x, s.v, params) + u) / mass;
}

}  // namespace chaostune
