#include "chaostune/controller.hpp"

#include <cmath>

namespace chaostune {

void validate(const ControllerParams& cp) {
    if (!std::isfinite(cp.gamma1) || !std::isfinite(cp.gamma2) || !std::isfinite(cp.k)) {
        throw Error(ErrorCode::InvalidArgument, "controller gains must be finite");
    }
    if (cp.gamma1 == 0.0) throw Error(ErrorCode::GainDegenerate, "gamma1 must be non-zero");
    if (cp.k < 0.0) throw Error(ErrorCode::InvalidArgument, "k must be >= 0");
}

void validate(const ReferenceSignal& ref) {
    if (!std::isfinite(ref.base_freq)) throw Error(ErrorCode::InvalidArgument, "base_freq must be finite");
    int prev = 0;
    for (const auto& h : ref.harmonics) {
        if (h.index <= prev) {
            throw Error(ErrorCode::InvalidArgument,
                        "harmonic indices must be positive and strictly increasing");
        }
        if (!std::isfinite(h.amplitude)) throw Error(ErrorCode::InvalidArgument, "harmonic amplitude must be finite");
        prev = h.index;
    }
}

RefEval reference_eval(const ReferenceSignal& ref, double t) noexcept {
    RefEval out;
    for (const auto& h : ref.harmonics) {
        const double w = h.index * ref.base_freq;
        const double s = std::sin(w * t);
        const double c = std::cos(w * t);
        out.qd += h.amplitude * s;
        out.qd_dot += h.amplitude * w * c;
        out.qd_ddot -= h.amplitude * w * w * s;
    }
    return out;
}

TrackingError tracking_error(const PlantState& state, const RefEval& ref) noexcept {
    return {ref.qd - state.x, ref.qd_dot - state.v};
}

double clf_surface(double e, double e_dot, const ControllerParams& cp) noexcept {
    return cp.gamma1 * e_dot + cp.gamma2 * e;
}

double clf_value(double e, double e_dot, const ControllerParams& cp) noexcept {
    const double s = clf_surface(e, e_dot, cp);
    return 0.5 * s * s;
}

double commanded_accel(const PlantState& state, const RefEval& ref, const ControllerParams& cp) {
    if (cp.gamma1 == 0.0) throw Error(ErrorCode::GainDegenerate, "gamma1 must be non-zero");
    const auto [e, e_dot] = tracking_error(state, ref);
    const double s = clf_surface(e, e_dot, cp);
    return ref.qd_ddot + (cp.gamma2 / cp.gamma1) * e_dot + (cp.k / (2.0 * cp.gamma1)) * s;
}

double control_law(const PlantState& state, const RefEval& ref, const ControllerParams& cp,
                   const PlantParams& model) {
    const double accel = commanded_accel(state, ref, cp);
    const double mass = effective_mass(state.x, model);
    return mass * accel - passive_force(state.t, state.x, state.v, model);
}

}  // namespace chaostune
