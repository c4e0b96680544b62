#include "chaostune/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chaostune/error.hpp"

namespace chaostune {

namespace {

// Events are compared against the step time with a small tolerance so that
// an event at exactly k*dt fires on step k despite rounding in t0 + k*dt.
constexpr double kEventSlack = 1e-9;

template <typename T>
void overwrite(double& field, const std::optional<T>& value) {
    if (value) field = *value;
}

}  // namespace

std::string_view to_string(RunStatus status) noexcept {
    switch (status) {
        case RunStatus::Running: return "running";
        case RunStatus::Completed: return "completed";
        case RunStatus::Diverged: return "diverged";
    }
    return "running";
}

RunStatus parse_run_status(std::string_view text) {
    if (text == "running") return RunStatus::Running;
    if (text == "completed") return RunStatus::Completed;
    if (text == "diverged") return RunStatus::Diverged;
    throw Error(ErrorCode::ParseFailure, "unknown status '" + std::string(text) + "'");
}

Simulator::Simulator(PlantState initial, ClosedLoop loop, SimOptions options,
                     std::vector<ScenarioEvent> events, SigmaBinding binding)
    : state_(initial), loop_(std::move(loop)), options_(options), events_(std::move(events)),
      binding_(binding), t0_(initial.t) {
    if (!(options_.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    if (!(options_.t_end > initial.t)) throw Error(ErrorCode::InvalidArgument, "t_end must exceed the initial time");
    if (!is_finite(initial)) throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
    validate(loop_.plant);
    validate(loop_.model);
    validate(loop_.reference);
    std::stable_sort(events_.begin(), events_.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at_time < b.at_time; });
    const double span = (options_.t_end - initial.t) / options_.dt;
    total_steps_ = static_cast<std::size_t>(std::max(1.0, std::round(span)));
    trajectory_.rows.reserve(total_steps_);
}

bool Simulator::done() const noexcept { return trajectory_.status != RunStatus::Running; }

TrackingError Simulator::current_error() const noexcept {
    return tracking_error(state_, reference_eval(loop_.reference, state_.t));
}

void Simulator::set_loop(const ClosedLoop& loop) { loop_ = loop; }

std::vector<ScenarioEvent> Simulator::apply_due_events() {
    std::vector<ScenarioEvent> fired;
    while (next_event_ < events_.size() && events_[next_event_].at_time <= state_.t + kEventSlack) {
        fire(events_[next_event_]);
        fired.push_back(events_[next_event_]);
        ++next_event_;
    }
    return fired;
}

void Simulator::fire(const ScenarioEvent& event) {
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SetControllerGains>) {
                overwrite(loop_.gains.gamma1, a.gamma1);
                overwrite(loop_.gains.gamma2, a.gamma2);
                overwrite(loop_.gains.k, a.k);
            } else if constexpr (std::is_same_v<T, SetSigmas>) {
                loop_ = apply_sigmas(loop_, a.pair, binding_);
            } else if constexpr (std::is_same_v<T, SetPlantParams>) {
                overwrite(loop_.plant.delta, a.delta);
                overwrite(loop_.plant.eps1, a.eps1);
                overwrite(loop_.plant.eps2, a.eps2);
                overwrite(loop_.plant.forcing_amp, a.forcing_amp);
                overwrite(loop_.plant.forcing_freq, a.forcing_freq);
                overwrite(loop_.plant.lin_stiffness, a.lin_stiffness);
            } else if constexpr (std::is_same_v<T, ActuatorScale>) {
                actuator_scale_ = a.factor;
            } else if constexpr (std::is_same_v<T, AdditiveDisturbance>) {
                disturbances_.push_back({a, event.at_time});
            } else {
                state_.v += a.dv;
            }
        },
        event.action);
}

double Simulator::external_force(double t) const noexcept {
    double f = 0.0;
    for (const auto& d : disturbances_) {
        if (t >= d.start && t < d.start + d.shape.duration) {
            f += d.shape.amplitude * std::sin(d.shape.freq * (t - d.start));
        }
    }
    return f;
}

void Simulator::step() {
    if (done()) return;
    apply_due_events();

    const ClosedLoop& loop = loop_;
    const RefEval ref = reference_eval(loop.reference, state_.t);
    const TrackingError err = tracking_error(state_, ref);
    const double u = control_law(state_, ref, loop.gains, loop.model);
    const SigmaPair sig = read_sigmas(loop, binding_);
    trajectory_.rows.push_back(
        {state_.t, state_.x, state_.v, u, ref.qd, err.e, clf_value(err.e, err.e_dot, loop.gains), sig.s1, sig.s2});

    std::optional<PlantState> next;
    const double applied = actuator_scale_ * u;
    if (options_.hold == ControlHold::ZeroOrderHold) {
        next = rk4_step(state_, loop.plant,
                        [&](double t, double, double) { return applied + external_force(t); }, options_.dt);
    } else {
        next = rk4_step(
            state_, loop.plant,
            [&](double t, double x, double v) {
                const PlantState s{t, x, v};
                const RefEval r = reference_eval(loop.reference, t);
                return actuator_scale_ * control_law(s, r, loop.gains, loop.model) + external_force(t);
            },
            options_.dt);
    }

    ++step_;
    const double t_next = t0_ + static_cast<double>(step_) * options_.dt;
    if (!next || std::abs(next->x) > options_.divergence_bound) {
        // The offending state closes the trajectory so its time survives export.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const PlantState bad = next ? PlantState{t_next, next->x, next->v} : PlantState{t_next, nan, nan};
        const RefEval r = reference_eval(loop.reference, t_next);
        const TrackingError be = tracking_error(bad, r);
        trajectory_.rows.push_back(
            {t_next, bad.x, bad.v, u, r.qd, be.e, clf_value(be.e, be.e_dot, loop.gains), sig.s1, sig.s2});
        trajectory_.status = RunStatus::Diverged;
        trajectory_.divergence_time = t_next;
        return;
    }
    state_ = *next;
    state_.t = t_next;
    if (step_ >= total_steps_) trajectory_.status = RunStatus::Completed;
}

Trajectory simulate(const PlantState& initial, const ClosedLoop& loop, const SimOptions& options,
                    const std::vector<ScenarioEvent>& events, const SigmaBinding& binding) {
    Simulator sim(initial, loop, options, events, binding);
    while (!sim.done()) sim.step();
    return std::move(sim).take_trajectory();
}

}  // namespace chaostune
