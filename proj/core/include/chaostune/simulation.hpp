#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "chaostune/parameters.hpp"
#include "chaostune/scenario.hpp"

namespace chaostune {

enum class ControlHold {
    ZeroOrderHold,  // u computed once per step from the sampled state
    Continuous,     // u re-evaluated at every Runge-Kutta stage
};

struct SimOptions {
    double dt = 1e-3;
    double t_end = 2.5;
    double divergence_bound = kDefaultDivergenceBound;
    ControlHold hold = ControlHold::ZeroOrderHold;
};

enum class RunStatus { Running, Completed, Diverged };

[[nodiscard]] std::string_view to_string(RunStatus status) noexcept;
[[nodiscard]] RunStatus parse_run_status(std::string_view text);

/// One control step: state sampled at t, the control issued for [t, t+dt),
/// the reference, tracking error, CLF value and active sigmas at t.
struct TrajectoryRow {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double u = 0.0;
    double qd = 0.0;
    double e = 0.0;
    double V = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;

    bool operator==(const TrajectoryRow&) const = default;
};

/// Rows are one per control step. A diverged run ends with one extra row
/// holding the offending state at divergence_time; nothing follows it.
struct Trajectory {
    std::vector<TrajectoryRow> rows;
    RunStatus status = RunStatus::Running;
    std::optional<double> divergence_time;

    bool operator==(const Trajectory&) const = default;
};

/// Fixed-step closed-loop simulation that can be driven one step at a time,
/// so a supervisor can inspect and retune the loop between steps.
class Simulator {
public:
    Simulator(PlantState initial, ClosedLoop loop, SimOptions options,
              std::vector<ScenarioEvent> events, SigmaBinding binding = {});

    [[nodiscard]] bool done() const noexcept;
    [[nodiscard]] std::size_t step_index() const noexcept { return step_; }
    [[nodiscard]] std::size_t total_steps() const noexcept { return total_steps_; }
    [[nodiscard]] const PlantState& state() const noexcept { return state_; }
    [[nodiscard]] const ClosedLoop& loop() const noexcept { return loop_; }
    [[nodiscard]] const SigmaBinding& binding() const noexcept { return binding_; }
    [[nodiscard]] const SimOptions& options() const noexcept { return options_; }
    [[nodiscard]] TrackingError current_error() const noexcept;

    void set_loop(const ClosedLoop& loop);

    /// Fires every pending event with at_time <= current time and returns them.
    std::vector<ScenarioEvent> apply_due_events();

    /// Fires due events, records the row for the current state, integrates one
    /// step and latches Diverged / Completed.
    void step();

    [[nodiscard]] const Trajectory& trajectory() const noexcept { return trajectory_; }
    [[nodiscard]] Trajectory take_trajectory() && { return std::move(trajectory_); }

private:
    struct ActiveDisturbance {
        AdditiveDisturbance shape;
        double start = 0.0;
    };

    [[nodiscard]] double external_force(double t) const noexcept;
    void fire(const ScenarioEvent& event);

    PlantState state_;
    ClosedLoop loop_;
    SimOptions options_;
    std::vector<ScenarioEvent> events_;
    std::size_t next_event_ = 0;
    SigmaBinding binding_;
    double t0_ = 0.0;
    std::size_t step_ = 0;
    std::size_t total_steps_ = 0;
    double actuator_scale_ = 1.0;
    std::vector<ActiveDisturbance> disturbances_;
    Trajectory trajectory_;
};

[[nodiscard]] Trajectory simulate(const PlantState& initial, const ClosedLoop& loop,
                                  const SimOptions& options,
                                  const std::vector<ScenarioEvent>& events = {},
                                  const SigmaBinding& binding = {});

}  // namespace chaostune
