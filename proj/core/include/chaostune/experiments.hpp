#pragma once

// Reusable studies shared by the command-line tool, the tests and the
// benchmarks.

#include <optional>

#include "chaostune/adaptive.hpp"
#include "chaostune/config.hpp"
#include "chaostune/scenario.hpp"

namespace chaostune {

struct ClfDecayResult {
    double horizon = 0.0;           // 5 / k
    double max_normalized_dev = 0;  // max |V(t) - V(0) e^{-kt}| / V(0)
    double max_relative_dev = 0;    // max |V(t) - V(0) e^{-kt}| / (V(0) e^{-kt})
    std::size_t samples = 0;
};

/// Baseline loop started at x(0) = x0 off the reference, compared with the
/// analytic CLF decay over [0, 5/k].
[[nodiscard]] ClfDecayResult clf_decay_study(const RunConfig& cfg, double x0 = 0.5);

struct Rk4OrderResult {
    double dt = 0.0;
    double err_dt = 0.0;       // |state(dt) - reference| at t_end
    double err_half = 0.0;     // same with dt / 2
    double ratio = 0.0;        // err_dt / err_half, 16 for a fourth-order method
};

/// Open-loop plant (u = 0) from `initial` to `t_end`; the reference solution
/// uses dt / 1000.
[[nodiscard]] Rk4OrderResult rk4_order_study(const PlantParams& plant, const PlantState& initial, double t_end,
                                             double dt);

/// Scenario binding and coupling override the configuration's.
[[nodiscard]] RunConfig with_scenario(RunConfig cfg, const Scenario& scenario);

struct TrainedSurrogate {
    Dataset dataset;   // split
    TrainLog log;
    RegressionNet net;
};

/// collect -> split -> train with the configuration's settings.
[[nodiscard]] TrainedSurrogate collect_and_train(const RunConfig& cfg);

/// Rehearsal memory seeded from `training_rows` with the config's seed.
[[nodiscard]] MemoryBuffer seeded_memory(const RunConfig& cfg, std::span<const SampleRecord> training_rows);

/// Adaptive run from cfg.initial under the scenario's events.
[[nodiscard]] AdaptiveRun run_adaptive_experiment(const RunConfig& cfg, const Scenario& scenario, RegressionNet net,
                                                  MemoryBuffer memory);

struct MemoryAblationResult {
    double rmse_before = 0.0;     // pre-shift net on pre-shift held-out data
    double rmse_with_memory = 0.0;
    double rmse_without_memory = 0.0;
    double shifted_rmse_with_memory = 0.0;     // on the post-shift rows used for retraining
    double shifted_rmse_without_memory = 0.0;
    std::size_t memo_size = 0;
    std::size_t new_data_size = 0;
};

/// Trains on regime A (cfg), then retrains two copies on records from
/// regime B (`shifted`): one with the rehearsal memory drawn from A's
/// training rows, one on B alone. Both are scored on A's held-out rows.
[[nodiscard]] MemoryAblationResult memory_ablation(const RunConfig& cfg, const RunConfig& shifted);

}  // namespace chaostune
