#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chaostune/simulation.hpp"

namespace chaostune {

struct RunMetrics {
    std::size_t count = 0;
    double rmse = 0.0;
    double max_abs_err = 0.0;                  // over every sample
    double transient = 0.0;
    std::optional<double> max_abs_err_after;   // over samples with t > transient
    std::vector<double> window_averages;       // mean |err| per full window
    bool diverged = false;
    std::optional<double> divergence_time;
};

struct MetricOptions {
    double transient = 0.5;
    std::size_t window = 100;
};

/// Tracking metrics of a trajectory (err = e). Throws EmptyInput.
[[nodiscard]] RunMetrics compute_metrics(const Trajectory& trajectory, const MetricOptions& opts = {});

/// Prediction metrics: rmse and max |residual|. Throws EmptyInput or DimensionMismatch.
[[nodiscard]] RunMetrics compute_metrics(std::span<const double> predictions, std::span<const double> targets);

}  // namespace chaostune
