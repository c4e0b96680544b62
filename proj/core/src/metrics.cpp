#include "chaostune/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "chaostune/error.hpp"

namespace chaostune {

RunMetrics compute_metrics(const Trajectory& trajectory, const MetricOptions& opts) {
    if (trajectory.rows.empty()) throw Error(ErrorCode::EmptyInput, "trajectory has no rows");
    RunMetrics m;
    m.transient = opts.transient;
    m.diverged = trajectory.status == RunStatus::Diverged;
    m.divergence_time = trajectory.divergence_time;

    double sq = 0.0;
    double window_sum = 0.0;
    std::size_t in_window = 0;
    for (const auto& r : trajectory.rows) {
        if (!std::isfinite(r.e)) continue;
        const double a = std::abs(r.e);
        sq += r.e * r.e;
        ++m.count;
        m.max_abs_err = std::max(m.max_abs_err, a);
        if (r.t > opts.transient) m.max_abs_err_after = std::max(m.max_abs_err_after.value_or(0.0), a);
        window_sum += a;
        if (opts.window > 0 && ++in_window == opts.window) {
            m.window_averages.push_back(window_sum / static_cast<double>(opts.window));
            window_sum = 0.0;
            in_window = 0;
        }
    }
    if (m.count == 0) throw Error(ErrorCode::EmptyInput, "trajectory has no finite rows");
    m.rmse = std::sqrt(sq / static_cast<double>(m.count));
    return m;
}

RunMetrics compute_metrics(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction/target length mismatch");
    }
    if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
    RunMetrics m;
    double sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        sq += r * r;
        m.max_abs_err = std::max(m.max_abs_err, std::abs(r));
    }
    m.count = predictions.size();
    m.rmse = std::sqrt(sq / static_cast<double>(m.count));
    return m;
}

}  // namespace chaostune
