#pragma once

// Online sigma retuning.
//
// Every control step the supervisor compares the measured tracking error
// with a threshold. Above it, random sigma pairs are screened through the
// error-prediction network and the first pair predicted to do better than
// the measured error is written into the loop. Every `window` steps the
// window-average error is compared with the previous baseline; if it got
// worse the network is retrained on the rehearsal memory plus the window's
// records, and a slice of the window is added to the memory.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "chaostune/dataset.hpp"
#include "chaostune/sampling.hpp"
#include "chaostune/simulation.hpp"
#include "chaostune/surrogate.hpp"

namespace chaostune {

enum class TriggerMode {
    Level,  // |e| > threshold
    Slope,  // |e| > threshold and |e| increased since the previous step
};

struct AdaptiveConfig {
    double err_threshold = 0.8;
    std::size_t window = 100;
    std::size_t max_attempts = 200;
    double memory_fraction = 0.10;
    std::uint64_t seed = 0;
    SamplerConfig sampler;
    SigmaBinding binding;
    TriggerMode trigger = TriggerMode::Level;
    bool use_memory = true;
    TrainOptions retrain;
};

void validate(const AdaptiveConfig& cfg);

struct PredictorQuery {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double u = 0.0;
};

using ErrorPredictor = std::function<double(const PredictorQuery&)>;

/// Wraps a trained network; throws Untrained otherwise.
[[nodiscard]] ErrorPredictor net_predictor(const RegressionNet& net);

struct Proposal {
    bool accepted = false;      // false: NoImprovement, `pair` is the best candidate seen
    SigmaPair pair;
    double predicted_err = 0.0;
    std::size_t attempts = 0;
};

/// Samples candidates until one is predicted below `current_err` or
/// max_attempts is exhausted. `control_for`, when set, supplies the control
/// signal a candidate would produce (for networks that take u as input).
[[nodiscard]] Proposal propose_sigmas(const ErrorPredictor& predict, const PlantState& state, double current_err,
                                      const AdaptiveConfig& cfg, std::mt19937_64& rng,
                                      const std::function<double(const SigmaPair&)>& control_for = {});

struct MemoryBuffer {
    std::vector<SampleRecord> memo;
    std::vector<SampleRecord> new_data;  // records since the last probe
    double prev_sys_avg = 0.0;
    double avg_sys_err = 0.0;            // running sum over the current window
    std::size_t window_count = 0;

    [[nodiscard]] double window_average() const noexcept;
    void record(const SampleRecord& rec);
    void clear_window() noexcept;
};

/// Memo = uniformly sampled ceil(fraction * N) of the training rows;
/// prev_sys_avg = their mean error.
[[nodiscard]] MemoryBuffer initial_memory(std::span<const SampleRecord> training_rows, double fraction,
                                          std::mt19937_64& rng);

enum class RetrainDecision { NoRetrain, Retrain };

/// Retrain iff the window average is strictly above prev_sys_avg.
[[nodiscard]] RetrainDecision window_probe(const MemoryBuffer& buf, const AdaptiveConfig& cfg);

struct RetrainReport {
    std::size_t memo_size = 0;       // before the update
    std::size_t new_data_size = 0;
    double post_rmse = 0.0;          // on the retraining set
    double window_average = 0.0;
};

/// Retrains on memo + new_data (or new_data alone when use_memory is off),
/// then appends ceil(memory_fraction * |new_data|) uniformly chosen new
/// records to memo, clears the window and sets prev_sys_avg to the window
/// average. Throws EmptyDataset when there is nothing to train on.
RetrainReport retrain(RegressionNet& net, MemoryBuffer& buf, const AdaptiveConfig& cfg, std::mt19937_64& rng);

enum class EventKind { SigmaUpdate, NoImprovement, Retrain, Scenario };

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;
[[nodiscard]] EventKind parse_event_kind(std::string_view text);

struct EventLogRow {
    double t = 0.0;
    EventKind kind = EventKind::SigmaUpdate;
    double s1 = 0.0;
    double s2 = 0.0;
    std::optional<double> predicted_err;
    std::optional<double> measured_err;
    std::optional<std::size_t> attempts;
    std::optional<std::size_t> memo_size;
    std::optional<std::size_t> new_data_size;
    std::optional<double> post_rmse;

    bool operator==(const EventLogRow&) const = default;
};

using EventLog = std::vector<EventLogRow>;

struct AdaptiveRun {
    Trajectory trajectory;
    EventLog events;
    MemoryBuffer buffer;
    RegressionNet net;
};

/// Closed-loop simulation supervised by the retuning algorithm.
[[nodiscard]] AdaptiveRun run_adaptive(const PlantState& initial, const ClosedLoop& loop, const SimOptions& options,
                                       const std::vector<ScenarioEvent>& events, RegressionNet net,
                                       MemoryBuffer buffer, const AdaptiveConfig& cfg);

}  // namespace chaostune
