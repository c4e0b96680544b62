#include "chaostune/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "chaostune/error.hpp"

namespace chaostune {

void validate(const AdaptiveConfig& cfg) {
    if (!(cfg.err_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "err_threshold must be > 0");
    if (cfg.window < 1) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
    if (cfg.max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_attempts must be >= 1");
    if (!(cfg.memory_fraction > 0.0 && cfg.memory_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "memory_fraction must be in (0, 1)");
    }
    if (!(cfg.sampler.low < cfg.sampler.high)) throw Error(ErrorCode::InvalidArgument, "sigma range is empty");
    if (cfg.binding.first == cfg.binding.second) throw Error(ErrorCode::UnknownTarget, "binding targets must be distinct");
}

ErrorPredictor net_predictor(const RegressionNet& net) {
    if (!net.trained()) throw Error(ErrorCode::Untrained, "supervisor needs a trained network");
    return [&net](const PredictorQuery& q) { return predict_error(net, q.t, q.x, q.v, q.s1, q.s2, q.u); };
}

Proposal propose_sigmas(const ErrorPredictor& predict, const PlantState& state, double current_err,
                        const AdaptiveConfig& cfg, std::mt19937_64& rng,
                        const std::function<double(const SigmaPair&)>& control_for) {
    if (!predict) throw Error(ErrorCode::Untrained, "no error predictor");
    Proposal best;
    best.predicted_err = std::numeric_limits<double>::infinity();
    for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        const SigmaPair cand = sample_sigmas(cfg.sampler, rng);
        const double u = control_for ? control_for(cand) : 0.0;
        const double pred = predict({state.t, state.x, state.v, cand.s1, cand.s2, u});
        if (pred < current_err) return {true, cand, pred, attempt};
        if (pred < best.predicted_err || attempt == 1) {
            best.pair = cand;
            best.predicted_err = pred;
        }
    }
    best.accepted = false;
    best.attempts = cfg.max_attempts;
    return best;
}

// ---------------------------------------------------------------------------
// Memory

double MemoryBuffer::window_average() const noexcept {
    return window_count == 0 ? 0.0 : avg_sys_err / static_cast<double>(window_count);
}

void MemoryBuffer::record(const SampleRecord& rec) {
    new_data.push_back(rec);
    avg_sys_err += rec.err;
    ++window_count;
}

void MemoryBuffer::clear_window() noexcept {
    new_data.clear();
    avg_sys_err = 0.0;
    window_count = 0;
}

namespace {

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(k, n));
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::size_t memory_share(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

}  // namespace

MemoryBuffer initial_memory(std::span<const SampleRecord> training_rows, double fraction, std::mt19937_64& rng) {
    MemoryBuffer buf;
    if (training_rows.empty()) return buf;
    for (auto i : sample_indices(training_rows.size(), memory_share(training_rows.size(), fraction), rng)) {
        buf.memo.push_back(training_rows[i]);
    }
    double sum = 0.0;
    for (const auto& r : training_rows) sum += r.err;
    buf.prev_sys_avg = sum / static_cast<double>(training_rows.size());
    return buf;
}

RetrainDecision window_probe(const MemoryBuffer& buf, const AdaptiveConfig&) {
    return buf.window_average() > buf.prev_sys_avg ? RetrainDecision::Retrain : RetrainDecision::NoRetrain;
}

RetrainReport retrain(RegressionNet& net, MemoryBuffer& buf, const AdaptiveConfig& cfg, std::mt19937_64& rng) {
    std::vector<SampleRecord> data;
    if (cfg.use_memory) data = buf.memo;
    data.insert(data.end(), buf.new_data.begin(), buf.new_data.end());
    if (data.empty()) throw Error(ErrorCode::EmptyDataset, "retrain with empty memory and no new data");

    RetrainReport report;
    report.memo_size = buf.memo.size();
    report.new_data_size = buf.new_data.size();
    report.window_average = buf.window_average();

    TrainOptions opts = cfg.retrain;
    opts.fit_standardizer = !net.trained();
    opts.seed = rng();
    if (data.size() >= 2) {
        (void)train(net, data, {}, opts);
        report.post_rmse = rmse_on(net, data);
    } else {
        report.post_rmse = net.trained() ? rmse_on(net, data) : std::numeric_limits<double>::quiet_NaN();
    }

    if (cfg.use_memory) {
        for (auto i : sample_indices(buf.new_data.size(), memory_share(buf.new_data.size(), cfg.memory_fraction), rng)) {
            buf.memo.push_back(buf.new_data[i]);
        }
    }
    buf.prev_sys_avg = report.window_average;
    buf.clear_window();
    return report;
}

// ---------------------------------------------------------------------------
// Event log

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::SigmaUpdate: return "SigmaUpdate";
        case EventKind::NoImprovement: return "NoImprovement";
        case EventKind::Retrain: return "Retrain";
        case EventKind::Scenario: return "Scenario";
    }
    return "SigmaUpdate";
}

EventKind parse_event_kind(std::string_view text) {
    for (auto k : {EventKind::SigmaUpdate, EventKind::NoImprovement, EventKind::Retrain, EventKind::Scenario}) {
        if (to_string(k) == text) return k;
    }
    throw Error(ErrorCode::ParseFailure, "unknown event kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Supervised run

AdaptiveRun run_adaptive(const PlantState& initial, const ClosedLoop& loop, const SimOptions& options,
                         const std::vector<ScenarioEvent>& events, RegressionNet net, MemoryBuffer buffer,
                         const AdaptiveConfig& cfg) {
    validate(cfg);
    if (!net.trained()) throw Error(ErrorCode::Untrained, "run_adaptive needs a trained network");

    std::mt19937_64 sampler_rng(cfg.seed);
    std::mt19937_64 memory_rng(cfg.seed ^ 0xD1B54A32D192ED03ULL);
    Simulator sim(initial, loop, options, events, cfg.binding);
    EventLog log;
    const bool wants_u = net.config().input_dim > 5;
    double prev_abs_err = std::numeric_limits<double>::quiet_NaN();

    while (!sim.done()) {
        for ([[maybe_unused]] const auto& fired : sim.apply_due_events()) {
            const SigmaPair now = read_sigmas(sim.loop(), cfg.binding);
            EventLogRow row;
            row.t = sim.state().t;
            row.kind = EventKind::Scenario;
            row.s1 = now.s1;
            row.s2 = now.s2;
            log.push_back(row);
        }

        const PlantState state = sim.state();
        const double abs_err = std::abs(sim.current_error().e);
        bool triggered = abs_err > cfg.err_threshold;
        if (triggered && cfg.trigger == TriggerMode::Slope) triggered = !(abs_err <= prev_abs_err);
        prev_abs_err = abs_err;

        if (triggered) {
            const ClosedLoop current = sim.loop();
            std::function<double(const SigmaPair&)> control_for;
            if (wants_u) {
                control_for = [&](const SigmaPair& cand) {
                    const ClosedLoop trial = apply_sigmas(current, cand, cfg.binding);
                    return control_law(state, reference_eval(trial.reference, state.t), trial.gains, trial.model);
                };
            }
            const Proposal prop = propose_sigmas(net_predictor(net), state, abs_err, cfg, sampler_rng, control_for);
            EventLogRow row;
            row.t = state.t;
            row.kind = prop.accepted ? EventKind::SigmaUpdate : EventKind::NoImprovement;
            row.s1 = prop.pair.s1;
            row.s2 = prop.pair.s2;
            row.predicted_err = prop.predicted_err;
            row.measured_err = abs_err;
            row.attempts = prop.attempts;
            log.push_back(row);
            if (prop.accepted) sim.set_loop(apply_sigmas(current, prop.pair, cfg.binding));
        }

        sim.step();
        const auto& last = sim.trajectory().rows.back();
        if (!std::isfinite(last.x) || !std::isfinite(last.v)) break;
        buffer.record({last.t, last.x, last.v, last.u, last.s1, last.s2,
                       std::min(std::abs(last.e), options.divergence_bound)});

        if (buffer.window_count >= cfg.window) {
            if (window_probe(buffer, cfg) == RetrainDecision::Retrain) {
                const RetrainReport rep = retrain(net, buffer, cfg, memory_rng);
                const SigmaPair now = read_sigmas(sim.loop(), cfg.binding);
                EventLogRow row;
                row.t = last.t;
                row.kind = EventKind::Retrain;
                row.s1 = now.s1;
                row.s2 = now.s2;
                row.measured_err = rep.window_average;
                row.memo_size = rep.memo_size;
                row.new_data_size = rep.new_data_size;
                row.post_rmse = rep.post_rmse;
                log.push_back(row);
            } else {
                buffer.clear_window();
            }
        }
    }
    return {std::move(sim).take_trajectory(), std::move(log), std::move(buffer), std::move(net)};
}

}  // namespace chaostune
