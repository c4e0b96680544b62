#include "chaostune/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chaostune/error.hpp"

namespace chaostune {

ClfDecayResult clf_decay_study(const RunConfig& cfg, double x0) {
    ClfDecayResult out;
    const double k = cfg.loop.gains.k;
    out.horizon = 5.0 / k;
    PlantState init = cfg.initial;
    init.x = x0;
    SimOptions opts = cfg.simulation;
    opts.t_end = init.t + out.horizon + 2.0 * opts.dt;
    const Trajectory tr = simulate(init, cfg.loop, opts);
    if (tr.rows.empty()) throw Error(ErrorCode::EmptyInput, "decay study produced no samples");
    const double v0 = tr.rows.front().V;
    if (!(v0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "decay study needs V(0) > 0");
    for (const auto& r : tr.rows) {
        const double tau = r.t - init.t;
        if (tau > out.horizon + 1e-12) break;
        const double expected = v0 * std::exp(-k * tau);
        const double dev = std::abs(r.V - expected);
        out.max_normalized_dev = std::max(out.max_normalized_dev, dev / v0);
        out.max_relative_dev = std::max(out.max_relative_dev, dev / expected);
        ++out.samples;
    }
    return out;
}

namespace {

PlantState integrate_open_loop(const PlantParams& plant, PlantState s, double t_end, double dt) {
    const auto steps = static_cast<std::size_t>(std::llround((t_end - s.t) / dt));
    const double t0 = s.t;
    auto zero = [](double, double, double) { return 0.0; };
    for (std::size_t i = 0; i < steps; ++i) {
        auto next = rk4_step(s, plant, zero, dt);
        if (!next) throw Error(ErrorCode::InvalidArgument, "open-loop integration left the finite range");
        s = *next;
        s.t = t0 + static_cast<double>(i + 1) * dt;
    }
    return s;
}

double state_distance(const PlantState& a, const PlantState& b) {
    return std::hypot(a.x - b.x, a.v - b.v);
}

}  // namespace

Rk4OrderResult rk4_order_study(const PlantParams& plant, const PlantState& initial, double t_end, double dt) {
    const PlantState ref = integrate_open_loop(plant, initial, t_end, dt / 1000.0);
    Rk4OrderResult out;
    out.dt = dt;
    out.err_dt = state_distance(integrate_open_loop(plant, initial, t_end, dt), ref);
    out.err_half = state_distance(integrate_open_loop(plant, initial, t_end, dt / 2.0), ref);
    out.ratio = out.err_dt / out.err_half;
    return out;
}

RunConfig with_scenario(RunConfig cfg, const Scenario& scenario) {
    if (scenario.binding) cfg.adaptive.binding = *scenario.binding;
    if (scenario.coupling) {
        cfg.adaptive.sampler.coupling = *scenario.coupling;
        cfg.collection.sigmas.coupling = *scenario.coupling;
    }
    return cfg;
}

TrainedSurrogate collect_and_train(const RunConfig& cfg) {
    TrainedSurrogate out;
    out.dataset = split_dataset(collect_dataset(collection_spec(cfg)), cfg.collection.split_ratio, cfg.seed);
    out.net = RegressionNet(cfg.surrogate.net);
    out.log = train(out.net, out.dataset, cfg.surrogate.training);
    return out;
}

MemoryBuffer seeded_memory(const RunConfig& cfg, std::span<const SampleRecord> training_rows) {
    std::mt19937_64 rng(cfg.seed ^ 0x6d656d6fULL);
    return initial_memory(training_rows, cfg.adaptive.memory_fraction, rng);
}

AdaptiveRun run_adaptive_experiment(const RunConfig& cfg, const Scenario& scenario, RegressionNet net,
                                    MemoryBuffer memory) {
    const RunConfig c = with_scenario(cfg, scenario);
    return run_adaptive(c.initial, c.loop, c.simulation, scenario.events, std::move(net), std::move(memory),
                        c.adaptive);
}

MemoryAblationResult memory_ablation(const RunConfig& cfg, const RunConfig& shifted) {
    TrainedSurrogate base = collect_and_train(cfg);
    const auto held_out = base.dataset.test_records();
    const auto train_rows = base.dataset.train_records();

    MemoryAblationResult out;
    out.rmse_before = rmse_on(base.net, held_out);

    const Dataset shifted_data = collect_dataset(collection_spec(shifted));

    auto retrained = [&](bool use_memory, double& shifted_rmse) {
        RegressionNet net = base.net;
        MemoryBuffer buf = seeded_memory(cfg, train_rows);
        for (const auto& r : shifted_data.records) buf.record(r);
        AdaptiveConfig ac = cfg.adaptive;
        ac.use_memory = use_memory;
        ac.retrain = cfg.surrogate.training;
        std::mt19937_64 rng(cfg.seed ^ 0x7265747261696eULL);
        const RetrainReport report = retrain(net, buf, ac, rng);
        out.memo_size = report.memo_size;
        out.new_data_size = report.new_data_size;
        shifted_rmse = rmse_on(net, shifted_data.records);
        return rmse_on(net, held_out);
    };
    out.rmse_with_memory = retrained(true, out.shifted_rmse_with_memory);
    out.rmse_without_memory = retrained(false, out.shifted_rmse_without_memory);
    return out;
}

}  // namespace chaostune
