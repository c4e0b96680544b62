#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "chaostune/adaptive.hpp"
#include "chaostune/simulation.hpp"
#include "chaostune/surrogate.hpp"

using namespace chaostune;

namespace {

std::vector<SampleRecord> synthetic_rows(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0, 2.5), s(-50, 50), x(-1.5, 1.5);
    std::vector<SampleRecord> rows(n);
    for (auto& r : rows) {
        r.t = t(rng);
        r.x = x(rng);
        r.v = x(rng);
        r.s1 = s(rng);
        r.s2 = s(rng);
        r.err = std::abs(r.x - std::sin(r.t));
    }
    return rows;
}

const RegressionNet& trained_net() {
    static const RegressionNet net = [] {
        RegressionNet n;
        TrainOptions o;
        o.epochs = 1;
        const auto rows = synthetic_rows(2000);
        (void)train(n, rows, {}, o);
        return n;
    }();
    return net;
}

void BM_Rk4Step(benchmark::State& state) {
    const PlantParams p;
    PlantState s{0.0, 0.5, 0.0};
    auto u = [](double, double, double) { return 0.1; };
    for (auto _ : state) {
        auto next = rk4_step(s, p, u, 1e-3);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_Rk4Step);

void BM_SimulateBaseline(benchmark::State& state) {
    SimOptions o;
    o.t_end = static_cast<double>(state.range(0));
    for (auto _ : state) {
        Trajectory tr = simulate({}, ClosedLoop{}, o);
        benchmark::DoNotOptimize(tr.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(o.t_end / o.dt));
}
BENCHMARK(BM_SimulateBaseline)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_PredictError(benchmark::State& state) {
    const RegressionNet& net = trained_net();
    for (auto _ : state) benchmark::DoNotOptimize(predict_error(net, 1.0, 0.2, 0.1, 3.0, -4.0));
}
BENCHMARK(BM_PredictError);

void BM_TrainEpoch(benchmark::State& state) {
    const auto rows = synthetic_rows(static_cast<std::size_t>(state.range(0)));
    TrainOptions o;
    o.epochs = 1;
    for (auto _ : state) {
        RegressionNet net;
        benchmark::DoNotOptimize(train(net, rows, {}, o));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ProposeSigmas(benchmark::State& state) {
    const ErrorPredictor predict = net_predictor(trained_net());
    AdaptiveConfig cfg;
    std::mt19937_64 rng(3);
    const PlantState s{1.0, 0.2, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(propose_sigmas(predict, s, 0.0, cfg, rng));
    // current_err 0 forces the full max_attempts search
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.max_attempts));
}
BENCHMARK(BM_ProposeSigmas)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
