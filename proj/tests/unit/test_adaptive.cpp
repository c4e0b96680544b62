#include <algorithm>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chaostune/adaptive.hpp"
#include "chaostune/error.hpp"

using namespace chaostune;

namespace {

std::vector<SampleRecord> records_with_err(std::size_t n, double err) {
    std::vector<SampleRecord> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = {i * 1e-3, 0.1, 0.0, 0.0, 12.0, 4.0, err};
    return r;
}

// Small net trained on short baseline-like episodes; enough for the loop mechanics.
const RegressionNet& small_trained_net() {
    static const RegressionNet net = [] {
        CollectionSpec spec;
        spec.episodes = 4;
        spec.options.t_end = 0.5;
        spec.seed = 3;
        const Dataset ds = collect_dataset(spec);
        NetConfig c;
        c.hidden_width = 8;
        RegressionNet n(c);
        TrainOptions o;
        o.epochs = 1;
        (void)train(n, ds.records, {}, o);
        return n;
    }();
    return net;
}

}  // namespace

TEST(Propose, ImmediateAcceptanceQueriesOnce) {
    int queries = 0;
    ErrorPredictor zero = [&](const PredictorQuery&) {
        ++queries;
        return 0.0;
    };
    std::mt19937_64 rng(1);
    const Proposal p = propose_sigmas(zero, PlantState{}, 0.9, AdaptiveConfig{}, rng);
    EXPECT_TRUE(p.accepted);
    EXPECT_EQ(p.attempts, 1u);
    EXPECT_EQ(queries, 1);
}

TEST(Propose, ExhaustionReturnsBestCandidate) {
    int queries = 0;
    double lowest = 1e9;
    SigmaPair lowest_pair;
    ErrorPredictor worse = [&](const PredictorQuery& q) {
        ++queries;
        const double v = 1.9 + std::abs(q.s1) * 1e-3;
        if (v < lowest) {
            lowest = v;
            lowest_pair = {q.s1, q.s2};
        }
        return v;
    };
    AdaptiveConfig cfg;
    cfg.max_attempts = 37;
    std::mt19937_64 rng(2);
    const Proposal p = propose_sigmas(worse, PlantState{}, 0.9, cfg, rng);
    EXPECT_FALSE(p.accepted);
    EXPECT_EQ(queries, 37);
    EXPECT_EQ(p.attempts, 37u);
    EXPECT_EQ(p.pair, lowest_pair);
    EXPECT_EQ(p.predicted_err, lowest);
}

TEST(Propose, CandidatesFollowSamplerAndQueryCurrentState) {
    ErrorPredictor check = [&](const PredictorQuery& q) {
        EXPECT_EQ(q.t, 0.5);
        EXPECT_EQ(q.x, 0.25);
        EXPECT_EQ(q.v, -1.0);
        EXPECT_EQ(q.s2, -q.s1 / 8.0);
        EXPECT_LE(std::abs(q.s1), 50.0);
        return 10.0;
    };
    std::mt19937_64 rng(3);
    (void)propose_sigmas(check, PlantState{0.5, 0.25, -1.0}, 1.0, AdaptiveConfig{}, rng);
    EXPECT_THROW((void)propose_sigmas(ErrorPredictor{}, PlantState{}, 1.0, AdaptiveConfig{}, rng), Error);
}

TEST(Probe, StrictComparison) {
    AdaptiveConfig cfg;
    MemoryBuffer buf;
    buf.prev_sys_avg = 0.1;
    for (const auto& r : records_with_err(100, 0.0)) buf.record(r);
    EXPECT_EQ(window_probe(buf, cfg), RetrainDecision::NoRetrain);
    buf.clear_window();
    buf.prev_sys_avg = 0.2;
    for (const auto& r : records_with_err(100, 0.5)) buf.record(r);
    EXPECT_EQ(window_probe(buf, cfg), RetrainDecision::Retrain);
    buf.clear_window();
    buf.prev_sys_avg = 0.5;
    for (const auto& r : records_with_err(4, 0.5)) buf.record(r);
    EXPECT_EQ(window_probe(buf, cfg), RetrainDecision::NoRetrain);
}

TEST(Memory, InitialShareAndBaseline) {
    auto rows = records_with_err(95, 0.2);
    rows[0].err = 2.2;  // mean = (94*0.2 + 2.2)/95
    std::mt19937_64 rng(4);
    const MemoryBuffer buf = initial_memory(rows, 0.1, rng);
    EXPECT_EQ(buf.memo.size(), 10u);
    EXPECT_NEAR(buf.prev_sys_avg, (94 * 0.2 + 2.2) / 95.0, 1e-15);
    EXPECT_TRUE(buf.new_data.empty());
}

TEST(Retrain, MemoryGrowsByCeilTenPercent) {
    RegressionNet net = small_trained_net();
    MemoryBuffer buf;
    buf.memo = records_with_err(100, 0.1);
    for (const auto& r : records_with_err(50, 0.3)) buf.record(r);
    AdaptiveConfig cfg;
    cfg.retrain.epochs = 1;
    std::mt19937_64 rng(5);
    const RetrainReport rep = retrain(net, buf, cfg, rng);
    EXPECT_EQ(rep.memo_size, 100u);
    EXPECT_EQ(rep.new_data_size, 50u);
    EXPECT_EQ(buf.memo.size(), 105u);
    EXPECT_TRUE(buf.new_data.empty());
    EXPECT_EQ(buf.avg_sys_err, 0.0);
    EXPECT_EQ(buf.window_count, 0u);
    EXPECT_NEAR(buf.prev_sys_avg, 0.3, 1e-12);
    EXPECT_TRUE(std::isfinite(rep.post_rmse));
}

TEST(Retrain, EmptyIsAnError) {
    RegressionNet net = small_trained_net();
    MemoryBuffer buf;
    std::mt19937_64 rng(6);
    try {
        (void)retrain(net, buf, AdaptiveConfig{}, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
    }
}

TEST(Retrain, SameDistributionDoesNotDegradeMoreThanTwofold) {
    CollectionSpec spec;
    spec.episodes = 10;
    spec.seed = 8;
    const Dataset ds = split_dataset(collect_dataset(spec), 0.6, 8);
    RegressionNet net;
    (void)train(net, ds, TrainOptions{});
    const auto held = ds.test_records();
    const double before = rmse_on(net, held);

    spec.seed = 9;
    spec.episodes = 1;
    const Dataset fresh = collect_dataset(spec);
    std::mt19937_64 rng(10);
    MemoryBuffer buf = initial_memory(ds.train_records(), 0.1, rng);
    for (const auto& r : fresh.records) buf.record(r);
    (void)retrain(net, buf, AdaptiveConfig{}, rng);
    EXPECT_LE(rmse_on(net, held), 2.0 * before);
}

TEST(AdaptiveConfigValidation, RejectsBadValues) {
    AdaptiveConfig c;
    c.err_threshold = 0.0;
    EXPECT_THROW(validate(c), Error);
    c = {};
    c.window = 0;
    EXPECT_THROW(validate(c), Error);
    c = {};
    c.memory_fraction = 1.0;
    EXPECT_THROW(validate(c), Error);
    EXPECT_NO_THROW(validate(AdaptiveConfig{}));
}

TEST(EventKinds, TextRoundTrip) {
    for (auto k : {EventKind::SigmaUpdate, EventKind::NoImprovement, EventKind::Retrain, EventKind::Scenario}) {
        EXPECT_EQ(parse_event_kind(to_string(k)), k);
    }
    EXPECT_THROW((void)parse_event_kind("Boom"), Error);
}

TEST(RunAdaptive, DormantMonitorReproducesPlainSimulation) {
    const ClosedLoop loop;
    SimOptions o;
    o.t_end = 1.0;
    AdaptiveConfig cfg;
    cfg.retrain.epochs = 1;
    MemoryBuffer buf;
    buf.prev_sys_avg = 10.0;  // never retrain
    const AdaptiveRun run = run_adaptive({}, loop, o, {}, small_trained_net(), buf, cfg);
    EXPECT_EQ(run.trajectory, simulate({}, loop, o));
    EXPECT_TRUE(run.events.empty());
}

TEST(RunAdaptive, RetrainingAloneDoesNotPerturbTheTrajectory) {
    const ClosedLoop loop;
    SimOptions o;
    o.t_end = 0.5;
    AdaptiveConfig cfg;
    cfg.retrain.epochs = 1;
    MemoryBuffer buf;
    buf.memo = records_with_err(20, 0.05);
    buf.prev_sys_avg = 0.0;  // the first probe always retrains
    const AdaptiveRun run = run_adaptive({}, loop, o, {}, small_trained_net(), buf, cfg);
    EXPECT_EQ(run.trajectory, simulate({}, loop, o));
    std::size_t memo = 20;
    double prev = 0.0;
    int retrains = 0;
    for (const auto& e : run.events) {
        ASSERT_EQ(e.kind, EventKind::Retrain);
        EXPECT_EQ(*e.memo_size, memo);
        EXPECT_EQ(*e.new_data_size, 100u);
        // Each retrain raises the bar to its own window average.
        EXPECT_GT(*e.measured_err, prev);
        prev = *e.measured_err;
        memo += 10;
        ++retrains;
    }
    EXPECT_GE(retrains, 1);
    EXPECT_EQ(run.buffer.memo.size(), memo);
}

TEST(RunAdaptive, GatedUpdatesAndDeterminism) {
    const ClosedLoop loop;
    SimOptions o;
    o.t_end = 0.6;
    AdaptiveConfig cfg;
    cfg.retrain.epochs = 1;
    cfg.seed = 17;
    cfg.sampler.coupling = Coupling::parse("uncoupled");
    MemoryBuffer buf;
    buf.prev_sys_avg = 0.05;
    const std::vector<ScenarioEvent> ev{{0.2, SetSigmas{{1.0, -40.0}}}};
    const AdaptiveRun a = run_adaptive({}, loop, o, ev, small_trained_net(), buf, cfg);
    const AdaptiveRun b = run_adaptive({}, loop, o, ev, small_trained_net(), buf, cfg);
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.trajectory, b.trajectory);
    int triggered = 0;
    for (const auto& e : a.events) {
        if (e.kind == EventKind::SigmaUpdate) {
            ++triggered;
            EXPECT_LT(*e.predicted_err, *e.measured_err);
            EXPECT_GT(*e.measured_err, cfg.err_threshold);
        }
        if (e.kind == EventKind::NoImprovement) {
            ++triggered;
            EXPECT_GE(*e.predicted_err, *e.measured_err);
        }
    }
    EXPECT_GT(triggered, 0);
    const auto sc = std::find_if(a.events.begin(), a.events.end(),
                                 [](const EventLogRow& e) { return e.kind == EventKind::Scenario; });
    ASSERT_NE(sc, a.events.end());
    EXPECT_NEAR(sc->t, 0.2, 1e-12);
    EXPECT_EQ(sc->s2, -40.0);
}

TEST(RunAdaptive, RequiresTrainedNet) {
    EXPECT_THROW((void)run_adaptive({}, ClosedLoop{}, SimOptions{}, {}, RegressionNet{}, MemoryBuffer{}, AdaptiveConfig{}),
                 Error);
}
