#include <gtest/gtest.h>

#include <cmath>

#include "chaostune/simulation.hpp"

using namespace chaostune;

TEST(Simulate, BaselineCompletesWith2500Rows) {
    const Trajectory tr = simulate({}, ClosedLoop{}, SimOptions{});
    EXPECT_EQ(tr.status, RunStatus::Completed);
    EXPECT_EQ(tr.rows.size(), 2500u);
    EXPECT_FALSE(tr.divergence_time.has_value());
    EXPECT_DOUBLE_EQ(tr.rows.front().t, 0.0);
    EXPECT_NEAR(tr.rows.back().t, 2.499, 1e-12);
}

TEST(Simulate, RowsAreSelfConsistent) {
    const ClosedLoop loop;
    const Trajectory tr = simulate({0.0, 0.2, 0.0}, loop, SimOptions{});
    for (std::size_t i = 0; i < tr.rows.size(); i += 97) {
        const auto& r = tr.rows[i];
        const RefEval ref = reference_eval(loop.reference, r.t);
        EXPECT_DOUBLE_EQ(r.qd, ref.qd);
        EXPECT_DOUBLE_EQ(r.e, ref.qd - r.x);
        EXPECT_DOUBLE_EQ(r.V, clf_value(r.e, ref.qd_dot - r.v, loop.gains));
        EXPECT_DOUBLE_EQ(r.u, control_law({r.t, r.x, r.v}, ref, loop.gains, loop.model));
        EXPECT_EQ(r.s1, loop.gains.gamma1);
        EXPECT_EQ(r.s2, loop.gains.gamma2);
    }
}

TEST(Simulate, Deterministic) {
    const std::vector<ScenarioEvent> ev{{0.3, ImpulseVelocity{1.0}}, {0.6, AdditiveDisturbance{2.0, 5.0, 0.2}}};
    EXPECT_EQ(simulate({}, ClosedLoop{}, SimOptions{}, ev), simulate({}, ClosedLoop{}, SimOptions{}, ev));
}

TEST(Simulate, UnfitModelSigmasDivergeEarly) {
    const std::vector<ScenarioEvent> ev{{0.0, SetSigmas{{100.0, 0.6}}}};
    const Trajectory tr = simulate({}, ClosedLoop{}, SimOptions{}, ev, SigmaBinding::parse("model.eps1,model.eps2"));
    EXPECT_EQ(tr.status, RunStatus::Diverged);
    ASSERT_TRUE(tr.divergence_time.has_value());
    EXPECT_LT(*tr.divergence_time, 0.5);
    EXPECT_EQ(tr.rows.back().t, *tr.divergence_time);
    EXPECT_TRUE(!std::isfinite(tr.rows.back().x) || std::abs(tr.rows.back().x) > 100.0);
}

TEST(Simulate, SameSigmasOnGainsStayStable) {
    // Poles -k/2 and -gamma2/gamma1 are both stable for (100, 0.6).
    const std::vector<ScenarioEvent> ev{{0.0, SetSigmas{{100.0, 0.6}}}};
    const Trajectory tr = simulate({}, ClosedLoop{}, SimOptions{}, ev);
    EXPECT_EQ(tr.status, RunStatus::Completed);
}

TEST(Simulate, EventsFireOnceAtFirstStepAtOrAfterTheirTime) {
    ClosedLoop loop;
    Simulator sim({}, loop, SimOptions{}, {{0.0105, SetControllerGains{std::nullopt, std::nullopt, 50.0}}});
    std::size_t fired_at = 0;
    int fired = 0;
    while (!sim.done()) {
        const auto ev = sim.apply_due_events();
        if (!ev.empty()) {
            fired += static_cast<int>(ev.size());
            fired_at = sim.step_index();
        }
        sim.step();
    }
    EXPECT_EQ(fired, 1);
    EXPECT_EQ(fired_at, 11u);
    EXPECT_EQ(sim.loop().gains.k, 50.0);
}

TEST(Simulate, PlantOverwriteLeavesModel) {
    Simulator sim({}, ClosedLoop{}, SimOptions{}, {{0.0, SetPlantParams{std::nullopt, 3.0}}});
    sim.step();
    EXPECT_EQ(sim.loop().plant.eps1, 3.0);
    EXPECT_EQ(sim.loop().model.eps1, 1.6);
}

TEST(Simulate, ImpulseChangesVelocity) {
    SimOptions o;
    o.t_end = 0.003;
    const Trajectory a = simulate({}, ClosedLoop{}, o);
    const Trajectory b = simulate({}, ClosedLoop{}, o, {{0.001, ImpulseVelocity{2.0}}});
    EXPECT_EQ(a.rows[0], b.rows[0]);
    EXPECT_NEAR(b.rows[1].v - a.rows[1].v, 2.0, 1e-12);
}

TEST(Simulate, ActuatorScaleZeroRemovesControl) {
    SimOptions o;
    o.t_end = 0.5;
    ClosedLoop loop;
    const Trajectory scaled = simulate({}, loop, o, {{0.0, ActuatorScale{0.0}}});
    PlantState s{};
    auto zero = [](double, double, double) { return 0.0; };
    for (int i = 0; i < 500; ++i) {
        s = *rk4_step(s, loop.plant, zero, 1e-3);
        s.t = (i + 1) * 1e-3;
    }
    EXPECT_NEAR(scaled.rows.back().x, s.x, 0.05);
}

TEST(Simulate, RejectsBadOptions) {
    SimOptions o;
    o.dt = 0.0;
    EXPECT_THROW((void)simulate({}, ClosedLoop{}, o), Error);
}

TEST(RunStatusText, RoundTrip) {
    for (auto s : {RunStatus::Running, RunStatus::Completed, RunStatus::Diverged}) {
        EXPECT_EQ(parse_run_status(to_string(s)), s);
    }
    EXPECT_THROW((void)parse_run_status("exploded"), Error);
}
