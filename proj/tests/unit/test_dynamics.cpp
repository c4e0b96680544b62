#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "chaostune/dynamics.hpp"

using namespace chaostune;

namespace {
auto no_control = [](double, double, double) { return 0.0; };
}

TEST(PlantAccel, HandEvaluatedAtUnitDisplacement) {
    // numerator -(-0.8)*1 + 3 = 3.8, mass 1 + 1.6 = 2.6 (mpmath oracle)
    const double a = plant_accel({0.0, 1.0, 0.0}, PlantParams{}, 0.0);
    EXPECT_NEAR(a, 1.4615384615384615385, 1e-15);
}

TEST(PlantAccel, AtRestOnlyForcingActs) {
    EXPECT_DOUBLE_EQ(plant_accel({0.0, 0.0, 0.0}, PlantParams{}, 0.0), 3.0);
    EXPECT_DOUBLE_EQ(plant_accel({0.0, 0.0, 0.0}, PlantParams{}, -3.0), 0.0);
}

TEST(PlantAccel, SingularMassIsRejected) {
    PlantParams p;
    p.eps1 = -1.0;
    try {
        (void)plant_accel({0.0, 1.0, 0.0}, p, 0.0);
        FAIL() << "expected SingularMass";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularMass);
    }
}

TEST(PlantAccel, DampingOpposesVelocity) {
    PlantParams p;
    p.forcing_amp = 0.0;
    p.eps1 = 0.0;
    p.eps2 = 0.0;
    EXPECT_LT(plant_accel({0.0, 0.0, 2.0}, p, 0.0), 0.0);
    EXPECT_GT(plant_accel({0.0, 0.0, -2.0}, p, 0.0), 0.0);
}

TEST(PlantParamsValidation, RejectsNonFinite) {
    PlantParams p;
    p.delta = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate(p), Error);
    EXPECT_NO_THROW(validate(PlantParams{}));
}

TEST(Rk4, RejectsNonPositiveStep) {
    EXPECT_THROW((void)rk4_step(PlantState{}, PlantParams{}, no_control, 0.0), Error);
    EXPECT_THROW((void)rk4_step(PlantState{}, PlantParams{}, no_control, -1e-3), Error);
}

TEST(Rk4, AdvancesTimeByStep) {
    const auto s = rk4_step(PlantState{0.25, 0.1, 0.0}, PlantParams{}, no_control, 1e-3);
    ASSERT_TRUE(s.has_value());
    EXPECT_DOUBLE_EQ(s->t, 0.251);
}

TEST(Rk4, ExactOnHarmonicOscillatorToFourthOrder) {
    PlantParams p{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};  // x'' = -x
    PlantState s{0.0, 1.0, 0.0};
    const double dt = 1e-2;
    for (int i = 0; i < 100; ++i) s = *rk4_step(s, p, no_control, dt);
    EXPECT_NEAR(s.x, std::cos(1.0), 1e-9);
    EXPECT_NEAR(s.v, -std::sin(1.0), 1e-9);
}

TEST(Rk4, ControlQueriedAtEveryStage) {
    int calls = 0;
    auto counting = [&](double, double, double) {
        ++calls;
        return 0.0;
    };
    (void)rk4_step(PlantState{}, PlantParams{}, counting, 1e-3);
    EXPECT_EQ(calls, 4);
}

TEST(Rk4, NonFiniteResultReportedAsNullopt) {
    PlantParams p;
    auto blowup = [](double, double, double) { return std::numeric_limits<double>::infinity(); };
    EXPECT_FALSE(rk4_step(PlantState{}, p, blowup, 1e-3).has_value());
}

TEST(Rk4, ErrorShrinksSixteenfoldWhenStepHalves) {
    PlantParams p;
    const PlantState init{0.0, 0.5, 0.0};
    auto run = [&](double dt) {
        PlantState s = init;
        const int n = static_cast<int>(std::lround(0.1 / dt));
        for (int i = 0; i < n; ++i) {
            s = *rk4_step(s, p, no_control, dt);
            s.t = (i + 1) * dt;
        }
        return s;
    };
    const PlantState ref = run(1e-5);
    const double e1 = std::hypot(run(1e-2).x - ref.x, run(1e-2).v - ref.v);
    const double e2 = std::hypot(run(5e-3).x - ref.x, run(5e-3).v - ref.v);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}
