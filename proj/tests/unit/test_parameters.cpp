#include <gtest/gtest.h>

#include <random>

#include "chaostune/error.hpp"
#include "chaostune/parameters.hpp"
#include "chaostune/sampling.hpp"

using namespace chaostune;

TEST(Targets, NamesRoundTrip) {
    for (const char* n : {"gamma1", "gamma2", "k", "delta", "eps1", "eps2", "forcing_amp", "forcing_freq",
                          "lin_stiffness", "model.delta", "model.eps1", "model.eps2", "model.forcing_amp",
                          "model.forcing_freq", "model.lin_stiffness"}) {
        EXPECT_EQ(target_name(parse_target(n)), n);
    }
    try {
        (void)parse_target("gamma3");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownTarget);
    }
}

TEST(Binding, ParseRejectsRepeatsAndUnknowns) {
    EXPECT_EQ(SigmaBinding::parse("gamma1,gamma2"), SigmaBinding{});
    EXPECT_EQ(SigmaBinding::parse(" delta , eps2 ").to_string(), "delta,eps2");
    EXPECT_THROW((void)SigmaBinding::parse("gamma1,gamma1"), Error);
    EXPECT_THROW((void)SigmaBinding::parse("gamma1"), Error);
    EXPECT_THROW((void)SigmaBinding::parse("gamma1,bogus"), Error);
}

TEST(ApplySigmas, DefaultBindingOverwritesGainsOnly) {
    const ClosedLoop loop;
    const ClosedLoop out = apply_sigmas(loop, {16.0, -2.0}, SigmaBinding{});
    EXPECT_EQ(out.gains.gamma1, 16.0);
    EXPECT_EQ(out.gains.gamma2, -2.0);
    EXPECT_EQ(out.gains.k, loop.gains.k);
    EXPECT_EQ(out.plant, loop.plant);
    EXPECT_EQ(out.model, loop.model);
}

TEST(ApplySigmas, PlantBindingLeavesControllerAlone) {
    const ClosedLoop loop;
    const ClosedLoop out = apply_sigmas(loop, {0.7, -1.1}, SigmaBinding::parse("delta,eps2"));
    EXPECT_EQ(out.plant.delta, 0.7);
    EXPECT_EQ(out.plant.eps2, -1.1);
    EXPECT_EQ(out.gains, loop.gains);
    EXPECT_EQ(out.model, loop.model);
    EXPECT_EQ(read_sigmas(out, SigmaBinding::parse("delta,eps2")), (SigmaPair{0.7, -1.1}));
}

TEST(Coupling, Parse) {
    EXPECT_TRUE(Coupling::parse("uncoupled").uncoupled);
    EXPECT_EQ(Coupling::parse("-1/8").ratio, -0.125);
    EXPECT_EQ(Coupling::parse("0.5").ratio, 0.5);
    EXPECT_THROW((void)Coupling::parse("1/0"), Error);
    EXPECT_THROW((void)Coupling::parse("abc"), Error);
    EXPECT_EQ(Coupling::parse(Coupling{}.to_string()), Coupling{});
}

TEST(Sampler, CoupledDrawsStayInRangeWithExactRatio) {
    std::mt19937_64 rng(1234);
    const SamplerConfig cfg;
    double sum = 0.0, lo = 1e9, hi = -1e9;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const SigmaPair p = sample_sigmas(cfg, rng);
        ASSERT_GE(p.s1, -50.0);
        ASSERT_LE(p.s1, 50.0);
        ASSERT_EQ(p.s2, -p.s1 / 8.0);
        sum += p.s1;
        lo = std::min(lo, p.s1);
        hi = std::max(hi, p.s1);
    }
    EXPECT_NEAR(sum / n, 0.0, 0.5);
    EXPECT_LT(lo, -45.0);
    EXPECT_GT(hi, 45.0);
}

TEST(Sampler, UncoupledDrawsAreIndependent) {
    std::mt19937_64 rng(9);
    SamplerConfig cfg;
    cfg.coupling = Coupling::parse("uncoupled");
    int differs = 0;
    for (int i = 0; i < 1000; ++i) {
        const SigmaPair p = sample_sigmas(cfg, rng);
        EXPECT_GE(p.s2, -50.0);
        EXPECT_LE(p.s2, 50.0);
        differs += p.s2 != -p.s1 / 8.0;
    }
    EXPECT_EQ(differs, 1000);
}
