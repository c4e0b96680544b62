#include <gtest/gtest.h>

#include "chaostune/error.hpp"
#include "chaostune/scenario.hpp"

using namespace chaostune;

TEST(Scenario, ParsesEveryActionAndSortsByTime) {
    const Scenario sc = parse_scenario(R"({
      "description": "mix",
      "binding": "delta,eps1",
      "coupling": "uncoupled",
      "events": [
        {"at_time": 1.0, "action": "ImpulseVelocity", "dv": 0.5},
        {"at_time": 0.2, "action": "SetSigmas", "s1": 3, "s2": 4},
        {"at_time": 0.5, "action": "SetControllerGains", "k": 80},
        {"at_time": 0.5, "action": "SetPlantParams", "eps1": 2.0},
        {"at_time": 0.7, "action": "ActuatorScale", "factor": 0.5},
        {"at_time": 0.8, "action": "AdditiveDisturbance", "amplitude": 1, "freq": 2, "duration": 0.1}
      ]})");
    ASSERT_EQ(sc.events.size(), 6u);
    EXPECT_EQ(sc.events[0].at_time, 0.2);
    EXPECT_EQ(action_name(sc.events[1].action), "SetControllerGains");  // stable among equal times
    EXPECT_EQ(action_name(sc.events[2].action), "SetPlantParams");
    EXPECT_EQ(sc.binding->to_string(), "delta,eps1");
    EXPECT_TRUE(sc.coupling->uncoupled);
    const auto& g = std::get<SetControllerGains>(sc.events[1].action);
    EXPECT_FALSE(g.gamma1.has_value());
    EXPECT_EQ(*g.k, 80.0);

    const Scenario again = parse_scenario(scenario_to_json(sc));
    EXPECT_EQ(scenario_to_json(again), scenario_to_json(sc));
}

TEST(Scenario, RejectsUnknownKeysAndActions) {
    auto code_of = [](const char* text) {
        try {
            (void)parse_scenario(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of(R"({"events": [], "extra": 1})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"events": [{"at_time": 0, "action": "Explode"}]})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"events": [{"at_time": 0, "action": "SetSigmas", "s1": 1}]})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"events": [{"at_time": -1, "action": "ImpulseVelocity", "dv": 1}]})"),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"events": [{"at_time": 0, "action": "ImpulseVelocity", "dv": 1, "x": 2}]})"),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of("not json"), ErrorCode::ConfigError);
}

TEST(Scenario, ShippedFilesParse) {
    for (const char* name : {"baseline", "failure_unfit_sigmas", "sabotage", "misinit"}) {
        EXPECT_NO_THROW((void)load_scenario(std::string(CHAOSTUNE_SOURCE_DIR) + "/scenarios/" + name + ".json"))
            << name;
    }
    EXPECT_THROW((void)load_scenario("/does/not/exist.json"), Error);
}
