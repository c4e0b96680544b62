#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "chaostune/error.hpp"
#include "chaostune/surrogate.hpp"

using namespace chaostune;

namespace {
RegressionNet trained_net() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<SampleRecord> rows(300);
    for (auto& r : rows) {
        r = {d(rng) + 1, d(rng), d(rng), d(rng), d(rng) * 40, d(rng) * 40, 0};
        r.err = std::abs(r.x) + 0.01 * r.s1;
    }
    NetConfig c;
    c.hidden_width = 8;
    c.seed = 3;
    RegressionNet net(c);
    TrainOptions o;
    o.epochs = 2;
    (void)train(net, rows, {}, o);
    return net;
}
}  // namespace

TEST(Checkpoint, RoundTripPredictsBitIdentically) {
    const RegressionNet net = trained_net();
    const RegressionNet back = checkpoint_from_json(checkpoint_to_json(net));
    EXPECT_EQ(back.config(), net.config());
    EXPECT_TRUE(back.trained());
    EXPECT_EQ(back.train_mean_err(), net.train_mean_err());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(-50, 50);
    for (int i = 0; i < 200; ++i) {
        const double a = d(rng), b = d(rng), c = d(rng) / 50;
        EXPECT_EQ(predict_error(net, 1.0, c, -c, a, b), predict_error(back, 1.0, c, -c, a, b));
    }
    EXPECT_EQ(checkpoint_to_json(back), checkpoint_to_json(net));
}

TEST(Checkpoint, FileRoundTripAndErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "chaostune_ckpt_test";
    std::filesystem::remove_all(dir);
    const RegressionNet net = trained_net();
    save_checkpoint(net, dir / "m.json");
    EXPECT_EQ(checkpoint_to_json(load_checkpoint(dir / "m.json")), checkpoint_to_json(net));
    try {
        (void)load_checkpoint(dir / "missing.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
    EXPECT_THROW((void)checkpoint_from_json("{}"), Error);
    EXPECT_THROW((void)checkpoint_from_json("[1,2"), Error);
    EXPECT_THROW((void)checkpoint_from_json(R"({"format":"something-else","version":1})"), Error);
    std::filesystem::remove_all(dir);
}
