#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "chaostune/csv.hpp"
#include "chaostune_cli/cli.hpp"

namespace fs = std::filesystem;
using chaostune::read_text_file;
using chaostune::write_text_file;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "chaostune");
    std::ostringstream out, err;
    const int code = chaostune::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("chaostune_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    static std::string scenario(const std::string& name) {
        return std::string(CHAOSTUNE_SOURCE_DIR) + "/scenarios/" + name + ".json";
    }
    nlohmann::json summary() const { return nlohmann::json::parse(read_text_file(dir / "summary.json")); }

    fs::path dir;
};

}  // namespace

TEST_F(CliTest, SimulateBaseline) {
    const Result r = run_cli({"--out-dir", dir.string(), "simulate", "--plot"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(summary()["status"], "completed");
    EXPECT_EQ(summary()["rows"], 2500);
    EXPECT_TRUE(fs::exists(dir / "error.svg"));
    EXPECT_TRUE(fs::exists(dir / "phase.svg"));
    const std::string first = read_text_file(dir / "trajectory.csv");
    const std::string svg = read_text_file(dir / "error.svg");
    ASSERT_EQ(run_cli({"--out-dir", dir.string(), "simulate", "--plot"}).code, 0);
    EXPECT_EQ(read_text_file(dir / "trajectory.csv"), first);
    EXPECT_EQ(read_text_file(dir / "error.svg"), svg);
}

TEST_F(CliTest, DivergenceIsAReportedStatus) {
    const Result r = run_cli({"--out-dir", dir.string(), "simulate", "--scenario", scenario("failure_unfit_sigmas")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(summary()["status"], "diverged");
    EXPECT_LT(summary()["metrics"]["divergence_time"].get<double>(), 0.5);
}

TEST_F(CliTest, UsageAndInputErrorsExitTwo) {
    Result r = run_cli({"--config", path("missing.json"), "simulate"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(path("missing.json")), std::string::npos);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"fly"}).code, 2);
    EXPECT_EQ(run_cli({"train"}).code, 2);
    EXPECT_EQ(run_cli({"--out-dir", dir.string(), "train", "--dataset", path("nope.csv")}).code, 2);
    EXPECT_EQ(run_cli({"adaptive"}).code, 2);
    EXPECT_EQ(run_cli({"--out-dir", dir.string(), "adaptive", "--checkpoint", path("nope.json")}).code, 2);
    EXPECT_EQ(run_cli({"plot", "--kind", "pie", "--input", "x"}).code, 2);
    EXPECT_EQ(run_cli({"--out-dir", dir.string(), "evaluate"}).code, 2);
    write_text_file(dir / "bad.json", R"({"plant": {"mass": 1}})");
    r = run_cli({"--config", path("bad.json"), "simulate"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("mass"), std::string::npos);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, EvaluatePerfectPredictions) {
    write_text_file(dir / "p.csv", "prediction,target\n0.5,0.5\n0.25,0.25\n");
    const Result r = run_cli({"--out-dir", dir.string(), "evaluate", "--predictions", path("p.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(summary()["metrics"]["rmse"], 0.0);
    EXPECT_NE(r.out.find("rmse"), std::string::npos);
}

TEST_F(CliTest, PlotParseErrorsExitTwo) {
    write_text_file(dir / "t.csv", std::string(chaostune::kTrajectoryHeader) + "\n1,2\n");
    const Result r = run_cli({"--out-dir", dir.string(), "plot", "--kind", "error", "--input", path("t.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, CollectTrainAdaptiveEvaluatePlotPipeline) {
    write_text_file(dir / "cfg.json", R"({
      "seed": 5,
      "collection": {"episodes": 3, "t_end": 1.0, "coupling": "uncoupled"},
      "adaptive": {"coupling": "uncoupled"},
      "simulation": {"t_end": 1.2},
      "surrogate": {"hidden_width": 8}
    })");
    const std::vector<std::string> base{"--config", path("cfg.json"), "--out-dir", dir.string()};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return run_cli(a);
    };

    Result r = with({"collect"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ds = chaostune::dataset_from_csv(read_text_file(dir / "dataset.csv"));
    EXPECT_GT(ds.records.size(), 100u);

    r = with({"train", "--dataset", path("dataset.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto log = chaostune::train_log_from_csv(read_text_file(dir / "train_log.csv"));
    ASSERT_EQ(log.size(), 5u);
    for (const auto& row : log) EXPECT_EQ(row.lr, 0.001);

    r = with({"evaluate", "--checkpoint", path("model.json"), "--dataset", path("dataset.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(summary()["metrics"]["rmse"].get<double>(), log.back().test_rmse, 1e-9 * (1 + log.back().test_rmse));

    r = with({"adaptive", "--scenario", scenario("sabotage"), "--checkpoint", path("model.json"), "--dataset",
              path("dataset.csv"), "--plot"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string events = read_text_file(dir / "events.csv");
    const auto parsed = chaostune::event_log_from_csv(events);
    ASSERT_FALSE(parsed.empty());
    EXPECT_EQ(parsed.front().kind, chaostune::EventKind::Scenario);
    EXPECT_TRUE(fs::exists(dir / "sigmas.svg"));
    r = with({"adaptive", "--scenario", scenario("sabotage"), "--checkpoint", path("model.json"), "--dataset",
              path("dataset.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_text_file(dir / "events.csv"), events);

    r = with({"plot", "--kind", "rmse", "--input", path("train_log.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "rmse.svg"));
    r = with({"plot", "--kind", "sigmas", "--input", path("events.csv"), "--out", path("s.svg")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = with({"evaluate", "--trajectory", path("trajectory.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(summary()["source"], "trajectory");
}
