#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chaostune/error.hpp"
#include "chaostune/metrics.hpp"

using namespace chaostune;

TEST(Metrics, PerfectPredictionsHaveZeroRmse) {
    const std::vector<double> a{0.1, 0.2, 0.3};
    EXPECT_EQ(compute_metrics(a, a).rmse, 0.0);
}

TEST(Metrics, ResidualsThreeFour) {
    const std::vector<double> p{3.0, 4.0}, t{0.0, 0.0};
    const RunMetrics m = compute_metrics(p, t);
    EXPECT_NEAR(m.rmse, 3.535533905932737622, 1e-15);
    EXPECT_EQ(m.max_abs_err, 4.0);
}

TEST(Metrics, RejectsEmptyAndMismatched) {
    const std::vector<double> none, one{1.0};
    EXPECT_THROW((void)compute_metrics(none, none), Error);
    EXPECT_THROW((void)compute_metrics(one, none), Error);
    EXPECT_THROW((void)compute_metrics(Trajectory{}), Error);
}

TEST(Metrics, MatchesTwoPassComputation) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> d(0.0, 3.0);
    std::vector<double> p(5000), t(5000);
    for (auto& v : p) v = d(rng);
    for (auto& v : t) v = d(rng);
    long double sq = 0;
    for (std::size_t i = 0; i < p.size(); ++i) sq += (long double)(p[i] - t[i]) * (p[i] - t[i]);
    const double ref = std::sqrt(static_cast<double>(sq / p.size()));
    EXPECT_NEAR(compute_metrics(p, t).rmse, ref, 1e-12 * ref);
}

TEST(Metrics, TrajectoryWindowsAndDivergence) {
    Trajectory tr;
    for (int i = 0; i < 250; ++i) tr.rows.push_back({i * 0.01, 0, 0, 0, 0, i < 100 ? 0.5 : -1.0, 0, 0, 0});
    tr.status = RunStatus::Diverged;
    tr.divergence_time = 2.49;
    const RunMetrics m = compute_metrics(tr, {0.5, 100});
    ASSERT_EQ(m.window_averages.size(), 2u);
    EXPECT_DOUBLE_EQ(m.window_averages[0], 0.5);
    EXPECT_DOUBLE_EQ(m.window_averages[1], 1.0);
    EXPECT_TRUE(m.diverged);
    EXPECT_EQ(*m.divergence_time, 2.49);
    EXPECT_EQ(*m.max_abs_err_after, 1.0);
}
