#include <gtest/gtest.h>

#include "phog/diagonal.hpp"
#include "phog/params.hpp"

using namespace phog;

namespace {
LossRates fig3_rates() {
    auto r = rates_from_gamma(1.0, optimal_coupling_ratio(), 2.0, 432.0, 0.0);
    return {0.0, r.gamma2, r.gamma3};
}
}  // namespace

TEST(Diagonal, LinearLossKeepsPoisson) {
    auto t = linspace(0, 2, 21);
    auto s = q_trajectory(100, {1.0, 0, 0}, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(s[i].mean, 100 * std::exp(-t[i]), 1e-6);
        EXPECT_NEAR(s[i].q, 0, 1e-6);
        EXPECT_NEAR(s[i].total, 1, 1e-9);
    }
}

TEST(Diagonal, SingleTermRate) {
    DiagonalRhs rhs({0, 0, 1.0}, 10);
    RVec p = RVec::Zero(11), dp;
    p[5] = 1;
    rhs(0, p, dp);
    EXPECT_DOUBLE_EQ(dp[5], -80.0);
    EXPECT_DOUBLE_EQ(dp[4], 80.0);
    EXPECT_NEAR(dp.sum(), 0, 1e-12);
}

TEST(Diagonal, NclFixedPointIsSinglePhoton) {
    auto d = evolve_pn(poisson_dist(10, 60), {0, 0, 1.0}, linspace(0, 50, 3));
    EXPECT_NEAR(d.back().p[1], 1 - std::exp(-10.0), 1e-6);
    EXPECT_NEAR(d.back().p[0], std::exp(-10.0), 1e-9);
    EXPECT_NEAR(d.back().total(), 1, 1e-9);
}

TEST(Diagonal, TwoPhotonLossStationarySupport) {
    auto d = evolve_pn(poisson_dist(10, 60), {0, 1.0, 0}, linspace(0, 50, 3));
    EXPECT_NEAR(d.back().p[0] + d.back().p[1], 1.0, 1e-8);
}

TEST(Diagonal, TruncationOverflow) {
    EXPECT_THROW(evolve_pn(poisson_dist(50, 40), {1, 0, 0}, linspace(0, 1, 2)), SolverError);
}

TEST(Diagonal, MeanNonIncreasingAndQBounded) {
    auto t = linspace(0, 1, 101);
    auto s = q_trajectory(300, fig3_rates(), t);
    for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_LE(s[i].mean, s[i - 1].mean + 1e-9);
        EXPECT_GE(s[i].q, -1.0);
        EXPECT_NEAR(s[i].total, 1, 1e-9);
    }
}

TEST(Diagonal, MinimumQNearMinusFourFifths) {
    auto s = q_trajectory(500, fig3_rates(), linspace(0, 1, 201));
    double mq = 0;
    for (auto& x : s) mq = std::min(mq, x.q);
    EXPECT_GE(mq, -0.82);
    EXPECT_LE(mq, -0.72);
}

TEST(Diagonal, LateMeansConverge) {
    auto t = linspace(0, 1, 11);
    auto r = fig3_rates();
    double a = q_trajectory(100, r, t).back().mean, b = q_trajectory(300, r, t).back().mean,
           c = q_trajectory(500, r, t).back().mean;
    EXPECT_NEAR(a / b, 1, 0.05);
    EXPECT_NEAR(b / c, 1, 0.05);
    EXPECT_NEAR(a / c, 1, 0.05);
}
