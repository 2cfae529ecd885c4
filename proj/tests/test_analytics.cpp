#include <gtest/gtest.h>

#include "phog/analytics.hpp"
#include "phog/params.hpp"

using namespace phog;

TEST(Analytics, QOfX) {
    EXPECT_EQ(q_of_x(0), 0.0);
    EXPECT_NEAR(q_of_x(1e9), -0.8, 1e-6);
    EXPECT_NEAR(q_of_x(0.33), -0.575, 0.005);
    EXPECT_THROW(q_of_x(-1), std::invalid_argument);
}

TEST(Analytics, UniversalParams) {
    auto u = universal_params(0.1, 8e-18, 1.2e9, 0.03);
    EXPECT_NEAR(u.X, 0.35, 0.03);
    double n0 = std::sqrt(0.1 / 8e-18);
    EXPECT_NEAR(universal_params(0.1, 8e-18, n0, 1).Y, 1.0, 1e-12);
    EXPECT_THROW(universal_params(1, 0, 10, 1), std::domain_error);
    // gamma1 = 10g, n0 = 900 with the Gamma = 432 rates gives Y < 1
    auto r = rates_from_gamma(1.0, optimal_coupling_ratio(), 2.0, 432.0, 0.0);
    EXPECT_LT(universal_params(10.0, r.gamma3, 900, 1).Y, 1.0);
}

TEST(Analytics, QOdeLimits) {
    auto t = linspace(0, 5, 51);
    auto q = q_ode({1.0, 0, 0}, [](double t) { return 100 * std::exp(-t); }, 0.0, t);
    for (double v : q) EXPECT_EQ(v, 0.0);
    q = q_ode({0, 0.5, 0}, [](double) { return 50.0; }, 0.0, t);
    EXPECT_NEAR(q.back(), -1.0 / 3.0, 1e-8);
}

TEST(Analytics, QOdeMatchesClosedForm) {
    double g3 = 1e-3, n0 = 200;
    auto t = linspace(0, 0.2, 41);
    auto q = q_ode({0, 0, g3}, [&](double t) { return n_of_x(n0, g3 * n0 * n0 * t); }, 0.0, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(q[i], q_of_x(g3 * n0 * n0 * t[i]), 1e-8);
}

TEST(Analytics, ZetaFixedPoints) {
    double mu = 1e4;
    EXPECT_NEAR(zeta2_limit({1, 0, 0}, mu), 1.0, 1e-12);
    EXPECT_NEAR(zeta3_limit({1, 0, 0}, mu, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(zeta2_limit({0, 1, 0}, mu), 2.0 / 3.0, 1e-12);
    // the limit formula evaluates to 4/15 for pure two-photon loss
    EXPECT_NEAR(zeta3_limit({0, 1, 0}, mu, 2.0 / 3.0), 4.0 / 15.0, 1e-12);
    EXPECT_NEAR(zeta2_limit({0, 0, 1}, mu), 0.2, 1e-12);
    EXPECT_NEAR(zeta3_limit({0, 0, 1}, mu, 0.2), 0.01, 1e-12);
    MomentSet m{mu, 0.2, 0.01};
    EXPECT_NEAR(m.skewness() * std::sqrt(mu), 0.01 / std::pow(0.2, 1.5), 1e-12);
    EXPECT_NEAR(m.skewness() * std::sqrt(mu), 0.11, 0.005);
}

TEST(Analytics, ZetaOdeRelaxesToLimits) {
    auto t = linspace(0, 0.05, 11);
    auto ms = zeta_moment_odes(1e4, {0, 0, 1e-6}, t);
    EXPECT_NEAR(ms.back().zeta2, zeta2_limit({0, 0, 1e-6}, ms.back().mu), 2e-3);
    EXPECT_FALSE(ms.back().low_mu);
    auto g1 = zeta_moment_odes(50, {1, 0, 0}, linspace(0, 5, 6));
    EXPECT_NEAR(g1.back().mu, 50 * std::exp(-5.0), 1e-8);
    EXPECT_NEAR(g1.back().zeta2, 1.0, 1e-10);
    EXPECT_TRUE(g1.back().low_mu);
}

TEST(Analytics, ZetaOfPoisson) {
    double mu = 400;
    auto d = poisson_dist(mu, adequate_dim(mu));
    auto z = zeta_of(d);
    EXPECT_NEAR(z.zeta2, 1, 1e-9);
    EXPECT_NEAR(z.zeta3, 1, 1e-8);
    // Poisson: excess kurtosis 1/mu
    EXPECT_NEAR(z.zeta4 / (std::sqrt(mu) * z.zeta2 * z.zeta2), 1.0 / mu, 1e-8);
    EXPECT_NEAR(z.zeta4, 1 / std::sqrt(mu), 1e-8);
}
