#include <gtest/gtest.h>

#include <cmath>

#include "horst/rng.hpp"
#include "horst/steepest.hpp"
#include "oracles.hpp"

using namespace horst;

TEST(SignStep, Examples) {
    Vec th(3, 0.0);
    EXPECT_EQ(sign_step(th, {3.0, -2.0, 0.0}), (Vec{1.0, -1.0, 0.0}));
    EXPECT_EQ(sign_step(th, {3e6, -2e6, 0.0}), (Vec{1.0, -1.0, 0.0}));
    EXPECT_EQ(sign_step({0.0, 0.0}, {0.0, 0.0}), (Vec{0.0, 0.0}));
    EXPECT_THROW(sign_step({0.0}, {1.0, 2.0}), dimension_error);
}

TEST(CoordinateStep, Examples) {
    EXPECT_EQ(coordinate_step(Vec(3, 0.0), {0.5, -2.0, 1.0}), (Vec{0.0, -1.0, 0.0}));
    EXPECT_EQ(coordinate_step(Vec(2, 0.0), {2.0, -2.0}), (Vec{1.0, 0.0}));
    EXPECT_EQ(coordinate_step(Vec(3, 0.0), {0.0, 0.0, 0.0}), (Vec{0.0, 0.0, 0.0}));
}

TEST(LpStep, P2IsNormalizedGradient) {
    for (auto n : {Normalization::unit_p_norm, Normalization::gradient_scaled}) {
        Vec d = lp_step({0.0, 0.0}, {3.0, 4.0}, SteepestConfig::from_p(2.0, n));
        EXPECT_NEAR(d[0], 0.6, 1e-15);
        EXPECT_NEAR(d[1], 0.8, 1e-15);
    }
}

TEST(LpStep, P3Example) {
    Vec g{1.0, 8.0};
    Vec d = lp_step({0.0, 0.0}, g, SteepestConfig::from_p(3.0));
    double nrm = norm_p({1.0, std::sqrt(8.0)}, 3.0);
    EXPECT_NEAR(d[0], 1.0 / nrm, 1e-14);
    EXPECT_NEAR(d[1], std::sqrt(8.0) / nrm, 1e-14);
    EXPECT_NEAR(norm_p(d, 3.0), 1.0, 1e-14);
    // No sampled point of the unit L3 sphere beats it.
    double best = oracle::sampled_lp_max(g, 3.0, 200000, 5);
    EXPECT_GE(dot(g, d), best - 1e-12);
    EXPECT_LT(dot(g, d) - best, 1e-2);
}

TEST(LpStep, MaximizesOverSampledBall) {
    Rng r(3);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (int k = 0; k < 5; ++k) {
            Vec g(4);
            for (double& v : g) v = r.normal();
            Vec d = lp_step(Vec(4, 0.0), g, SteepestConfig::from_p(p));
            EXPECT_NEAR(norm_p(d, p), 1.0, 1e-12);
            EXPECT_GE(dot(g, d), oracle::sampled_lp_max(g, p, 20000, 100 + k) - 1e-12);
        }
    }
}

TEST(LpStep, GradientScaledMatchesClosedForm) {
    // sign(g)|g|^{q-1} / ||g||_q, evaluated directly.
    Vec g{0.3, -2.0, 5.0};
    auto cfg = SteepestConfig::from_p(3.0, Normalization::gradient_scaled);
    Vec d = lp_step(Vec(3, 0.0), g, cfg);
    double nq = norm_p(g, cfg.q);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(d[i], sgn(g[i]) * std::pow(std::abs(g[i]), cfg.q - 1.0) / nq, 1e-14);
}

TEST(LpStep, ExtremeMagnitudes) {
    for (double s : {1e-300, 1e300}) {
        Vec d = lp_step({0.0, 0.0}, {3.0 * s, 4.0 * s}, SteepestConfig::from_p(3.0));
        EXPECT_TRUE(all_finite(d));
        EXPECT_NEAR(norm_p(d, 3.0), 1.0, 1e-12);
    }
    EXPECT_EQ(lp_step({0.0}, {0.0}, SteepestConfig::from_p(2.0)), (Vec{0.0}));
}

TEST(LpStep, RejectsEndpoints) {
    EXPECT_THROW(lp_step({0.0}, {1.0}, SteepestConfig::from_p(1.0)), argument_error);
    EXPECT_THROW(lp_step({0.0}, {1.0}, SteepestConfig::from_p(INFINITY)), argument_error);
    EXPECT_THROW(SteepestConfig::from_p(0.5), argument_error);
}
