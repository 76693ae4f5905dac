#include <gtest/gtest.h>

#include <cmath>

#include "horst/mirror.hpp"
#include "horst/rng.hpp"
#include "oracles.hpp"

using namespace horst;

TEST(MirrorStep, Examples) {
    EXPECT_EQ(mirror_step(MirrorMap::quadratic(), {5.0, -1.0}, {2.0, -1.0}), (Vec{2.0, -1.0}));
    EXPECT_EQ(mirror_step(MirrorMap::hyperbolic(1.0), {0.0}, {2.0}), (Vec{2.0}));
    EXPECT_EQ(mirror_step(MirrorMap::cosh_entropy(), {0.0}, {3.0}), (Vec{3.0}));
    EXPECT_THROW(mirror_step(MirrorMap::quadratic(), {NAN}, {1.0}), domain_error);
    EXPECT_THROW(MirrorMap::hyperbolic(0.0), argument_error);
}

// grad R is the derivative of R, and inv_hessian is 1 / (grad R)'.
TEST(MirrorMap, DerivativesMatchFiniteDifferences) {
    Rng r(1);
    for (auto m : {MirrorMap::quadratic(), MirrorMap::hyperbolic(0.3), MirrorMap::cosh_entropy(),
                   MirrorMap::log_entropy()}) {
        for (int k = 0; k < 30; ++k) {
            double t = r.uniform(-3.0, 3.0);
            if (m.kind() == MirrorKind::log_entropy) t = std::abs(t) + 0.2;
            Vec x{t};
            Vec dR = oracle::finite_difference([&](const Vec& v) { return m.potential(v[0]); }, x, 1e-6);
            Vec d2R = oracle::finite_difference([&](const Vec& v) { return m.grad(v[0]); }, x, 1e-6);
            EXPECT_NEAR(dR[0], m.grad(t), 1e-6 * std::max(1.0, std::abs(m.grad(t)))) << m.label() << " " << t;
            EXPECT_NEAR(1.0 / d2R[0], m.inv_hessian(t), 1e-5 * std::max(1.0, m.inv_hessian(t))) << m.label() << " " << t;
        }
    }
}

TEST(Bregman, Examples) {
    EXPECT_DOUBLE_EQ(bregman_divergence(MirrorMap::quadratic(), {1.0, 2.0}, {0.0, 0.0}), 2.5);
    EXPECT_NEAR(bregman_divergence(MirrorMap::hyperbolic(1.0), {1.0}, {0.0}), std::asinh(1.0) - std::sqrt(2.0) + 1.0,
                1e-14);
    for (auto m : {MirrorMap::quadratic(), MirrorMap::hyperbolic(0.1), MirrorMap::cosh_entropy(),
                   MirrorMap::log_entropy()})
        EXPECT_EQ(bregman_divergence(m, {0.5, 2.0}, {0.5, 2.0}), 0.0);
}

TEST(Bregman, LogEntropyDomain) {
    EXPECT_THROW(bregman_divergence(MirrorMap::log_entropy(), {1.0, -1.0}, {1.0, 1.0}), domain_error);
    EXPECT_THROW(bregman_divergence(MirrorMap::log_entropy(), {1.0}, {0.0}), domain_error);
    // Generalized KL divergence.
    double a = 2.0, b = 0.5;
    EXPECT_NEAR(bregman_divergence(MirrorMap::log_entropy(), {a}, {b}), a * std::log(a / b) - a + b, 1e-14);
}

TEST(Coercivity, Examples) {
    Rng r(2);
    std::vector<Vec> samples, dirs;
    for (int i = 0; i < 50; ++i) {
        samples.push_back({r.normal() * 5, r.normal() * 5});
        dirs.push_back({r.normal(), r.normal()});
    }
    EXPECT_DOUBLE_EQ(coercivity_probe(MirrorMap::quadratic(), samples, dirs), 1.0);
    EXPECT_GE(coercivity_probe(MirrorMap::hyperbolic(0.5), samples, dirs), 0.5);
    samples.push_back({10.0, -10.0});
    EXPECT_LE(coercivity_probe(MirrorMap::cosh_entropy(), samples, dirs), 1.0 / std::cosh(10.0) * (1 + 1e-12));
    EXPECT_THROW(coercivity_probe(MirrorMap::quadratic(), {}, dirs), argument_error);
}

TEST(MirrorMap, Coercive) {
    EXPECT_TRUE(MirrorMap::quadratic().coercive());
    EXPECT_TRUE(MirrorMap::hyperbolic().coercive());
    EXPECT_FALSE(MirrorMap::cosh_entropy().coercive());
    EXPECT_FALSE(MirrorMap::log_entropy().coercive());
}
