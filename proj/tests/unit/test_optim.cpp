#include <gtest/gtest.h>

#include <cmath>

#include "horst/optim.hpp"
#include "horst/rng.hpp"

using namespace horst;

namespace {
GradOracle quad_oracle(Vec target) {
    GradOracle o;
    o.eval = [target](const Vec& t) {
        Vec g(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) g[j] = (t[j] - target[j]) * (1.0 + j) + 0.3 * std::sin(3 * t[j]);
        return g;
    };
    return o;
}
} // namespace

TEST(Adam, ZeroGradientFirstStep) {
    AdamState s(2);
    EXPECT_EQ(adam_step(s, {0.0, 0.0}, 0.1), (Vec{0.0, 0.0}));
}

TEST(Adam, BiasCorrectedFirstStep) {
    AdamState s(1);
    Vec u = adam_step(s, {1.0}, 0.1);
    EXPECT_NEAR(u[0], 0.1 / (1.0 + 1e-8), 1e-15);
    EXPECT_EQ(s.step_count, 1u);
}

TEST(Adam, ConstantGradientApproachesEta) {
    AdamState s(1);
    Vec u;
    for (int k = 0; k < 5000; ++k) u = adam_step(s, {2.5}, 0.01);
    EXPECT_NEAR(u[0], 0.01, 1e-9);
}

TEST(Adam, ResetClearsFlaggedMoments) {
    AdamState s(2);
    adam_step(s, {1.0, 1.0}, 0.1);
    s.reset({1, 0});
    EXPECT_EQ(s.m[0], 0.0);
    EXPECT_EQ(s.v[0], 0.0);
    EXPECT_NE(s.m[1], 0.0);
}

TEST(SimpleSteps, Examples) {
    EXPECT_EQ(sgd_step({2.0}, 0.5), (Vec{1.0}));
    EXPECT_EQ(signsgd_step({2.0, -0.001}, 0.1), (Vec{0.1, -0.1}));
    EXPECT_EQ(signsgd_step({0.0}, 0.1), (Vec{0.0}));
}

TEST(ExpUpdate, Examples) {
    EXPECT_EQ(exp_update({1.5, -2.0}, {0.3, 0.4}, 0.0, 0.0, 0.1), (Vec{1.5, -2.0}));
    EXPECT_NEAR(exp_update({1.0}, {0.1}, 5.0, 0.0, 0.37)[0], std::exp(-0.5), 1e-15);
    EXPECT_NEAR(exp_update({-2.0}, {-0.1}, 5.0, 0.0, 0.1)[0], -2.0 * std::exp(-0.5), 1e-15);
}

TEST(ExpUpdate, GuardClampsExponent) {
    ExpGuard g;
    Vec out = exp_update({1.0, 1.0}, {-100.0, 100.0}, 5.0, 0.0, 0.1, &g);
    EXPECT_EQ(g.clamped, 2u);
    EXPECT_EQ(out[0], std::exp(50.0));
    EXPECT_EQ(out[1], std::exp(-50.0));
    EXPECT_TRUE(all_finite(out));
}

TEST(Horst, SingleStepExample) {
    OptimizerConfig c;
    c.eta = 0.1;
    c.alpha = 5.0;
    AdamState s(1);
    GradOracle o;
    o.eval = [](const Vec&) { return Vec{1.0}; };
    Vec t = horst_step({1.0}, o, s, c);
    double u = 0.1 / (1.0 + 1e-8);
    EXPECT_NEAR(t[0], (1.0 - u) * std::exp(-5.0 * u), 1e-14);
    EXPECT_NEAR(t[0], 0.5459, 1e-4);
}

TEST(Horst, ReducesToAdamWAndAdam) {
    for (double lambda : {0.0, 0.1}) {
        OptimizerConfig c;
        c.eta = 1e-2;
        c.lambda = lambda;
        GradOracle o = quad_oracle({1.0, -2.0, 0.5});
        AdamState sa(3), sb(3), sc(3);
        Vec a{0.3, 0.3, -0.3}, b = a, plain = a;
        for (int k = 0; k < 500; ++k) {
            a = adamw_step(a, o, sa, c);
            b = horst_step(b, o, sb, c);
            if (lambda == 0.0) plain = sub(plain, adam_step(sc, o(plain), c.eta));
        }
        EXPECT_EQ(a, b);
        if (lambda == 0.0) EXPECT_EQ(a, plain);
    }
}

TEST(Horst, ZeroGradientHoldsStill) {
    OptimizerConfig c;
    c.eta = 0.1;
    c.alpha = 5.0;
    GradOracle o;
    o.eval = [](const Vec& t) { return Vec(t.size(), 0.0); };
    AdamState s(2);
    Vec t{0.7, -1.1};
    for (int k = 0; k < 20; ++k) t = horst_step(t, o, s, c);
    EXPECT_EQ(t, (Vec{0.7, -1.1}));
}

TEST(Horst, OneOracleCallPerStep) {
    OptimizerConfig c;
    c.eta = 1e-2;
    c.alpha = 5.0;
    GradOracle o = quad_oracle({1.0, 2.0});
    AdamState s(2), s2(2);
    Vec t{0.5, 0.5};
    for (int k = 0; k < 37; ++k) t = horst_step(t, o, s, c);
    EXPECT_EQ(o.calls, 37u);
    for (int k = 0; k < 11; ++k) t = ham_step(t, o, s2, c);
    EXPECT_EQ(o.calls, 48u);
}

TEST(Ham, Examples) {
    OptimizerConfig c;
    c.eta = 0.1;
    c.alpha = 200.0;
    // Exponent -eta * alpha * sign(half) * g with half = 1, g = 0.01.
    AdamState s(1);
    s.m = {0.0};
    Vec out = ham_update({1.0}, {0.01}, s, c, 0.1);
    double u = 0.1 * 0.01 / (0.01 + 1e-8);
    EXPECT_NEAR(out[0], (1.0 - u) * std::exp(-0.2), 1e-12);

    OptimizerConfig z;
    z.eta = 1e-2;
    z.lambda = 0.05;
    GradOracle o = quad_oracle({1.0, -1.0});
    AdamState sa(2), sb(2);
    Vec a{0.2, 0.2}, b = a;
    for (int k = 0; k < 200; ++k) {
        a = adamw_step(a, o, sa, z);
        b = ham_step(b, o, sb, z);
    }
    EXPECT_EQ(a, b);
}

TEST(Ham, PureShrinkage) {
    OptimizerConfig c;
    c.eta = 0.05;
    c.alpha = 17.0;
    c.beta = 0.4;
    GradOracle o;
    o.eval = [](const Vec& t) { return Vec(t.size(), 0.0); };
    AdamState s(1);
    Vec t{2.0};
    for (int k = 0; k < 10; ++k) {
        Vec next = ham_step(t, o, s, c);
        EXPECT_EQ(next[0], t[0] * std::exp(-0.05 * 0.4));
        t = next;
    }
}

TEST(Schedule, WarmupCosineTriangular) {
    OptimizerConfig c;
    c.eta = 1.0;
    c.warmup = 10;
    c.total_steps = 110;
    c.schedule = ScheduleKind::cosine;
    EXPECT_NEAR(lr_at(c, 0), 0.1, 1e-15);
    EXPECT_NEAR(lr_at(c, 9), 1.0, 1e-15);
    EXPECT_NEAR(lr_at(c, 60), 0.5, 1e-12);
    EXPECT_NEAR(lr_at(c, 110), 0.0, 1e-12);
    c.schedule = ScheduleKind::triangular;
    EXPECT_NEAR(lr_at(c, 60), 0.5, 1e-12);
    c.total_steps = 0;
    EXPECT_THROW(c.validate(), config_error);
    OptimizerConfig bad;
    bad.eta = -1.0;
    EXPECT_THROW(bad.validate(), config_error);
}

TEST(Optimizer, KindNamesRoundTrip) {
    for (int i = 0; i <= static_cast<int>(OptimizerKind::mirror_descent); ++i) {
        auto k = static_cast<OptimizerKind>(i);
        EXPECT_EQ(parse_optimizer_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_optimizer_kind("lion").has_value());
}

TEST(Composed, SignAfterExpIsSign) {
    OptimizerConfig c;
    c.eta = 0.1;
    Rng r(4);
    Optimizer comp = composed_optimizer(ComposeOrder::base_after_exp, BaseKind::signsgd, c, 5);
    Optimizer plain(OptimizerKind::signsgd, c, 5);
    for (int k = 0; k < 20; ++k) {
        Vec t(5), g(5);
        for (std::size_t j = 0; j < 5; ++j) {
            t[j] = r.normal();
            g[j] = r.normal();
        }
        EXPECT_EQ(comp.step(t, g), plain.step(t, g));
    }
}

TEST(Composed, ExpAfterSgdIsGradientDescentInLogSpace) {
    OptimizerConfig c;
    c.eta = 0.05;
    c.alpha = 1.0;
    Optimizer opt = composed_optimizer(ComposeOrder::exp_after_base, BaseKind::sgd, c, 2);
    Vec t{1.0, 3.0}, g{0.4, -2.0};
    Vec next = opt.step(t, g);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::log(next[j]), std::log(t[j]) - 0.05 * g[j], 1e-14);
    EXPECT_THROW(composed_optimizer(ComposeOrder::exp_after_base, BaseKind::signsgd, c, 2), argument_error);
}

TEST(Composed, AlphaZeroFreezesTheMultiplicativeForm) {
    // The exponential form with alpha = beta = 0 leaves theta unchanged; the base optimizer
    // on its own is the additive Adam kind.
    OptimizerConfig c;
    c.eta = 0.1;
    Optimizer opt = composed_optimizer(ComposeOrder::exp_after_base, BaseKind::adam, c, 2);
    EXPECT_EQ(opt.step({1.0, -2.0}, {0.5, 0.5}), (Vec{1.0, -2.0}));
}

TEST(Optimizer, CountsSignFlipsAndClamps) {
    OptimizerConfig c;
    c.eta = 1.0;
    c.alpha = 100.0;
    Optimizer opt(OptimizerKind::horst, c, 2);
    opt.step({0.5, -0.5}, {1.0, -1.0}); // Adam step of size ~1 crosses zero on both
    EXPECT_EQ(opt.sign_flips(), 2u);
    EXPECT_EQ(opt.guard().clamped, 2u);
    EXPECT_EQ(opt.iteration(), 1u);
}

TEST(RunOptimizer, RecordsHistory) {
    OptimizerConfig c;
    c.eta = 0.1;
    Optimizer opt(OptimizerKind::sgd, c, 1);
    auto res = run_optimizer(opt, [](const Vec& t, Vec& g) {
        g = {t[0]};
        return 0.5 * t[0] * t[0];
    }, {1.0}, 10, 5);
    EXPECT_NEAR(res.theta[0], std::pow(0.9, 10), 1e-15);
    ASSERT_GE(res.history.size(), 2u);
    EXPECT_EQ(res.history[0].iteration, 0u);
}
