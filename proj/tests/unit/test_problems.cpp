#include <gtest/gtest.h>

#include <cmath>

#include "horst/problems.hpp"
#include "oracles.hpp"

using namespace horst;

TEST(SparseTeacher, DeterministicAndWellFormed) {
    auto a = make_sparse_teacher(30, 50, 3, 7);
    auto b = make_sparse_teacher(30, 50, 3, 7);
    auto c = make_sparse_teacher(30, 50, 3, 8);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.X, c.X);
    for (std::size_t j = 0; j < 30; ++j) {
        if (j < 3) {
            EXPECT_GE(std::abs(a.teacher[j]), 0.5);
            EXPECT_LE(std::abs(a.teacher[j]), 1.5);
        } else {
            EXPECT_EQ(a.teacher[j], 0.0);
        }
    }
    for (std::size_t i = 0; i < 50; ++i) EXPECT_GE(a.y[i] * dot(a.X[i], a.teacher), 0.0);
    EXPECT_THROW(make_sparse_teacher(5, 10, 0, 1), argument_error);
    EXPECT_THROW(make_sparse_teacher(5, 10, 6, 1), argument_error);
}

TEST(ExpLoss, ZeroParametersGiveUnitLoss) {
    auto ds = make_sparse_teacher(6, 20, 2, 3);
    Model m = make_model(ModelKind::linear, 6);
    auto lg = exp_loss_and_grad(m, ds, Vec(6, 0.0));
    EXPECT_DOUBLE_EQ(lg.loss, 1.0);
    EXPECT_NEAR(lg.log_loss, 0.0, 1e-15);
}

TEST(ExpLoss, GradientsMatchFiniteDifferences) {
    auto ds = make_sparse_teacher(5, 15, 2, 11);
    for (auto kind : {ModelKind::linear, ModelKind::diagonal_uv, ModelKind::hadamard_depth_p}) {
        Model m = make_model(kind, 5, 3, 0.4, {1.0, -1.0, 1.0, -1.0, 1.0});
        Vec p = m.parameters.values();
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += 0.05 * static_cast<double>(k % 3);
        auto lg = exp_loss_and_grad(m, ds, p);
        Vec fd = oracle::finite_difference([&](const Vec& v) { return exp_loss_and_grad(m, ds, v).loss; }, p, 1e-6);
        for (std::size_t k = 0; k < p.size(); ++k)
            EXPECT_NEAR(lg.grad[k], fd[k], 1e-6 * std::max(1.0, std::abs(fd[k]))) << to_string(kind) << " " << k;
    }
}

TEST(Model, EffectiveThetaAndErrors) {
    Model m = make_model(ModelKind::diagonal_uv, 3, 2, 0.5, {-1.0, 1.0, 1.0});
    EXPECT_EQ(m.depth, 2);
    EXPECT_EQ(m.effective_theta(m.parameters.values()), (Vec{-0.25, 0.25, 0.25}));
    EXPECT_THROW(m.effective_theta(Vec(5, 1.0)), dimension_error);
    EXPECT_THROW(make_model(ModelKind::two_layer, 3), argument_error);
}

TEST(SupportMetrics, Examples) {
    Vec teacher{1.0, -1.0, 0.0, 0.0, 0.0};
    auto r = support_recovery_metrics({2.0, -1.9, 0.1, 0.0, 0.5}, teacher);
    EXPECT_TRUE(r.top_k_hit);
    EXPECT_NEAR(r.spurious_quiet, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.saturation, 2.0 / 5.0, 1e-15);

    auto miss = support_recovery_metrics({2.0, 0.1, 1.9, 0.0, 0.0}, teacher);
    EXPECT_FALSE(miss.top_k_hit);

    auto zero = support_recovery_metrics(Vec(5, 0.0), teacher);
    EXPECT_TRUE(zero.degenerate);
    EXPECT_FALSE(zero.top_k_hit);
}

TEST(TwoLayerNet, GradientMatchesFiniteDifferences) {
    TwoLayerTaskConfig c;
    c.D = 4;
    c.hidden = 3;
    c.classes = 3;
    c.informative = 2;
    c.N = 12;
    c.N_val = 4;
    auto task = two_layer_task(5, c);
    Vec p = task.net.init(2).values();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += 0.01 * static_cast<double>(k % 5);
    Vec g;
    task.net.loss_and_grad(p, task.train, &g);
    Vec fd = oracle::finite_difference([&](const Vec& v) { return task.net.loss_and_grad(v, task.train, nullptr); },
                                       p, 1e-6);
    ASSERT_EQ(g.size(), fd.size());
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], fd[k], 1e-7) << k;
}

TEST(TwoLayerTask, BalancedDeterministicClasses) {
    TwoLayerTaskConfig c;
    c.N = 401;
    c.N_val = 100;
    auto a = two_layer_task(3, c), b = two_layer_task(3, c);
    EXPECT_EQ(a.train.X, b.train.X);
    EXPECT_EQ(a.val.y, b.val.y);
    std::vector<int> counts(c.classes, 0);
    for (int y : a.train.y) ++counts[y];
    for (int n : counts) EXPECT_TRUE(n == 100 || n == 101);
    EXPECT_EQ(a.net.n_params(), 64u * 20 + 64 + 4 * 64 + 4);
    c.informative = 1;
    EXPECT_THROW(two_layer_task(3, c), argument_error);
}

TEST(TwoLayerNet, ChanceLossAtZeroWeights) {
    auto task = two_layer_task(1);
    Vec p(task.net.n_params(), 0.0);
    EXPECT_NEAR(task.net.loss_and_grad(p, task.val, nullptr), std::log(4.0), 1e-12);
}
