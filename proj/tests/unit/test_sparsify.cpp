#include <gtest/gtest.h>

#include <cmath>

#include "horst/sparsify.hpp"
#include "oracles.hpp"

using namespace horst;

namespace {
TwoLayerTask small_task() {
    TwoLayerTaskConfig c;
    c.D = 6;
    c.hidden = 8;
    c.classes = 3;
    c.informative = 2;
    c.N = 60;
    c.N_val = 30;
    return two_layer_task(4, c);
}

TrainSettings settings(OptimizerKind kind, std::size_t steps) {
    TrainSettings ts;
    ts.kind = kind;
    ts.cfg.eta = 1e-2;
    ts.cfg.lambda = 0.05;
    ts.cfg.alpha = kind == OptimizerKind::adamw ? 0.0 : 5.0;
    ts.steps = steps;
    ts.record_every = 10;
    return ts;
}
} // namespace

TEST(MagnitudePrune, Example) {
    ParamVector p({0.3, -0.1, 2.0, 0.05}, {{"w", 0, 4}});
    auto m = magnitude_prune(p, 0.5, {"w"});
    EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{1, 0, 1, 0}));
    EXPECT_EQ(apply_mask(p, m).values(), (Vec{0.3, 0.0, 2.0, 0.0}));
    EXPECT_THROW(magnitude_prune(p, 1.0, {"w"}), argument_error);
    EXPECT_THROW(magnitude_prune(p, 0.5, {"missing"}), std::exception);
}

TEST(MagnitudePrune, PerSegmentCountsMatchOracle) {
    Rng r(6);
    Vec v(10);
    for (double& x : v) x = r.normal();
    ParamVector p(v, {{"a", 0, 4}, {"b", 4, 6}});
    auto m = magnitude_prune(p, 0.5, {"a", "b"});
    EXPECT_EQ(m.zeros(), 2u + 3u);
    EXPECT_TRUE(check_prune_counts(p, m));
    auto a = oracle::global_threshold_prune(Vec(v.begin(), v.begin() + 4), 0.5);
    auto b = oracle::global_threshold_prune(Vec(v.begin() + 4, v.end()), 0.5);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m.bits[i], a[i]);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(m.bits[4 + i], b[i]);
}

TEST(MagnitudePrune, TiesPruneLowestIndexFirst) {
    ParamVector p({1.0, -1.0, 1.0, 1.0}, {{"w", 0, 4}});
    auto m = magnitude_prune(p, 0.5, {"w"});
    EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{0, 0, 1, 1}));
}

TEST(ApplyMask, ResetsMomentsOfMaskedCoordinates) {
    ParamVector p({1.0, 2.0}, {{"w", 0, 2}});
    AdamState s(2);
    adam_step(s, {1.0, 1.0}, 0.1);
    SparsityMask m;
    m.bits = {0, 1};
    apply_mask(p, m, &s);
    EXPECT_EQ(s.m[0], 0.0);
    EXPECT_NE(s.m[1], 0.0);
    m.bits = {1};
    EXPECT_THROW(apply_mask(p, m), dimension_error);
}

TEST(AcdcSchedule, DefaultLayoutAndValidation) {
    auto s = AcdcSchedule::make_default(2000, 0.9);
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.warmup_dense, 200u);
    EXPECT_EQ(s.pairs(), 5u);
    EXPECT_EQ(s.phase_at(0), Phase::dense);
    EXPECT_EQ(s.phase_at(200), Phase::sparse);
    EXPECT_EQ(s.phase_at(200 + s.phase_length), Phase::dense);
    EXPECT_EQ(s.phase_at(1999), Phase::sparse);

    AcdcSchedule bad = s;
    bad.final_sparse += 1;
    EXPECT_THROW(bad.validate(), config_error);
    bad = s;
    bad.warmup_dense = 0;
    EXPECT_THROW(bad.validate(), config_error);
    bad = s;
    bad.sparsity = 1.0;
    EXPECT_THROW(bad.validate(), config_error);
}

TEST(Acdc, ZeroSparsityMatchesDenseTraining) {
    auto task = small_task();
    auto sched = AcdcSchedule::make_default(100, 0.0, 2);
    for (auto kind : {OptimizerKind::adamw, OptimizerKind::horst}) {
        auto ts = settings(kind, 100);
        auto acdc = acdc_train(task, ts, sched, 3);
        auto dense = dense_train(task, ts, 3);
        EXPECT_EQ(acdc.theta.values(), dense.values()) << to_string(kind);
    }
}

TEST(Acdc, SparsePhasesHoldTheMask) {
    auto task = small_task();
    auto sched = AcdcSchedule::make_default(100, 0.75, 2);
    for (auto kind : {OptimizerKind::adamw, OptimizerKind::horst, OptimizerKind::ham}) {
        auto res = acdc_train(task, settings(kind, 100), sched, 3);
        EXPECT_FALSE(res.mask_violated);
        EXPECT_TRUE(res.exact_counts);
        EXPECT_EQ(res.pruning_events, 3u);
        EXPECT_NEAR(segment_sparsity(res.theta, "W1"), 0.75, 1e-12);
        EXPECT_NEAR(segment_sparsity(res.theta, "W2"), 0.75, 1e-12);
        EXPECT_EQ(res.boundaries.front().phase, Phase::dense);
        EXPECT_EQ(res.boundaries.back().phase, Phase::sparse);
    }
    EXPECT_THROW(acdc_train(task, settings(OptimizerKind::sgd, 100), sched, 3), config_error);
}

TEST(OneShot, ZeroSparsityIsTheDenseModel) {
    auto task = small_task();
    auto dense = dense_train(task, settings(OptimizerKind::adamw, 50), 1);
    auto pts = one_shot_prune_eval(dense, task.net, task.val, {0.0, 0.5});
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].loss, task.net.loss_and_grad(dense.values(), task.val, nullptr));
    EXPECT_GE(pts[0].accuracy, 0.0);
    EXPECT_LE(pts[0].accuracy, 1.0);
}

TEST(WeightDistribution, Examples) {
    auto w = weight_distribution_report({-1.0, 0.0, 0.0, 1.0}, 4, 2.0);
    EXPECT_DOUBLE_EQ(w.mean, 0.0);
    EXPECT_DOUBLE_EQ(w.stddev, std::sqrt(0.5));
    EXPECT_DOUBLE_EQ(w.frac_near_zero, 0.5);
    EXPECT_NEAR(w.excess_kurtosis, -1.0, 1e-12);
    std::size_t total = 0;
    for (auto c : w.counts) total += c;
    EXPECT_EQ(total, 4u);
    EXPECT_TRUE(weight_distribution_report({2.0, 2.0}).degenerate);
    EXPECT_THROW(weight_distribution_report({0.0, 0.0}), argument_error);
}
