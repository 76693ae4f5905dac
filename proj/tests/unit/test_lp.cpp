#include <gtest/gtest.h>

#include <cmath>

#include "horst/flows.hpp"
#include "horst/lp.hpp"
#include "horst/problems.hpp"
#include "horst/rng.hpp"
#include "oracles.hpp"

using namespace horst;

TEST(DenseSimplex, SmallStandardForm) {
    // min -x0 - 2 x1  s.t. x0 + x1 + s0 = 4, x1 + s1 = 3
    auto r = DenseSimplex::solve({-1.0, -2.0, 0.0, 0.0}, {{1.0, 1.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 1.0}}, {4.0, 3.0});
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, -7.0, 1e-12);
    EXPECT_NEAR(r.x[0], 1.0, 1e-12);
    EXPECT_NEAR(r.x[1], 3.0, 1e-12);
    // Strong duality: b'y equals the optimum.
    EXPECT_NEAR(4.0 * r.duals[0] + 3.0 * r.duals[1], -7.0, 1e-10);
}

TEST(DenseSimplex, InfeasibleAndUnbounded) {
    auto inf = DenseSimplex::solve({1.0, 1.0}, {{1.0, 1.0}, {1.0, 1.0}}, {1.0, 2.0});
    EXPECT_EQ(inf.status, LpStatus::infeasible);
    auto unb = DenseSimplex::solve({-1.0, 0.0}, {{1.0, -1.0}}, {1.0});
    EXPECT_EQ(unb.status, LpStatus::unbounded);
}

TEST(DenseSimplex, NegativeRhsAndRedundantRows) {
    auto r = DenseSimplex::solve({1.0, 1.0}, {{-1.0, -1.0}, {-2.0, -2.0}}, {-2.0, -4.0});
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(L1MaxMargin, AnalyticExamples) {
    MarginProblem a{{{1.0, 0.0}, {-1.0, 0.0}}, {1.0, -1.0}};
    auto c = l1_max_margin(a);
    EXPECT_NEAR(c.objective, 1.0, 1e-12);
    EXPECT_NEAR(c.theta_star[0], 1.0, 1e-12);
    EXPECT_NEAR(c.theta_star[1], 0.0, 1e-12);
    EXPECT_TRUE(c.dual_feasible);
    EXPECT_TRUE(c.unique);

    MarginProblem deg{{{1.0, 1.0}, {-1.0, -1.0}}, {1.0, -1.0}};
    auto d = l1_max_margin(deg);
    EXPECT_NEAR(d.objective, 1.0, 1e-12);
    EXPECT_NEAR(d.theta_star[0] + d.theta_star[1], 1.0, 1e-12);
    EXPECT_GE(d.theta_star[0], -1e-12);
    EXPECT_GE(d.theta_star[1], -1e-12);
    EXPECT_FALSE(d.unique);
}

TEST(L1MaxMargin, NonSeparableThrows) {
    MarginProblem p{{{1.0}, {1.0}}, {1.0, -1.0}};
    EXPECT_THROW(l1_max_margin(p), infeasible_error);
}

TEST(L1MaxMargin, MatchesBruteForceOn200Instances) {
    Rng pick(9);
    int checked = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        std::size_t n = 1 + pick.below(5);
        std::size_t K = 1 + pick.below(8);
        MarginProblem prob = make_margin_instance(n, K, 500 + s);
        auto brute = oracle::brute_force_l1_margin(prob);
        ASSERT_TRUE(brute.feasible);
        auto cert = l1_max_margin(prob);
        EXPECT_NEAR(cert.objective, brute.objective, 1e-6 * std::max(1.0, brute.objective)) << "instance " << s;
        EXPECT_TRUE(cert.dual_feasible) << "instance " << s;
        EXPECT_GE(prob.min_margin(cert.theta_star), 1.0 - 1e-9);
        ++checked;
    }
    EXPECT_EQ(checked, 200);
}

TEST(L1MaxMargin, FullSizeInstanceAgainstBruteForce) {
    MarginProblem prob = make_margin_instance(5, 8, 77);
    auto brute = oracle::brute_force_l1_margin(prob);
    auto cert = l1_max_margin(prob);
    EXPECT_NEAR(cert.objective, brute.objective, 1e-6);
}
