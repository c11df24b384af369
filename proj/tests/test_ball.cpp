#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pucci/ball.hpp"
#include "pucci/critical.hpp"

using namespace pucci;

namespace {
const CriticalResult& cached(Operator op) {
    static const CriticalResult plus = find_critical({1, 2, 4, Operator::Plus});
    static const CriticalResult minus = find_critical({1, 2, 4, Operator::Minus});
    return op == Operator::Plus ? plus : minus;
}
const std::vector<double> kSweep{0.2, 0.1, 0.05, 0.025, 0.0125};
}  // namespace

TEST(Ball, DirichletProblemIsSolved) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto b = solve_ball_eps(cached(op), 0.1);
        EXPECT_NEAR(b.u(1.0), 0.0, 1e-10 * b.M);
        EXPECT_NEAR(b.u(0.0), b.M, 1e-12 * b.M);
        EXPECT_EQ(b.du(0.0), 0.0);
        EXPECT_LT(b.du_at_1, 0.0);
        EXPECT_GT(b.r0, 0.0);
        EXPECT_LT(b.r0, 1.0);
        EXPECT_LT(b.residual, 1e-8);
        EXPECT_NEAR(b.R, std::pow(b.M, (b.p - 1.0) / 2.0), 1e-12 * b.R);
    }
}

TEST(Ball, LaplacianLaneEmdenAgainstFixedStepShot) {
    const auto b = solve_ball({1, 1, 3, Operator::Plus}, 3.0);
    const auto ref = oracle::rk4_shot({1, 1, 3, true}, 3.0, 1.0, 1e-4, 100.0);
    ASSERT_TRUE(ref.zero);
    const double m_ref = std::pow(*ref.zero, 2.0 / (3.0 - 1.0));
    EXPECT_NEAR(b.M, m_ref, 1e-8 * m_ref);
}

TEST(Ball, MinusPeakHeightAgainstFixedStepShot) {
    // The fixed-step reference confirms the peak height at eps = 0.2 exceeds the one at eps = 0.1.
    const auto& crit = cached(Operator::Minus);
    std::vector<double> heights;
    for (double eps : {0.2, 0.1}) {
        const auto b = solve_ball_eps(crit, eps);
        const auto ref = oracle::rk4_shot({1, 2, 4, false}, b.p, 1.0, 2e-3, 1e4);
        ASSERT_TRUE(ref.zero);
        const double m_ref = std::pow(*ref.zero, 2.0 / (b.p - 1.0));
        EXPECT_NEAR(b.M, m_ref, 1e-7 * m_ref) << eps;
        heights.push_back(m_ref);
    }
    EXPECT_GT(heights[0], heights[1]);
}

TEST(Ball, PlusPeakHeightAgainstFixedStepShot) {
    const auto b = solve_ball_eps(cached(Operator::Plus), 0.2);
    const auto ref = oracle::rk4_shot({1, 2, 4, true}, b.p, 1.0, 2e-3, 1e5);
    ASSERT_TRUE(ref.zero);
    EXPECT_NEAR(b.M, std::pow(*ref.zero, 2.0 / (b.p - 1.0)), 1e-6 * b.M);
}

TEST(Ball, ShootingHeightIndependence) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        for (double eps : {0.2, 0.025}) {
            BallOptions two;
            two.u0 = 2.0;
            const auto a = solve_ball_eps(cached(op), eps);
            const auto b = solve_ball_eps(cached(op), eps, two);
            EXPECT_NEAR(a.M / b.M, 1.0, 1e-9);
            EXPECT_NEAR(a.r0 / b.r0, 1.0, 1e-9);
        }
    }
}

TEST(Ball, RejectsSupercriticalAndTinyEps) {
    EXPECT_THROW(solve_ball({1, 2, 4, Operator::Plus}, 10.0), Supercritical);
    EXPECT_THROW(solve_ball({1, 1, 4, Operator::Plus}, 3.0), Supercritical);
    EXPECT_THROW(solve_ball({1, 2, 4, Operator::Plus}, 1.0), InvalidParams);
    const auto& crit = cached(Operator::Plus);
    EXPECT_THROW(solve_ball_eps(crit, 0.0), InvalidParams);
    EXPECT_THROW(solve_ball_eps(crit, 10.0 * crit.p_tolerance), InvalidParams);
    BallOptions opt;
    opt.p_star = crit.p_star;
    EXPECT_THROW(solve_ball(crit.params, crit.p_star + 0.1, opt), Supercritical);
}

TEST(Ball, PlusSweepConcentrates) {
    const auto rep = theorem1_sweep(cached(Operator::Plus), kSweep);
    ASSERT_EQ(rep.rows.size(), kSweep.size());
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        EXPECT_GT(rep.rows[i].M, rep.rows[i - 1].M);
        EXPECT_LT(rep.rows[i].sup_profile_gap[1], rep.rows[i - 1].sup_profile_gap[1]);
        EXPECT_LT(rep.rows[i].sup_far_field_gap, rep.rows[i - 1].sup_far_field_gap);
    }
    for (const auto& r : rep.rows) {
        EXPECT_LE(r.invariance_gap, 1e-10);
        EXPECT_EQ(r.eqd_violations, 0);
        EXPECT_LT(r.estib_max, 0.0);
    }
}

TEST(Ball, SweepExcludesInadmissibleEps) {
    const auto& crit = cached(Operator::Plus);
    const auto rep = theorem1_sweep(crit, {0.2, 0.1, 1e-12});
    EXPECT_EQ(rep.rows.size(), 2u);
    ASSERT_EQ(rep.excluded_eps.size(), 1u);
    EXPECT_THROW(theorem1_sweep(crit, {0.1}), InvalidParams);
}

TEST(Ball, RichardsonLimitIsExactOnQuadratics) {
    const std::vector<double> e{0.4, 0.2, 0.1};
    std::vector<double> v;
    for (double x : e) v.push_back(3.0 - 2.0 * x + 5.0 * x * x);
    EXPECT_NEAR(richardson_limit(e, v), 3.0, 1e-12);
    EXPECT_TRUE(std::isnan(richardson_limit({}, {})));
}

TEST(Ball, DerivativeLimitIdentity) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto rep = derivative_limit_sweep(cached(op), kSweep);
        const double gap = std::abs(rep.integrated_identity - rep.exact_limit) / std::abs(rep.exact_limit);
        EXPECT_LE(gap, 1e-6);
        EXPECT_LT(rep.scaled_derivative.back(), 0.0);
        EXPECT_NE(rep.alt_limit, rep.integrated_identity);
    }
}
