#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pucci/critical.hpp"

using namespace pucci;

namespace {
const CriticalResult& cached(Operator op) {
    static const CriticalResult plus = find_critical({1, 2, 4, Operator::Plus});
    static const CriticalResult minus = find_critical({1, 2, 4, Operator::Minus});
    return op == Operator::Plus ? plus : minus;
}
}  // namespace

class ForcedBisection : public ::testing::TestWithParam<int> {};

TEST_P(ForcedBisection, RecoversSobolevExponent) {
    const int n = GetParam();
    CriticalOptions opt;
    opt.force_bisection = true;
    opt.p_tol = 1e-8;
    const auto res = find_critical({1, 1, n, Operator::Plus}, opt);
    EXPECT_FALSE(res.exact_mode);
    EXPECT_FALSE(res.budget_exhausted);
    EXPECT_NEAR(res.p_star, (n + 2.0) / (n - 2.0), 1e-6);
    EXPECT_GT(res.iterations, 10);
    EXPECT_FALSE(res.history.empty());
}

INSTANTIATE_TEST_SUITE_P(Laplacian, ForcedBisection, ::testing::Values(3, 4, 5));

TEST(Critical, ExactModeConstants) {
    for (int n : {3, 4, 5}) {
        const auto res = find_critical({1, 1, n, Operator::Minus});
        EXPECT_TRUE(res.exact_mode);
        EXPECT_EQ(res.p_tolerance, 0.0);
        EXPECT_NEAR(res.c1, oracle::talenti_c1(n), 1e-3 * oracle::talenti_c1(n)) << n;
        EXPECT_NEAR(res.R0, oracle::talenti_inflection(n), 1e-6) << n;
        EXPECT_NEAR(res.U_R0, oracle::talenti(n, res.R0), 1e-9) << n;
    }
}

TEST(Critical, SplicedProfileFollowsTalentiFarOut) {
    const auto res = find_critical({1, 1, 4, Operator::Plus});
    for (double r : {10.0, 100.0, 1e3, 1e5})
        EXPECT_NEAR(res.profile.u(r) / oracle::talenti(4, r), 1.0, 1e-6) << r;
}

TEST(Critical, PucciExponentsInBracketsAndOrdered) {
    const auto& plus = cached(Operator::Plus);
    const auto& minus = cached(Operator::Minus);
    const auto rep = critical_ordering_check(plus, minus);
    EXPECT_TRUE(rep.plus_in_bracket);
    EXPECT_TRUE(rep.minus_in_bracket);
    EXPECT_TRUE(rep.ordered);
    EXPECT_LE(plus.p_tolerance, 1e-10);
    EXPECT_FALSE(plus.budget_exhausted);
    EXPECT_FALSE(minus.budget_exhausted);
}

TEST(Critical, ProfileAgreesWithFixedStepShot) {
    for (bool is_plus : {true, false}) {
        const auto& crit = cached(is_plus ? Operator::Plus : Operator::Minus);
        const auto ref = oracle::rk4_shot({1, 2, 4, is_plus}, crit.p_star, 1.0, 5e-5, 5.0);
        for (std::size_t i = 0; i < ref.r.size(); i += 4999)
            EXPECT_NEAR(crit.profile.u(ref.r[i]), ref.u[i], 1e-9) << ref.r[i];
    }
}

TEST(Critical, FarFieldConstantFromProfile) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto& crit = cached(op);
        const double nt = crit.dimension_like();
        const double r = 1e4 * crit.R0;
        EXPECT_NEAR(crit.profile.u(r) * std::pow(r, nt - 2.0) / crit.c1, 1.0, 1e-5);
        EXPECT_LT(crit.c1_err, 1e-6 * crit.c1);
    }
}

TEST(Critical, SandwichRolesSwapAcrossSobolevNumber) {
    const auto kp = sandwich_constants(cached(Operator::Plus));
    EXPECT_EQ(kp.lower_k, kp.from_inflection);
    EXPECT_LT(kp.upper_k, kp.lower_k);
    const auto km = sandwich_constants(cached(Operator::Minus));
    EXPECT_EQ(km.lower_k, km.from_c1);
    EXPECT_LT(km.upper_k, km.lower_k);
}

TEST(Critical, RejectsBadInputs) {
    EXPECT_THROW(find_critical({1, 4, 4, Operator::Plus}), InvalidParams);
    EXPECT_THROW(find_critical({1, 2, 2, Operator::Minus}), InvalidParams);
    CriticalOptions opt;
    opt.p_tol = 0.0;
    EXPECT_THROW(find_critical({1, 2, 4, Operator::Plus}, opt), InvalidParams);
    EXPECT_THROW(critical_ordering_check(cached(Operator::Minus), cached(Operator::Plus)), InvalidParams);
}

TEST(Critical, BudgetIsReported) {
    CriticalOptions opt;
    opt.max_iterations = 3;
    const auto res = find_critical({1, 2, 4, Operator::Plus}, opt);
    EXPECT_TRUE(res.budget_exhausted);
    EXPECT_GT(res.p_tolerance, 1e-3);
}
