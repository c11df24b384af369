#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "pucci/diagnostics.hpp"

using namespace pucci;

namespace {
const CriticalResult& cached(Operator op) {
    static const CriticalResult plus = find_critical({1, 2, 4, Operator::Plus});
    static const CriticalResult minus = find_critical({1, 2, 4, Operator::Minus});
    return op == Operator::Plus ? plus : minus;
}
const CriticalResult& laplacian(int n) {
    static const CriticalResult n3 = find_critical({1, 1, 3, Operator::Plus});
    static const CriticalResult n4 = find_critical({1, 1, 4, Operator::Plus});
    return n == 3 ? n3 : n4;
}
}  // namespace

TEST(Energy, LaplacianClosedForm) {
    // Weight exponent vanishes at the Sobolev exponent, so E* = |S³| ∫ V⁴ r³ dr = 2π² · 16/3.
    const auto e = energy_star(laplacian(4));
    EXPECT_EQ(e.gamma, 0.0);
    EXPECT_NEAR(e.value, 2.0 * std::numbers::pi * std::numbers::pi * 16.0 / 3.0, 1e-7 * e.value);
}

TEST(Energy, ScalingInvariance) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const double base = energy_star(cached(op)).value;
        for (double a : {0.5, 2.0, 10.0})
            EXPECT_LE(std::abs(energy_star_rescaled(cached(op), a).value - base) / base, 1e-6) << a;
    }
}

TEST(Energy, SobolevChainInLaplacianCase) {
    for (int n : {3, 4}) {
        const auto c = sobolev_chain(laplacian(n));
        EXPECT_NEAR(c.sobolev, oracle::sobolev_constant(n), 1e-7 * oracle::sobolev_constant(n)) << n;
        EXPECT_LE(c.relative_gap, 1e-6) << n;
    }
    EXPECT_THROW(sobolev_chain(cached(Operator::Plus)), InvalidParams);
}

TEST(Energy, PlusSweepApproachesLimit) {
    const auto s = energy_sweep(cached(Operator::Plus), {0.2, 0.1, 0.05, 0.025, 0.0125});
    for (std::size_t i = 1; i < s.gap.size(); ++i) EXPECT_LT(s.gap[i], s.gap[i - 1]);
    EXPECT_LE(std::abs(s.extrapolated - s.sigma) / s.sigma, 0.01);
    for (std::size_t i = 0; i < s.energy.size(); ++i)
        EXPECT_NEAR(s.energy[i], s.energy_rescaled[i], 1e-6 * s.energy[i]);
}

TEST(Energy, DPlusInvariance) {
    const auto rep = d_plus_invariance({1, 2, 4, Operator::Plus}, {0.5, 2.0, 10.0});
    EXPECT_NEAR(rep.nt, 2.5, 1e-15);
    EXPECT_NEAR(rep.p, 9.0, 1e-12);
    EXPECT_LT(rep.ode_residual, 1e-8);
    for (double g : rep.relative_gaps) EXPECT_LE(g, 1e-6);
}

TEST(Pohozaev, AnalyticDerivativeAndIntegral) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto& crit = cached(op);
        for (const auto& pr : pohozaev_pairs(crit)) {
            const auto curve = pohozaev_curve(crit, pr.alpha, pr.beta, log_grid(crit.R0, 100.0 * crit.R0, 200));
            EXPECT_LE(curve.max_gap, 1e-5 * curve.scale) << pr.name;
            const auto in = pohozaev_integral(crit, pr.alpha, pr.beta);
            EXPECT_LE(in.relative_gap, 1e-4) << pr.name;
        }
    }
}

TEST(IntegralIdentity, ResidualAndSensitivity) {
    const auto lap = integral_identity_residual(laplacian(4));
    EXPECT_LE(lap.residual, 1e-6);
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto& crit = cached(op);
        const auto id = integral_identity_residual(crit);
        EXPECT_LE(id.residual, 1e-4);
        const auto off = integral_identity_residual(crit, 1.01 * crit.p_star);
        EXPECT_GE(off.residual, 10.0 * id.residual);
        EXPECT_GT(std::abs(id.lhs - id.alt_rhs), 1e3 * std::abs(id.lhs - id.rhs));
    }
}

TEST(Sandwich, LaplacianConstantsCoincide) {
    const auto k = sandwich_constants(laplacian(4));
    EXPECT_NEAR(k.from_inflection, 3.0 / 32.0, 1e-9);
    EXPECT_NEAR(k.from_c1, 3.0 / 32.0, 1e-4);
}

TEST(Sandwich, NoViolations) {
    for (Operator op : {Operator::Plus, Operator::Minus}) {
        const auto rep = sandwich_check(cached(op));
        EXPECT_EQ(rep.points, 1000);
        EXPECT_EQ(rep.violations, 0);
        EXPECT_GE(rep.min_lower_ratio, 0.9);
        EXPECT_LE(rep.max_upper_ratio, 1.1);
    }
}

TEST(SetX, CriticalProfilesAreConcaveThenConvex) {
    for (Operator op : {Operator::Plus, Operator::Minus}) EXPECT_TRUE(in_set_X(cached(op)));
    EXPECT_FALSE(in_set_X([](double) { return -1.0; }, 1.0, 10.0));
    EXPECT_EQ(weight_exponent(4, 3.0), 0.0);
}
