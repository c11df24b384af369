#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "pucci/critical.hpp"
#include "pucci/quadrature.hpp"

using namespace pucci;

TEST(Quadrature, SphereMeasure) {
    for (int n : {3, 4, 5, 7}) EXPECT_NEAR(sphere_measure(n), oracle::sphere_area(n), 1e-13 * oracle::sphere_area(n));
    EXPECT_NEAR(sphere_measure(3), 4.0 * std::numbers::pi, 1e-13);
}

TEST(Quadrature, GaussKronrodAgainstSimpson) {
    auto f = [](double x) { return std::exp(-x) * std::sin(3.0 * x) + x * x; };
    const auto q = gauss_kronrod(f, 0.0, 2.0);
    EXPECT_NEAR(q.value, oracle::simpson(f, 0.0, 2.0, 20000), 1e-11);
    EXPECT_EQ(gauss_kronrod(f, 1.0, 1.0).value, 0.0);
}

TEST(Quadrature, LogPanelsResolveNearOrigin) {
    auto f = [](double r) { return std::sqrt(r); };
    EXPECT_NEAR(integrate_log_panels(f, 0.0, 4.0).value, 16.0 / 3.0, 1e-9);
}

TEST(Quadrature, HalfLineIntegral) {
    auto f = [](double r) { return 1.0 / (1.0 + r * r); };
    EXPECT_NEAR(integrate_to_infinity(f, 0.0).value, std::numbers::pi / 2.0, 1e-12);
}

TEST(Quadrature, ProfileIntegralOfTalentiPower) {
    const auto crit = find_critical({1, 1, 4, Operator::Plus});
    const auto q = integrate_profile(crit.profile, 0.0, std::numeric_limits<double>::infinity(),
                                     [](double r, double u, double) { return std::pow(u, 4.0) * r * r * r; });
    EXPECT_NEAR(q.value, 16.0 / 3.0, 1e-8);
    const auto part = integrate_profile(crit.profile, 0.5, 3.0, [](double r, double u, double) { return u * r; });
    const double ref = oracle::simpson([](double r) { return oracle::talenti(4, r) * r; }, 0.5, 3.0);
    EXPECT_NEAR(part.value, ref, 1e-9);
}

TEST(Quadrature, ProfileWithoutTailRejectsInfiniteLimit) {
    const auto prof = integrate({1, 1, 4, Operator::Plus}, 3.0, 1.0, StopCondition::at_radius(5.0));
    auto g = [](double, double u, double) { return u; };
    EXPECT_THROW(integrate_profile(prof, 0.0, std::numeric_limits<double>::infinity(), g), OutOfRange);
    EXPECT_THROW(integrate_profile(prof, 0.0, 6.0, g), OutOfRange);
    EXPECT_THROW(integrate_profile(prof, 2.0, 1.0, g), OutOfRange);
}
