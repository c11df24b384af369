#include <gtest/gtest.h>

#include "pucci/params.hpp"

using namespace pucci;

TEST(Params, DimensionLikeNumbers) {
    EXPECT_DOUBLE_EQ(dimension_like(Params{1, 2, 4, Operator::Plus}), 2.5);
    EXPECT_DOUBLE_EQ(dimension_like(Params{1, 2, 4, Operator::Minus}), 7.0);
    EXPECT_DOUBLE_EQ(dimension_like(Params{1, 1, 5, Operator::Minus}), 5.0);
}

TEST(Params, PlusBracketForOneTwoFour) {
    const auto b = exponent_bracket(Params{1, 2, 4, Operator::Plus});
    EXPECT_FALSE(b.is_exact());
    EXPECT_DOUBLE_EQ(b.lo, 5.0);
    EXPECT_DOUBLE_EQ(b.hi, 9.0);
}

TEST(Params, MinusBracketForOneTwoFour) {
    const auto b = exponent_bracket(Params{1, 2, 4, Operator::Minus});
    EXPECT_DOUBLE_EQ(b.lo, 1.8);
    EXPECT_DOUBLE_EQ(b.hi, 3.0);
}

TEST(Params, EqualConstantsGiveExactExponent) {
    const auto b = exponent_bracket(Params{1, 1, 3, Operator::Plus});
    ASSERT_TRUE(b.is_exact());
    EXPECT_DOUBLE_EQ(*b.exact, 5.0);
    EXPECT_TRUE((Params{2, 2 * (1 + 1e-14), 4, Operator::Minus}).laplacian());
}

TEST(Params, RejectsInvalidData) {
    EXPECT_THROW(validate(Params{0, 1, 4, Operator::Plus}), InvalidParams);
    EXPECT_THROW(validate(Params{2, 1, 4, Operator::Plus}), InvalidParams);
    EXPECT_THROW(validate(Params{1, 1, 2, Operator::Plus}), InvalidParams);
    EXPECT_THROW(validate(Params{1, 4, 4, Operator::Plus}), InvalidParams);  // Ñ = 1.75
    EXPECT_THROW(validate(Params{1, std::nan(""), 4, Operator::Plus}), InvalidParams);
    EXPECT_NO_THROW(validate(Params{1, 4, 4, Operator::Minus}));
}

TEST(Params, OperatorParsing) {
    EXPECT_EQ(parse_operator("plus"), Operator::Plus);
    EXPECT_EQ(parse_operator("-"), Operator::Minus);
    EXPECT_THROW(parse_operator("max"), InvalidParams);
}

TEST(Params, ExponentConstants) {
    const Params prm{1, 2, 4, Operator::Minus};
    const auto c = exponent_constants(prm, 2.0);
    EXPECT_DOUBLE_EQ(c.lambda1, -(2.0 * 5.0 - 7.0));
    EXPECT_DOUBLE_EQ(c.lambda2, 2.0);
    EXPECT_DOUBLE_EQ(c.gamma, 2.0);
    EXPECT_THROW(exponent_constants(prm, 1.0), InvalidParams);
}

TEST(Params, ShrinkInwardKeepsEndpointsOut) {
    const auto [lo, hi] = shrink_inward(5.0, 9.0);
    EXPECT_GT(lo, 5.0);
    EXPECT_LT(hi, 9.0);
    EXPECT_NEAR(hi - lo, 4.0, 1e-8);
}
