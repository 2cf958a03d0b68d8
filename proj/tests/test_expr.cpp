#include "nvw/errors.hpp"
#include "nvw/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nvw;

TEST(Expr, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(Expr::parse("1+2*3")(0), 7);
    EXPECT_DOUBLE_EQ(Expr::parse("(1+2)*3")(0), 9);
    EXPECT_DOUBLE_EQ(Expr::parse("2^3^2")(0), 512);
    EXPECT_DOUBLE_EQ(Expr::parse("-x^2")(3), -9);
    EXPECT_DOUBLE_EQ(Expr::parse("8/4/2")(0), 1);
    EXPECT_DOUBLE_EQ(Expr::parse("1-2-3")(0), -4);
}

TEST(Expr, FunctionsAndConstants) {
    EXPECT_NEAR(Expr::parse("atan(-10)+pi/2")(0), std::atan(-10.0) + std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(Expr::parse("exp(1)")(0), std::numbers::e, 1e-15);
    EXPECT_NEAR(Expr::parse("e")(0), std::numbers::e, 1e-15);
    EXPECT_NEAR(Expr::parse("sqrt(abs(x))")(-4), 2, 1e-15);
    EXPECT_NEAR(Expr::parse("log(x)+sin(x)*cos(x)")(2), std::log(2.0) + std::sin(2.0) * std::cos(2.0), 1e-15);
    EXPECT_NEAR(Expr::parse("0.5*exp(-(x/0.1)^2)")(0.05), 0.5 * std::exp(-0.25), 1e-15);
    EXPECT_DOUBLE_EQ(Expr::constant(2.5)(100), 2.5);
}

TEST(Expr, DerivativeMatchesDifferences) {
    for (const char* s : {"0.5*exp(-x^2)", "2/sqrt(1+x^2)", "atan(x)*x^3", "0.5*(1-(x/2)^2)^4", "sin(x)/(2+cos(x))",
                          "log(1+x^2)"}) {
        Expr f = Expr::parse(s), d = f.derivative();
        for (double x = -1.7; x <= 1.7; x += 0.31) {
            const double h = 1e-5;
            EXPECT_NEAR(d(x), (f(x + h) - f(x - h)) / (2 * h), 1e-7) << s << " at " << x;
        }
    }
}

TEST(Expr, RejectsMalformedText) {
    for (const char* s : {"", "1+", "(1", "sin x", "foo(1)", "1 2", "x**2", "3)"})
        EXPECT_THROW(Expr::parse(s), ParseError) << s;
}
