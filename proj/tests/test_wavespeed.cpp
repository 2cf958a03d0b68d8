#include "nvw/errors.hpp"
#include "nvw/wavespeed.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nvw;

namespace {

/// Central difference, used as an independent check of the analytic derivatives.
double central(const WaveSpeed& c, double u, int order, double h = 1e-4) {
    if (order == 1) return (c.eval(u + h) - c.eval(u - h)) / (2 * h);
    return (c.eval(u + h) - 2 * c.eval(u) + c.eval(u - h)) / (h * h);
}

}  // namespace

TEST(WaveSpeed, ConstantHasZeroDerivatives) {
    WaveSpeed c = WaveSpeed::constant(1.5);
    for (double u : {-3.0, 0.0, 2.0}) {
        EXPECT_DOUBLE_EQ(c.eval(u), 1.5);
        EXPECT_DOUBLE_EQ(c.eval_derivative(u, 1), 0.0);
        EXPECT_DOUBLE_EQ(c.eval_derivative(u, 2), 0.0);
    }
    EXPECT_DOUBLE_EQ(c.kappa(), 1.5);
    EXPECT_EQ(WaveSpeed::constant(0.5).kappa(), 2.0);
}

TEST(WaveSpeed, BuiltinMatchesFormulaAndDifferences) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    for (double u = -3; u <= 3; u += 0.37) {
        EXPECT_NEAR(c.eval(u), 1 + 1 / (1 + u * u), 1e-15);
        EXPECT_NEAR(c.eval_derivative(u, 1), central(c, u, 1), 1e-7);
        EXPECT_NEAR(c.eval_derivative(u, 2), central(c, u, 2), 1e-5);
        double v, d;
        c.eval2(u, v, d);
        EXPECT_NEAR(v, c.eval(u), 1e-15);
        EXPECT_NEAR(d, c.eval_derivative(u, 1), 1e-15);
    }
}

TEST(WaveSpeed, BoundsHoldOnDenseSample) {
    for (const WaveSpeed& c : {WaveSpeed::builtin(1, 1), WaveSpeed::builtin(0.5, 2),
                               WaveSpeed::tabulated({-1, 0, 0.5, 1}, {1.2, 1.0, 0.8, 0.7})}) {
        for (double u = -5; u <= 5; u += 1e-3) {
            const double v = c.eval(u);
            EXPECT_LE(v, c.kappa() * (1 + 1e-12));
            EXPECT_GE(v, 1 / c.kappa() * (1 - 1e-12));
            EXPECT_LE(std::abs(c.eval_derivative(u, 1)), c.k1() * (1 + 1e-12));
            EXPECT_LE(std::abs(c.eval_derivative(u, 2)), c.k2() * (1 + 1e-12));
        }
    }
}

TEST(WaveSpeed, TabulatedInterpolatesKnotsAndIsC1) {
    std::vector<double> u{-1, 0, 0.5, 1}, v{1.2, 1.0, 0.8, 0.7};
    WaveSpeed c = WaveSpeed::tabulated(u, v);
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(c.eval(u[k]), v[k], 1e-15);
    for (double k : {0.0, 0.5}) {
        EXPECT_NEAR(c.eval(k - 1e-9), c.eval(k + 1e-9), 1e-8);
        EXPECT_NEAR(c.eval_derivative(k - 1e-9, 1), c.eval_derivative(k + 1e-9, 1), 1e-6);
    }
    // constant outside the table
    EXPECT_DOUBLE_EQ(c.eval(-7), 1.2);
    EXPECT_DOUBLE_EQ(c.eval(9), 0.7);
    EXPECT_DOUBLE_EQ(c.eval_derivative(9, 1), 0.0);
}

TEST(WaveSpeed, TabulatedKeepsMonotoneData) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> step(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u{0}, v{3};
        for (int k = 0; k < 6; ++k) {
            u.push_back(u.back() + step(rng));
            v.push_back(v.back() - 0.4 * step(rng));
        }
        WaveSpeed c = WaveSpeed::tabulated(u, v);
        double prev = c.eval(u.front());
        for (double x = u.front(); x <= u.back(); x += 1e-3) {
            const double now = c.eval(x);
            EXPECT_LE(now, prev + 1e-14);
            prev = now;
        }
    }
}

TEST(WaveSpeed, JsonRoundTrip) {
    WaveSpeed c = WaveSpeed::from_json(nlohmann::json::parse(R"J({"kind":"builtin","params":[1,2]})J"));
    WaveSpeed d = WaveSpeed::from_json(c.to_json());
    for (double u : {-1.0, 0.3, 4.0}) EXPECT_EQ(c.eval(u), d.eval(u));
    WaveSpeed t = WaveSpeed::from_json(nlohmann::json::parse(R"J({"wavespeed":{"kind":"tabulated","params":[0,1,1,2]}})J"));
    EXPECT_EQ(t.kind(), SpeedKind::tabulated);
    EXPECT_NEAR(t.eval(1), 2, 1e-15);
}

TEST(WaveSpeed, RejectsBadInput) {
    EXPECT_THROW(WaveSpeed::constant(0), ConfigError);
    EXPECT_THROW(WaveSpeed::constant(-1), ConfigError);
    EXPECT_THROW(WaveSpeed::builtin(0, 1), ConfigError);
    EXPECT_THROW(WaveSpeed::builtin(1, -1), ConfigError);
    EXPECT_THROW(WaveSpeed::tabulated({0, 0}, {1, 1}), ConfigError);
    EXPECT_THROW(WaveSpeed::tabulated({0, 1}, {1, -1}), ConfigError);
    EXPECT_THROW(WaveSpeed::from_json(nlohmann::json::parse(R"J({"kind":"cubic"})J")), ConfigError);
    EXPECT_THROW(WaveSpeed::from_json(nlohmann::json::parse(R"J({"kind":"constant","params":[1,2]})J")), ConfigError);
    EXPECT_THROW(WaveSpeed::builtin(1, 1).eval_derivative(0, 3), UsageError);
}
