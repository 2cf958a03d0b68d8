#include "nvw/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nvw;

namespace {

double integrate(const Stencil& s, const std::vector<double>& f) {
    double v = 0;
    for (int m = 0; m < 4; ++m) v += s.w[m] * f[s.idx[m]];
    return v;
}

}  // namespace

TEST(Quadrature, CubicStencilsExactForCubics) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    std::vector<double> x{0};
    for (int k = 0; k < 20; ++k) x.push_back(x.back() + 0.1 * U(rng));
    auto F = [](double t) { return 0.25 * t * t * t * t - t * t * t / 3 + t; };  // primitive of t^3 - t^2 + 1
    std::vector<double> f;
    for (double t : x) f.push_back(t * t * t - t * t + 1);
    auto st = quadrature_stencils(x, 4);
    ASSERT_EQ(st.size(), x.size());
    for (std::size_t k = 1; k < x.size(); ++k) EXPECT_NEAR(integrate(st[k], f), F(x[k]) - F(x[k - 1]), 1e-14);
}

TEST(Quadrature, TrapezoidAtOrderTwoAndAcrossKinks) {
    std::vector<double> x{0, 1, 2, 2, 3, 4};
    std::vector<double> f{0, 1, 4, 5, 6, 7};
    auto st = quadrature_stencils(x, 4);
    // the repeated abscissa is a zero-width interval
    EXPECT_NEAR(integrate(st[3], f), 0, 1e-15);
    auto tr = quadrature_stencils(x, 2);
    for (std::size_t k = 1; k < x.size(); ++k) EXPECT_NEAR(integrate(tr[k], f), 0.5 * (f[k] + f[k - 1]) * (x[k] - x[k - 1]), 1e-15);
}

TEST(Quadrature, RoughIntervalsFlagJumpsOnly) {
    std::vector<double> x, smooth, jump;
    for (int k = 0; k <= 40; ++k) {
        x.push_back(k * 0.05);
        smooth.push_back(std::sin(3 * x.back()));
        jump.push_back(k <= 20 ? 1.0 : 0.0);
    }
    auto r0 = rough_intervals(x, {&smooth});
    for (char r : r0) EXPECT_FALSE(r);
    auto r1 = rough_intervals(x, {&smooth, &jump});
    for (std::size_t k = 1; k < x.size(); ++k) EXPECT_EQ(bool(r1[k]), k == 21) << k;
    // no stencil reaches across the flagged interval
    auto st = quadrature_stencils(x, 4, &r1);
    for (std::size_t k = 1; k < x.size(); ++k)
        for (int m = 0; m < 4; ++m) {
            if (st[k].w[m] == 0) continue;
            if (k <= 20) {
                EXPECT_LE(st[k].idx[m], 20u) << k;
            }
            if (k >= 22) {
                EXPECT_GE(st[k].idx[m], 21u) << k;
            }
        }
}

TEST(Quadrature, CellIntegralsFourthOrderAndNonnegative) {
    auto err = [](int n) {
        std::vector<double> x(n), f(n);
        for (int k = 0; k < n; ++k) {
            x[k] = -3 + 6.0 * k / (n - 1);
            f[k] = std::exp(-x[k] * x[k]);
        }
        auto c = cell_integrals(x, f);
        double e = 0;
        for (int k = 0; k + 1 < n; ++k) {
            const double exact = 0.5 * std::sqrt(M_PI) * (std::erf(x[k + 1]) - std::erf(x[k]));
            e = std::max(e, std::abs(c[k] - exact));
            EXPECT_GE(c[k], 0);
        }
        return e;
    };
    const double e1 = err(41), e2 = err(81);
    // cell errors of a fourth-order rule fall like h^5
    EXPECT_GT(e1 / e2, 20);
    EXPECT_LT(e2, 1e-6);
}
