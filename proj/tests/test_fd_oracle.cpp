#include "oracles/fd_reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nvw;

namespace {

double gauss(double x) { return std::exp(-x * x); }
double zero(double) { return 0; }

}  // namespace

TEST(FdOracle, DAlembertForConstantSpeed) {
    // u_tt = u_xx with u1 = 0: u = (u0(x+t) + u0(x-t))/2
    auto u0 = [](double x) { return 0.3 * gauss(x); };
    double prev = 0;
    for (int N : {400, 800}) {
        oracle::FdSolution s = oracle::fd_solve(u0, zero, zero, zero, WaveSpeed(), -8, 8, N, 1.0);
        double e = 0;
        for (std::size_t k = 0; k < s.x.size(); ++k)
            e = std::max(e, std::abs(s.u[k] - 0.5 * (u0(s.x[k] + 1) + u0(s.x[k] - 1))));
        if (prev > 0) {
            EXPECT_NEAR(std::log2(prev / e), 2.0, 0.3);
        }
        prev = e;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(FdOracle, TransportOfDensities) {
    auto r0 = [](double x) { return 0.2 * gauss(x); };
    oracle::FdSolution s = oracle::fd_reference(zero, zero, r0, r0, WaveSpeed::constant(1.5), -8, 8, 800, 0.5);
    for (std::size_t k = 0; k < s.x.size(); ++k) {
        EXPECT_NEAR(s.rho[k], r0(s.x[k] + 0.75), 1e-5);
        EXPECT_NEAR(s.sigma[k], r0(s.x[k] - 0.75), 1e-5);
    }
}

TEST(FdOracle, RichardsonSelfConvergence) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    auto u0 = [](double x) { return 0.5 * gauss(x); };
    auto u1 = [](double x) { return 0.2 * x * gauss(x); };
    auto r0 = [](double x) { return 0.3 * gauss(x); };
    auto s0 = [](double x) { return 0.2 * gauss(x); };
    oracle::FdSolution a = oracle::fd_reference(u0, u1, r0, s0, c, -8, 8, 400, 0.2);
    oracle::FdSolution b = oracle::fd_reference(u0, u1, r0, s0, c, -8, 8, 800, 0.2);
    double d = 0;
    for (std::size_t k = 0; k < a.x.size(); ++k) d = std::max(d, std::abs(a.u[k] - b.u[2 * k]));
    EXPECT_LT(d, 1e-5);
}
