#include "nvw/diagnostics.hpp"
#include "nvw/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace nvw;

namespace {

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
    return g;
}

EulerianState bump(int n) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    std::vector<double> g = uniform(-4, 4, n), u(n), ut(n), ux(n), rho(n), sigma(n);
    for (int k = 0; k < n; ++k) {
        const double x = g[k], e = std::exp(-x * x);
        u[k] = 0.5 * e, ut[k] = 0.2 * x * e, ux[k] = -x * e, rho[k] = 0.3 * e, sigma[k] = 0.2 * e;
    }
    return from_primitives(g, u, ut, ux, rho, sigma, {}, {}, c);
}

/// u0 = 0.5 (1 - (x/2)^2)^4 on [-2, 2], rho0 = sigma0 = d + 0.25 exp(-x^2) (or zero).
EulerianState plateau(int n, double d, bool zero_densities) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    std::vector<double> g = uniform(-2, 2, n), u(n), ut(n, 0.0), ux(n), rho(n), sigma(n);
    for (int k = 0; k < n; ++k) {
        const double x = g[k], q = 1 - x * x / 4;
        u[k] = 0.5 * std::pow(q, 4);
        ux[k] = 2 * std::pow(q, 3) * (-x / 2);
        rho[k] = sigma[k] = zero_densities ? 0 : d + 0.25 * std::exp(-x * x);
    }
    return from_primitives(g, u, ut, ux, rho, sigma, {}, {}, c);
}

}  // namespace

TEST(Diagnostics, ConservationSeries) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    ConservationReport r = conservation_series(bump(129), {-0.2, 0.0, 0.25, 0.5}, c);
    ASSERT_EQ(r.times.size(), 4u);
    EXPECT_LT(r.drift, 1e-10);
    for (std::size_t k = 0; k < r.times.size(); ++k)
        EXPECT_NEAR(r.mu_mass[k] + r.nu_mass[k], r.total_energy[k], 1e-14);
    std::ostringstream os;
    r.write_csv(os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,total_energy,mu_mass,nu_mass,atoms_count");
    EXPECT_THROW(conservation_series(bump(33), {0.5, 0.1}, c), ConfigError);
}

TEST(Diagnostics, RoundTripOnSmoothData) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    const double h = 8.0 / 128;
    Report r = roundtrip_check(bump(129), c, 50 * h * h, 1e-8);
    EXPECT_TRUE(r.ok()) << r.summary();
    EXPECT_NE(r.find("roundtrip_u"), nullptr);
}

TEST(Diagnostics, ConservationLawResidualConverges) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    double prev = 0;
    for (int n : {65, 129}) {
        const double h = 8.0 / (n - 1);
        ConslawResidual r = conslaw_residual(bump(n), 0.2, h, -3, 3, c);
        EXPECT_GT(r.scale, 0);
        if (prev > 0) {
            EXPECT_GT(prev / r.v_residual, 2.5);
        }
        prev = r.v_residual;
    }
    EXPECT_THROW(conslaw_residual(bump(33), 0.2, -1, -3, 3, c), ConfigError);
}

TEST(Diagnostics, TestFunctionDerivatives) {
    TestFunction phi{0.3, 0.1, 0.5};
    const double h = 1e-6;
    for (double t : {0.1, 0.3, 0.55})
        for (double x : {-0.2, 0.1, 0.4}) {
            EXPECT_NEAR(phi.dt(t, x), (phi.value(t + h, x) - phi.value(t - h, x)) / (2 * h), 1e-6);
            EXPECT_NEAR(phi.dx(t, x), (phi.value(t, x + h) - phi.value(t, x - h)) / (2 * h), 1e-6);
        }
    EXPECT_EQ(phi.value(0.9, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(phi.value(0.3, 0.1), 1.0);
}

TEST(Diagnostics, WeakFormResidualConverges) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    std::vector<TestFunction> phis = {{0.3, 0, 0.25}, {0.4, 0.5, 0.3}, {0.5, -0.5, 0.3}};
    WeakResidual prev;
    for (int n : {65, 129}) {
        EulerianState s = bump(n);
        GridSolution sol = tile_solve(map_C(map_L(s, c), c), c);
        WeakResidual w = weak_residual(sol, c, phis);
        if (prev.wave > 0) {
            EXPECT_GT(prev.wave / w.wave, 3);
            EXPECT_LT(w.rho, prev.rho);
            EXPECT_LT(w.sigma, prev.sigma);
        }
        EXPECT_LT(w.wave, 1e-2);
        prev = w;
    }
}

TEST(Diagnostics, LagrangianConsistency) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    EulerianState s = bump(129);
    GridSolution sol = solve_band(s, 0.5, c);
    const double h = 8.0 / 128;
    EXPECT_LT(lagrangian_consistency(sol, {0.1, 0.25, 0.5}, h, c), 1e-2);
}

TEST(Diagnostics, RegularizationKeepsDensitiesPositive) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    RegularizationReport r = regularization_check(plateau(101, 0.5, false), 0.4, c);
    EXPECT_TRUE(r.pass());
    EXPECT_NEAR(r.xa, -2 + c.kappa() * 0.4, 1e-12);
    EXPECT_NEAR(r.xb, 2 - c.kappa() * 0.4, 1e-12);
    EXPECT_GT(r.rho_min, 0.25);
    EXPECT_THROW(regularization_check(plateau(101, 0, true), 0.4, c), NotApplicable);
    EXPECT_THROW(regularization_check(plateau(101, 0.5, false), 5.0, c), NotApplicable);
}

TEST(Diagnostics, PerturbedStateKeepsEnergy) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    EulerianState base = plateau(101, 0, true);
    for (double eps : {0.2, 0.05}) {
        double lR = 0, lS = 0;
        EulerianState p = perturbed_state(base, eps, c, &lR, &lS);
        EXPECT_LT(lR, 1);
        EXPECT_GT(lR, 0);
        EXPECT_NEAR(p.mu.total(), base.mu.total(), 1e-8 * base.mu.total());
        EXPECT_NEAR(p.nu.total(), base.nu.total(), 1e-8 * base.nu.total());
        for (double r : p.rho) EXPECT_DOUBLE_EQ(r, eps);
    }
}

TEST(Diagnostics, ApproximationConverges) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    ApproximationReport r = approximation_study(plateau(101, 0, true), {0.2, 0.1, 0.05, 0.0}, 0.4, c);
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_TRUE(r.u_decreasing);
    EXPECT_TRUE(r.rho_decreasing);
    EXPECT_EQ(r.rows.back().u_sup_diff, 0.0);
    EXPECT_EQ(r.rows.back().rho_l1, 0.0);
}

TEST(Diagnostics, PrimitiveOfSpeed) {
    EXPECT_NEAR(primitive_c(WaveSpeed::constant(1.5), 0.7), 1.05, 1e-14);
    for (double u : {-2.0, 0.3, 1.7}) EXPECT_NEAR(primitive_c(WaveSpeed::builtin(1, 2), u), u + 2 * std::atan(u), 1e-13);
}
