#include "nvw/errors.hpp"
#include "nvw/eulerian.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nvw;

namespace {

struct Data {
    std::vector<double> g, u, ut, ux, rho, sigma;
};

Data gaussian(int n) {
    Data d;
    for (int k = 0; k < n; ++k) {
        const double x = -4 + 8.0 * k / (n - 1), e = std::exp(-x * x);
        d.g.push_back(x);
        d.u.push_back(0.5 * e);
        d.ut.push_back(0.2 * x * e);
        d.ux.push_back(-x * e);
        d.rho.push_back(0.3 * e);
        d.sigma.push_back(0.2 * e);
    }
    return d;
}

}  // namespace

TEST(Eulerian, RiemannVariablesAndDensities) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    Data d = gaussian(101);
    EulerianState s = from_primitives(d.g, d.u, d.ut, d.ux, d.rho, d.sigma, {}, {}, c);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double ck = c.eval(d.u[k]);
        EXPECT_NEAR(s.R[k], d.ut[k] + ck * d.ux[k], 1e-15);
        EXPECT_NEAR(s.S[k], d.ut[k] - ck * d.ux[k], 1e-15);
        EXPECT_NEAR(s.mu.density_at(d.g[k]), 0.25 * (s.R[k] * s.R[k] + ck * d.rho[k] * d.rho[k]), 1e-15);
        EXPECT_NEAR(s.nu.density_at(d.g[k]), 0.25 * (s.S[k] * s.S[k] + ck * d.sigma[k] * d.sigma[k]), 1e-15);
    }
    EXPECT_TRUE(validate(s, c).ok()) << validate(s, c).summary();
}

TEST(Eulerian, EnergyMatchesIndependentQuadrature) {
    // Simpson on a fine grid as an independent estimate of the total energy
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    Data d = gaussian(201);
    EulerianState s = from_primitives(d.g, d.u, d.ut, d.ux, d.rho, d.sigma, {}, {}, c);
    const int n = 4000;
    double E = 0;
    for (int k = 0; k <= n; ++k) {
        const double x = -4 + 8.0 * k / n, e = std::exp(-x * x);
        const double u = 0.5 * e, ut = 0.2 * x * e, ux = -x * e, cu = c.eval(u);
        const double dens = 0.5 * (ut * ut + cu * cu * ux * ux) + 0.25 * cu * (0.09 + 0.04) * e * e;
        E += (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2)) * dens;
    }
    E *= 8.0 / n / 3;
    EXPECT_NEAR(total_energy(s), E, 1e-8);
}

TEST(Eulerian, CompatibilityIsChecked) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    Data d = gaussian(101);
    std::vector<double> wrong = d.ux;
    for (double& v : wrong) v += 0.1;
    EXPECT_THROW(from_primitives(d.g, d.u, d.ut, wrong, d.rho, d.sigma, {}, {}, c), CompatibilityError);
    EXPECT_NO_THROW(from_primitives(d.g, d.u, d.ut, wrong, d.rho, d.sigma, {}, {}, c, false));
    EXPECT_THROW(from_primitives(d.g, d.u, d.ut, std::vector<double>(3), d.rho, d.sigma, {}, {}, c), ValidationError);
}

TEST(Eulerian, PadAndTrimKeepTheData) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    Data d = gaussian(81);
    EulerianState s = from_primitives(d.g, d.u, d.ut, d.ux, d.rho, d.sigma, {{0.0, 0.5}}, {}, c);
    EulerianState p = pad(s, 1.0, 2.0, 0.1);
    EXPECT_NEAR(p.grid.front(), -5, 1e-12);
    EXPECT_NEAR(p.grid.back(), 6, 1e-12);
    EXPECT_DOUBLE_EQ(total_energy(p), total_energy(s));
    for (double x = -4; x <= 4; x += 0.013) EXPECT_DOUBLE_EQ(p.u_at(x), s.u_at(x));
    for (std::size_t k = 0; k < p.size(); ++k)
        if (std::abs(p.grid[k]) > 4 + 1e-9) {
            EXPECT_EQ(p.u[k], 0.0);
        }
    EulerianState t = trim(p);
    EXPECT_DOUBLE_EQ(total_energy(t), total_energy(s));
    EXPECT_LE(t.size(), p.size());
    for (double x = -4; x <= 4; x += 0.013) EXPECT_DOUBLE_EQ(t.u_at(x), s.u_at(x));
}

TEST(Eulerian, ZeroStateIsEmpty) {
    EulerianState z = zero_state({-1, 0, 1});
    EXPECT_EQ(total_energy(z), 0);
    EXPECT_TRUE(validate(z, WaveSpeed()).ok());
    EXPECT_EQ(z.u_at(0.3), 0);
}
