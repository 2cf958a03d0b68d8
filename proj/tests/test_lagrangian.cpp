#include "nvw/errors.hpp"
#include "nvw/evolution.hpp"
#include "nvw/lagrangian.hpp"

#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nvw;

namespace {

constexpr double pi = std::numbers::pi;

double root(const std::function<double(double)>& f, double a, double b) {
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52), it);
    return 0.5 * (r.first + r.second);
}

/// f^{-1}(Y) for f(x) = atan(x) + x + pi/2.
double f_inv(double Y) {
    return root([&](double x) { return std::atan(x) + x + pi / 2 - Y; }, Y - pi - 1, Y + 1);
}

/// Absolutely continuous arctan measure on [-10, 10] with exact cell masses and left tail.
RadonMeasure arctan_measure(const std::vector<double>& g) {
    std::vector<double> d(g.size()), m(g.size() - 1);
    for (std::size_t k = 0; k < g.size(); ++k) d[k] = 1 / (1 + g[k] * g[k]);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) m[k] = std::atan(g[k + 1]) - std::atan(g[k]);
    return RadonMeasure::with_masses(g, d, m, {}, std::atan(g.front()) + pi / 2);
}

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
    return g;
}

EulerianState measures_only(const std::vector<double>& g, RadonMeasure mu, RadonMeasure nu) {
    EulerianState s;
    s.grid = g;
    s.u = s.R = s.S = std::vector<double>(g.size(), 0.0);
    // rho, sigma from the densities with c = 1
    for (const auto& [m, f] : {std::pair{&mu, &s.rho}, std::pair{&nu, &s.sigma}}) {
        f->resize(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) (*f)[k] = 2 * std::sqrt(m->density_at(g[k]));
    }
    s.mu = std::move(mu);
    s.nu = std::move(nu);
    return s;
}

EulerianState smooth_bump(int n) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    std::vector<double> g = uniform(-4, 4, n), u(n), ut(n), ux(n), rho(n), sigma(n);
    for (int k = 0; k < n; ++k) {
        const double x = g[k], e = std::exp(-x * x);
        u[k] = 0.5 * e, ut[k] = 0.2 * x * e, ux[k] = -x * e, rho[k] = 0.3 * e, sigma[k] = 0.2 * e;
    }
    return from_primitives(g, u, ut, ux, rho, sigma, {}, {}, c);
}

}  // namespace

TEST(Lagrangian, ExampleOneInverseOfCumulative) {
    std::vector<double> g = uniform(-10, 10, 201);
    PsiPair psi = map_L(measures_only(g, arctan_measure(g), arctan_measure(g)), WaveSpeed());
    for (const PsiHalf* h : {&psi.h1, &psi.h2})
        for (std::size_t k = 0; k < h->size(); ++k) {
            EXPECT_NEAR(h->x[k], f_inv(h->X[k]), 1e-10);
            // x' = 1 / (1 + 1/(1 + x^2)) >= 1/2
            EXPECT_NEAR(h->xd[k], 1 / (1 + 1 / (1 + h->x[k] * h->x[k])), 1e-10);
        }
    // the curve is the diagonal X = Y = s
    CurveData cv = map_C(psi, WaveSpeed());
    for (std::size_t k = 0; k < cv.size(); ++k) EXPECT_NEAR(cv.X[k], cv.Y[k], 1e-12);
}

TEST(Lagrangian, ExampleTwoPiecewiseMaps) {
    std::vector<double> g = uniform(-10, 10, 401);
    RadonMeasure mu(g, std::vector<double>(g.size(), 0.0), {{0.0, 1.0}});
    PsiPair psi = map_L(measures_only(g, mu, arctan_measure(g)), WaveSpeed());
    for (std::size_t k = 0; k < psi.h1.size(); ++k) {
        const double X = psi.h1.X[k];
        EXPECT_NEAR(psi.h1.x[k], X <= 0 ? X : (X <= 1 ? 0 : X - 1), 1e-12);
    }
    for (std::size_t k = 0; k < psi.h2.size(); ++k) EXPECT_NEAR(psi.h2.x[k], f_inv(psi.h2.X[k]), 1e-10);
    // horizontal stretch of the curve at Y = pi/2 for pi/4 <= s <= pi/4 + 1/2
    CurveData cv = map_C(psi, WaveSpeed());
    int flat = 0;
    for (std::size_t k = 0; k < cv.size(); ++k) {
        const double s = 0.5 * (cv.X[k] + cv.Y[k]);
        if (s > pi / 4 + 1e-9 && s < pi / 4 + 0.5 - 1e-9) {
            EXPECT_NEAR(cv.Y[k], pi / 2, 1e-12);
            ++flat;
        }
    }
    EXPECT_GT(flat, 10);
    EXPECT_TRUE(check_G(cv, WaveSpeed()).ok()) << check_G(cv, WaveSpeed()).summary();
}

TEST(Lagrangian, ExampleThreeBoxCurve) {
    std::vector<double> g = uniform(-2, 2, 41), z(g.size(), 0.0);
    PsiPair psi = map_L(measures_only(g, RadonMeasure(g, z, {{0.0, 1.0}}), RadonMeasure(g, z, {{0.0, 1.0}})),
                        WaveSpeed());
    CurveData cv = map_C(psi, WaveSpeed());
    for (std::size_t k = 0; k < cv.size(); ++k) {
        const double s = 0.5 * (cv.X[k] + cv.Y[k]);
        if (s <= 0 || s >= 1) {
            EXPECT_NEAR(cv.X[k], s, 1e-12);
            EXPECT_NEAR(cv.Y[k], s, 1e-12);
        } else if (s <= 0.5) {
            EXPECT_NEAR(cv.X[k], 0, 1e-12);
            EXPECT_NEAR(cv.Y[k], 2 * s, 1e-12);
        } else {
            EXPECT_NEAR(cv.X[k], 2 * s - 1, 1e-12);
            EXPECT_NEAR(cv.Y[k], 1, 1e-12);
        }
        // time is zero on the whole box
        EXPECT_NEAR(cv.Z[0][k], 0, 1e-14);
    }
}

TEST(Lagrangian, SmoothDataSatisfiesConstraints) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    PsiPair psi = map_L(smooth_bump(201), c);
    EXPECT_TRUE(psi.aligned());
    Report f = check_F(psi, c);
    EXPECT_TRUE(f.ok()) << f.summary();
    for (const PsiHalf* h : {&psi.h1, &psi.h2})
        for (std::size_t k = 0; k < h->size(); ++k) EXPECT_NEAR(h->x[k] + h->J[k], h->X[k], 1e-12);
    CurveData cv = map_C(psi, c);
    Report gr = check_G(cv, c);
    EXPECT_TRUE(gr.ok()) << gr.summary();
}

TEST(Lagrangian, ProjectionUndoesRelabelingProperty) {
    WaveSpeed c = WaveSpeed::builtin(1, 1);
    PsiPair psi = map_L(smooth_bump(101), c);
    for (double a : {0.1, 0.3, 0.6}) {
        auto f = [a](double X) { return X + a * std::sin(X); };
        auto fp = [a](double X) { return 1 + a * std::cos(X); };
        auto g = [a](double X) { return X + a * std::atan(X); };
        auto gp = [a](double X) { return 1 + a / (1 + X * X); };
        PsiPair r = relabel(psi, f, fp, g, gp);
        EXPECT_TRUE(check_F(r, c).ok());
        PsiPair back = project_F0(r);
        for (int i = 0; i < 2; ++i) {
            const PsiHalf& h0 = i ? psi.h2 : psi.h1;
            const PsiHalf& h1 = i ? back.h2 : back.h1;
            for (std::size_t k = 0; k < h0.size(); ++k) {
                EXPECT_NEAR(h1.X[k], h0.X[k], 1e-12);
                EXPECT_NEAR(h1.xd[k], h0.xd[k], 1e-12);
                EXPECT_NEAR(h1.Jd[k], h0.Jd[k], 1e-12);
                EXPECT_NEAR(h1.V[k], h0.V[k], 1e-12);
            }
        }
        // the Eulerian data do not see the labels
        EulerianState s0 = map_M(psi, c), s1 = map_M(r, c);
        EXPECT_LT(sup_u_difference(s0, s1), 1e-12);
        EXPECT_NEAR(total_energy(s0), total_energy(s1), 1e-12);
    }
}

TEST(Lagrangian, RejectsBadArguments) {
    EXPECT_THROW(map_L(smooth_bump(21), WaveSpeed(), 0), ConfigError);
    PsiPair psi = map_L(smooth_bump(21), WaveSpeed::builtin(1, 1));
    auto flat = [](double) { return 0.0; };
    auto id = [](double X) { return X; };
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(relabel(psi, id, flat, id, one), DegeneracyError);
}
