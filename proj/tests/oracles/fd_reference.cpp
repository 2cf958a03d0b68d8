#include "fd_reference.hpp"

#include <cmath>

namespace nvw::oracle {

namespace {

struct Fields {
    std::vector<double> u, v, rho, sigma;
};

// Spatial operator: u_tt value and the transport time derivatives at interior nodes.
void rhs(const std::vector<double>& u, const std::vector<double>& rho, const std::vector<double>& sig,
         const WaveSpeed& c, double h, std::vector<double>& acc, std::vector<double>& drho,
         std::vector<double>& dsig) {
    const std::size_t n = u.size();
    acc.assign(n, 0);
    drho.assign(n, 0);
    dsig.assign(n, 0);
    std::vector<double> cc(n), c1(n);
    for (std::size_t i = 0; i < n; ++i) c.eval2(u[i], cc[i], c1[i]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double cp = c.eval(0.5 * (u[i] + u[i + 1])), cm = c.eval(0.5 * (u[i] + u[i - 1]));
        acc[i] = cc[i] * (cp * (u[i + 1] - u[i]) - cm * (u[i] - u[i - 1])) / (h * h) -
                 0.25 * c1[i] * (rho[i] * rho[i] + sig[i] * sig[i]);
        drho[i] = (cc[i + 1] * rho[i + 1] - cc[i - 1] * rho[i - 1]) / (2 * h);
        dsig[i] = -(cc[i + 1] * sig[i + 1] - cc[i - 1] * sig[i - 1]) / (2 * h);
    }
}

Fields rk4_step(const Fields& f, const WaveSpeed& c, double h, double dt) {
    auto deriv = [&](const Fields& s) {
        Fields d;
        std::vector<double> acc, dr, ds;
        rhs(s.u, s.rho, s.sigma, c, h, acc, dr, ds);
        d.u = s.v;
        d.u.front() = d.u.back() = 0;
        d.v = acc;
        d.rho = dr;
        d.sigma = ds;
        return d;
    };
    auto axpy = [](const Fields& a, const Fields& d, double s) {
        Fields r = a;
        for (std::size_t i = 0; i < a.u.size(); ++i) {
            r.u[i] += s * d.u[i];
            r.v[i] += s * d.v[i];
            r.rho[i] += s * d.rho[i];
            r.sigma[i] += s * d.sigma[i];
        }
        return r;
    };
    Fields k1 = deriv(f), k2 = deriv(axpy(f, k1, dt / 2)), k3 = deriv(axpy(f, k2, dt / 2)),
           k4 = deriv(axpy(f, k3, dt));
    Fields r = f;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        r.u[i] += dt / 6 * (k1.u[i] + 2 * k2.u[i] + 2 * k3.u[i] + k4.u[i]);
        r.v[i] += dt / 6 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
        r.rho[i] += dt / 6 * (k1.rho[i] + 2 * k2.rho[i] + 2 * k3.rho[i] + k4.rho[i]);
        r.sigma[i] += dt / 6 * (k1.sigma[i] + 2 * k2.sigma[i] + 2 * k3.sigma[i] + k4.sigma[i]);
    }
    return r;
}

}  // namespace

FdSolution fd_solve(const Fn& u0, const Fn& u1, const Fn& rho0, const Fn& sigma0, const WaveSpeed& c, double xl,
                    double xr, int N, double T) {
    const double h = (xr - xl) / N;
    const std::size_t n = static_cast<std::size_t>(N) + 1;
    FdSolution out;
    out.x.resize(n);
    Fields f;
    f.u.resize(n);
    f.v.resize(n);
    f.rho.resize(n);
    f.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = xl + h * static_cast<double>(i);
        out.x[i] = x;
        bool edge = i == 0 || i + 1 == n;
        f.u[i] = edge ? 0 : u0(x);
        f.v[i] = edge ? 0 : u1(x);
        f.rho[i] = rho0(x);
        f.sigma[i] = sigma0(x);
    }
    const double dt_max = 0.4 * h / c.kappa();
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T) / dt_max)));
    const double dt = T / steps;
    // first step with RK4 on four substeps
    Fields cur = f;
    for (int k = 0; k < 4; ++k) cur = rk4_step(cur, c, h, dt / 4);
    std::vector<double> up = f.u, rp = f.rho, sp = f.sigma;
    std::vector<double> u = cur.u, r = cur.rho, s = cur.sigma;
    std::vector<double> acc, dr, ds;
    for (int k = 1; k < steps; ++k) {
        rhs(u, r, s, c, h, acc, dr, ds);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double un = 2 * u[i] - up[i] + dt * dt * acc[i];
            double rn = rp[i] + 2 * dt * dr[i];
            double sn = sp[i] + 2 * dt * ds[i];
            up[i] = u[i];
            rp[i] = r[i];
            sp[i] = s[i];
            u[i] = un;
            r[i] = rn;
            s[i] = sn;
        }
    }
    out.u = u;
    out.rho = r;
    out.sigma = s;
    return out;
}

FdSolution fd_reference(const Fn& u0, const Fn& u1, const Fn& rho0, const Fn& sigma0, const WaveSpeed& c, double xl,
                        double xr, int N, double T) {
    FdSolution a = fd_solve(u0, u1, rho0, sigma0, c, xl, xr, N, T);
    FdSolution b = fd_solve(u0, u1, rho0, sigma0, c, xl, xr, 2 * N, T);
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        a.u[i] = (4 * b.u[2 * i] - a.u[i]) / 3;
        a.rho[i] = (4 * b.rho[2 * i] - a.rho[i]) / 3;
        a.sigma[i] = (4 * b.sigma[2 * i] - a.sigma[i]) / 3;
    }
    return a;
}

}  // namespace nvw::oracle
