#include "nvw/diagnostics.hpp"

#include "nvw/errors.hpp"
#include "nvw/io.hpp"
#include "nvw/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

namespace nvw {

// ==== conservation ====

nlohmann::json ConservationReport::to_json() const {
    return {{"times", times},     {"total_energy", total_energy}, {"mu_mass", mu_mass},
            {"nu_mass", nu_mass}, {"atoms_count", atoms_count},   {"drift", drift}};
}

void ConservationReport::write_csv(std::ostream& os) const {
    os << "t,total_energy,mu_mass,nu_mass,atoms_count\n";
    for (std::size_t k = 0; k < times.size(); ++k)
        os << fmt_double(times[k]) << ',' << fmt_double(total_energy[k]) << ',' << fmt_double(mu_mass[k]) << ','
           << fmt_double(nu_mass[k]) << ',' << atoms_count[k] << '\n';
}

ConservationReport conservation_series(const EulerianState& state, const std::vector<double>& times,
                                       const WaveSpeed& c, const EvolveParams& params) {
    if (!std::is_sorted(times.begin(), times.end())) throw ConfigError("conservation_series: times must be sorted");
    ConservationReport rep;
    const double E0 = total_energy(state);
    auto slices = evolve_many(state, times, c, params);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const EulerianState& s = slices[k];
        rep.times.push_back(times[k]);
        rep.mu_mass.push_back(s.mu.total());
        rep.nu_mass.push_back(s.nu.total());
        rep.total_energy.push_back(total_energy(s));
        rep.atoms_count.push_back(static_cast<int>(s.mu.atoms().size() + s.nu.atoms().size()));
        if (E0 > 0) rep.drift = std::max(rep.drift, std::abs(rep.total_energy.back() - E0) / E0);
        else rep.drift = std::max(rep.drift, std::abs(rep.total_energy.back()));
    }
    return rep;
}

Report roundtrip_check(const EulerianState& state, const WaveSpeed& c, double field_tol, double cum_tol,
                       int n_atom) {
    Report rep;
    EulerianState back = map_M(map_L(state, c, n_atom), c);
    const std::pair<const char*, std::vector<double> EulerianState::*> fields[] = {
        {"u", &EulerianState::u},         {"R", &EulerianState::R},        {"S", &EulerianState::S},
        {"rho", &EulerianState::rho},     {"sigma", &EulerianState::sigma}};
    for (const auto& [name, f] : fields) {
        double worst = 0, at = 0;
        for (std::size_t k = 0; k < state.size(); ++k) {
            double d = std::abs(EulerianState::sample(back.grid, back.*f, state.grid[k]) - (state.*f)[k]);
            if (d > worst) {
                worst = d;
                at = state.grid[k];
            }
        }
        rep.add(std::string("roundtrip_") + name, worst, field_tol, "x=" + fmt_double(at));
    }
    const double lo = state.grid.front(), hi = state.grid.back();
    for (const auto& [name, a, b] : {std::tuple{"mu", &state.mu, &back.mu}, std::tuple{"nu", &state.nu, &back.nu}}) {
        double worst = 0;
        for (int k = 0; k < 200; ++k) {
            double x = lo + (hi - lo) * (k + 0.5) / 200;
            worst = std::max(worst, std::abs(a->cumulative(x) - b->cumulative(x)));
        }
        worst = std::max(worst, std::abs(a->total() - b->total()));
        rep.add(std::string("roundtrip_cumulative_") + name, worst, cum_tol);
        double atom_err = 0;
        for (const Atom& at : a->atoms()) atom_err = std::max(atom_err, std::abs(b->atom_at(at.x) - at.mass));
        for (const Atom& at : b->atoms()) atom_err = std::max(atom_err, std::abs(a->atom_at(at.x) - at.mass));
        rep.add(std::string("roundtrip_atoms_") + name, atom_err, cum_tol);
    }
    return rep;
}

// ==== smooth-regime residuals ====

namespace {

bool atom_in(const EulerianState& s, double a, double b) {
    for (const auto* m : {&s.mu, &s.nu})
        for (const Atom& at : m->atoms())
            if (at.x >= a && at.x <= b) return true;
    return false;
}

struct Conserved {
    double v, w;
};

Conserved conserved_at(const EulerianState& s, const WaveSpeed& c, double x) {
    double u = s.u_at(x), R = EulerianState::sample(s.grid, s.R, x), S = EulerianState::sample(s.grid, s.S, x);
    double r = EulerianState::sample(s.grid, s.rho, x), q = EulerianState::sample(s.grid, s.sigma, x);
    double ck = c.eval(u);
    double a = R * R + ck * r * r, b = S * S + ck * q * q;
    return {a + b, (a - b) / ck};
}

}  // namespace

ConslawResidual conslaw_residual(const EulerianState& state, double T, double h, double xa, double xb,
                                 const WaveSpeed& c, const EvolveParams& params) {
    if (!(h > 0) || !(xb > xa)) throw ConfigError("conslaw_residual: need h > 0 and xa < xb");
    auto sl = evolve_many(state, {T - h, T, T + h}, c, params);
    for (const auto& s : sl)
        if (atom_in(s, xa - h, xb + h)) throw NotApplicable("conslaw_residual: atoms in the region");
    ConslawResidual out;
    out.h = h;
    const int n = std::max(1, static_cast<int>(std::floor((xb - xa) / h)));
    double r1 = 0, r2 = 0, sc = 0;
    for (int k = 0; k <= n; ++k) {
        double x = xa + (xb - xa) * k / n;
        Conserved m = conserved_at(sl[0], c, x), p = conserved_at(sl[2], c, x);
        Conserved l = conserved_at(sl[1], c, x - h), r = conserved_at(sl[1], c, x + h);
        double cl = c.eval(sl[1].u_at(x - h)), cr = c.eval(sl[1].u_at(x + h));
        double vt = (p.v - m.v) / (2 * h), wt = (p.w - m.w) / (2 * h);
        double flux_v = (cr * cr * r.w - cl * cl * l.w) / (2 * h), flux_w = (r.v - l.v) / (2 * h);
        r1 += std::abs(vt - flux_v);
        r2 += std::abs(wt - flux_w);
        sc += std::abs(vt) + std::abs(wt);
    }
    out.v_residual = r1 / (n + 1);
    out.w_residual = r2 / (n + 1);
    out.scale = sc / (n + 1);
    return out;
}

namespace {

double bump(double z) {
    if (std::abs(z) >= 1) return 0;
    double q = 1 - z * z;
    return q * q * q;
}

double bump_d(double z) {
    if (std::abs(z) >= 1) return 0;
    double q = 1 - z * z;
    return -6 * z * q * q;
}

}  // namespace

double TestFunction::value(double t, double x) const { return bump((t - t0) / r) * bump((x - x0) / r); }
double TestFunction::dt(double t, double x) const { return bump_d((t - t0) / r) / r * bump((x - x0) / r); }
double TestFunction::dx(double t, double x) const { return bump((t - t0) / r) * bump_d((x - x0) / r) / r; }

WeakResidual weak_residual(const GridSolution& sol, const WaveSpeed& c, const std::vector<TestFunction>& phis) {
    WeakResidual out;
    for (const TestFunction& phi : phis) {
        double diff[3] = {0, 0, 0}, mag[3] = {0, 0, 0};
        for (const auto& cp : sol.cells) {
            if (!cp) continue;
            const Cell& cell = *cp;
            auto terms = [&](std::size_t i, std::size_t j, double* f, double* g) {
                std::size_t id = cell.idx(i, j);
                double t = cell.Z[0][id] - sol.t_offset, x = cell.Z[1][id], u = cell.Z[2][id];
                double ck, c1;
                c.eval2(u, ck, c1);
                double ph = phi.value(t, x), pt = phi.dt(t, x), px = phi.dx(t, x);
                double UX = cell.V[2][id], UY = cell.W[2][id], xX = cell.V[1][id], xY = cell.W[1][id];
                double JX = cell.V[3][id], JY = cell.W[3][id];
                double a = 2 * (pt - ck * px) * UX * xY - 2 * (pt + ck * px) * UY * xX - 2 * c1 * UX * UY * ph;
                double b = 2 * c1 / (ck * ck) * (xY * JX + xX * JY) * ph;
                f[0] = a - b;
                g[0] = std::abs(a) + std::abs(b);
                f[1] = 2 * (pt - ck * px) * sol.p[i] * xY / ck;
                g[1] = std::abs(f[1]);
                f[2] = 2 * (pt + ck * px) * sol.q[j] * xX / ck;
                g[2] = std::abs(f[2]);
            };
            for (std::size_t j = cell.j0; j < cell.j1; ++j) {
                double dY = sol.Y[j + 1] - sol.Y[j];
                if (!(dY > 0)) continue;
                for (std::size_t i = cell.i0; i < cell.i1; ++i) {
                    double dX = sol.X[i + 1] - sol.X[i];
                    if (!(dX > 0)) continue;
                    double f[3], g[3], sf[3] = {0, 0, 0}, sg[3] = {0, 0, 0};
                    for (auto [ii, jj] : {std::pair{i, j}, std::pair{i + 1, j}, std::pair{i, j + 1},
                                          std::pair{i + 1, j + 1}}) {
                        terms(ii, jj, f, g);
                        for (int e = 0; e < 3; ++e) {
                            sf[e] += f[e];
                            sg[e] += g[e];
                        }
                    }
                    for (int e = 0; e < 3; ++e) {
                        diff[e] += 0.25 * sf[e] * dX * dY;
                        mag[e] += 0.25 * sg[e] * dX * dY;
                    }
                }
            }
        }
        double* res[3] = {&out.wave, &out.rho, &out.sigma};
        for (int e = 0; e < 3; ++e)
            if (mag[e] > 0) *res[e] = std::max(*res[e], std::abs(diff[e]) / mag[e]);
    }
    return out;
}

double lagrangian_consistency(const GridSolution& sol, const std::vector<double>& slice_times, double band,
                              const WaveSpeed& c, const EvolveParams& params) {
    double worst = 0;
    for (double tk : slice_times) {
        EulerianState s = slice_at(sol, tk, c, params);
        for (const auto& cp : sol.cells) {
            if (!cp) continue;
            const Cell& cell = *cp;
            for (std::size_t id = 0; id < cell.Z[0].size(); ++id) {
                double t = cell.Z[0][id] - sol.t_offset;
                if (std::abs(t - tk) > band) continue;
                double x = cell.Z[1][id];
                if (x < s.grid.front() || x > s.grid.back()) continue;
                double ut = 0.5 * (EulerianState::sample(s.grid, s.R, x) + EulerianState::sample(s.grid, s.S, x));
                worst = std::max(worst, std::abs(s.u_at(x) + (t - tk) * ut - cell.Z[2][id]));
            }
        }
    }
    return worst;
}

// ==== regularity experiments ====

namespace {

double interval_min(const EulerianState& s, const std::vector<double>& f, double a, double b) {
    double m = std::min(EulerianState::sample(s.grid, f, a), EulerianState::sample(s.grid, f, b));
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s.grid[k] >= a && s.grid[k] <= b) m = std::min(m, f[k]);
    return m;
}

/// Nodes of both states inside [a, b] plus the end points.
std::vector<double> probe_points(const EulerianState& p, const EulerianState& q, double a, double b) {
    std::vector<double> x = {a, b};
    for (const auto* s : {&p, &q})
        for (double g : s->grid)
            if (g > a && g < b) x.push_back(g);
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    return x;
}

double l1_on(const EulerianState& s, const std::vector<double>& f, double a, double b) {
    std::vector<double> x = probe_points(s, s, a, b);
    double sum = 0;
    for (std::size_t k = 1; k < x.size(); ++k)
        sum += 0.5 * (std::abs(EulerianState::sample(s.grid, f, x[k - 1])) +
                      std::abs(EulerianState::sample(s.grid, f, x[k]))) *
               (x[k] - x[k - 1]);
    return sum;
}

double shrunk_bounds(const EulerianState& s, double tau, const WaveSpeed& c, double& xa, double& xb) {
    double xl = s.grid.front(), xr = s.grid.back();
    if (!(tau >= 0) || tau > (xr - xl) / (2 * c.kappa()))
        throw NotApplicable("tau must lie in [0, (x_r - x_l) / (2 kappa)]");
    xa = xl + c.kappa() * tau;
    xb = xr - c.kappa() * tau;
    return tau;
}

}  // namespace

nlohmann::json RegularizationReport::to_json() const {
    return {{"tau", tau},          {"interval", {xa, xb}},   {"rho0_min", rho0_min},
            {"sigma0_min", sigma0_min}, {"rho_min", rho_min}, {"sigma_min", sigma_min},
            {"atoms_inside", atoms_inside}, {"pass", pass()}};
}

RegularizationReport regularization_check(const EulerianState& state, double tau, const WaveSpeed& c,
                                          const EvolveParams& params) {
    if (state.size() < 2) throw ValidationError("regularization_check: state needs at least two nodes");
    RegularizationReport rep;
    rep.rho0_min = *std::min_element(state.rho.begin(), state.rho.end());
    rep.sigma0_min = *std::min_element(state.sigma.begin(), state.sigma.end());
    if (!(rep.rho0_min > 0) || !(rep.sigma0_min > 0))
        throw NotApplicable("regularization_check: rho0 and sigma0 must be bounded below by a positive constant");
    if (!state.mu.atoms().empty() || !state.nu.atoms().empty())
        throw NotApplicable("regularization_check: initial measures must be absolutely continuous");
    rep.tau = shrunk_bounds(state, tau, c, rep.xa, rep.xb);
    EulerianState s = evolve(state, tau, c, params);
    rep.rho_min = interval_min(s, s.rho, rep.xa, rep.xb);
    rep.sigma_min = interval_min(s, s.sigma, rep.xa, rep.xb);
    for (const auto* m : {&s.mu, &s.nu})
        for (const Atom& a : m->atoms())
            if (a.x >= rep.xa && a.x <= rep.xb) ++rep.atoms_inside;
    return rep;
}

double primitive_c(const WaveSpeed& c, double u) {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    if (u == 0) return 0;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(u) / 0.05)));
    const double h = u / n;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        double mid = (k + 0.5) * h;
        for (int g = 0; g < 5; ++g) sum += gw[g] * c.eval(mid + 0.5 * h * gx[g]);
    }
    return 0.5 * h * sum;
}

namespace {

double inverse_primitive(const WaveSpeed& c, double y) {
    if (y == 0) return 0;
    // c >= 1/kappa bounds the root by kappa |y|
    double b = c.kappa() * std::abs(y) * 1.01;
    auto f = [&](double u) { return primitive_c(c, u) - y; };
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, -b, b, boost::math::tools::eps_tolerance<double>(52), it);
    return 0.5 * (r.first + r.second);
}

double total_integral(const std::vector<double>& grid, const std::vector<double>& f) {
    auto m = cell_integrals(grid, f);
    return std::accumulate(m.begin(), m.end(), 0.0);
}

}  // namespace

EulerianState perturbed_state(const EulerianState& base, double eps, const WaveSpeed& c, double* lambda_R,
                              double* lambda_S) {
    const std::size_t n = base.size();
    const auto& g = base.grid;
    std::vector<double> R2(n), S2(n), C0(n);
    for (std::size_t k = 0; k < n; ++k) {
        R2[k] = base.R[k] * base.R[k];
        S2[k] = base.S[k] * base.S[k];
        C0[k] = primitive_c(c, base.u[k]);
    }
    const double IR = total_integral(g, R2), IS = total_integral(g, S2);
    double lR = 1, lS = 1;
    std::vector<double> u = base.u;
    if (eps != 0) {
        if (!(IR > 0) || !(IS > 0)) throw ConfigError("perturbed_state: base R and S must carry energy");
        for (int it = 0; it < 100; ++it) {
            std::vector<double> cu(n);
            for (std::size_t k = 0; k < n; ++k) cu[k] = c.eval(u[k]);
            double Ic = total_integral(g, cu);
            double qR = 1 - eps * eps * Ic / IR, qS = 1 - eps * eps * Ic / IS;
            if (!(qR > 0) || !(qS > 0)) throw ConfigError("perturbed_state: eps too large for the base energy");
            double nR = std::sqrt(qR), nS = std::sqrt(qS);
            std::vector<double> un(n);
            if (std::abs(nR - nS) <= 1e-14) {
                for (std::size_t k = 0; k < n; ++k) un[k] = inverse_primitive(c, nR * C0[k]);
            } else {
                // C(u^n) = C(u0) + int ((lR - 1) R0 - (lS - 1) S0) / 2
                double acc = C0[0];
                un[0] = inverse_primitive(c, acc);
                for (std::size_t k = 1; k < n; ++k) {
                    double fa = ((nR - 1) * base.R[k - 1] - (nS - 1) * base.S[k - 1]) / 2;
                    double fb = ((nR - 1) * base.R[k] - (nS - 1) * base.S[k]) / 2;
                    acc += 0.5 * (fa + fb) * (g[k] - g[k - 1]);
                    un[k] = inverse_primitive(c, C0[k] - C0[0] + acc);
                }
            }
            double ch = std::abs(nR - lR) + std::abs(nS - lS);
            for (std::size_t k = 0; k < n; ++k) ch = std::max(ch, std::abs(un[k] - u[k]));
            lR = nR;
            lS = nS;
            u = std::move(un);
            if (ch <= 1e-15) break;
        }
    }
    std::vector<double> R(n), S(n), e(n, eps);
    for (std::size_t k = 0; k < n; ++k) {
        R[k] = lR * base.R[k];
        S[k] = lS * base.S[k];
    }
    if (lambda_R) *lambda_R = lR;
    if (lambda_S) *lambda_S = lS;
    return from_riemann(g, u, R, S, e, e, {}, {}, c);
}

nlohmann::json ApproximationReport::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
        rs.push_back({{"eps", r.eps},
                      {"lambda_R", r.lambda_R},
                      {"lambda_S", r.lambda_S},
                      {"u_sup_diff", r.u_sup_diff},
                      {"rho_l1", r.rho_l1},
                      {"sigma_l1", r.sigma_l1}});
    return {{"tau", tau},
            {"interval", {xa, xb}},
            {"rows", rs},
            {"u_decreasing", u_decreasing},
            {"rho_decreasing", rho_decreasing}};
}

void ApproximationReport::write_csv(std::ostream& os) const {
    os << "eps,lambda_R,lambda_S,u_sup_diff,rho_l1,sigma_l1\n";
    for (const auto& r : rows) write_csv_row(os, {r.eps, r.lambda_R, r.lambda_S, r.u_sup_diff, r.rho_l1, r.sigma_l1});
}

ApproximationReport approximation_study(const EulerianState& base, const std::vector<double>& epsilons, double tau,
                                        const WaveSpeed& c, const EvolveParams& params) {
    for (std::size_t k = 0; k < base.size(); ++k)
        if (base.rho[k] != 0 || base.sigma[k] != 0)
            throw NotApplicable("approximation_study: base data must have rho0 = sigma0 = 0");
    if (!base.mu.atoms().empty() || !base.nu.atoms().empty())
        throw NotApplicable("approximation_study: base measures must be absolutely continuous");
    ApproximationReport rep;
    rep.tau = shrunk_bounds(base, tau, c, rep.xa, rep.xb);
    const EulerianState ref = evolve(base, tau, c, params);
    for (double eps : epsilons) {
        ApproximationRow row;
        row.eps = eps;
        EulerianState pn = perturbed_state(base, eps, c, &row.lambda_R, &row.lambda_S);
        EulerianState sn = evolve(pn, tau, c, params);
        for (double x : probe_points(sn, ref, rep.xa, rep.xb))
            row.u_sup_diff = std::max(row.u_sup_diff, std::abs(sn.u_at(x) - ref.u_at(x)));
        row.rho_l1 = l1_on(sn, sn.rho, rep.xa, rep.xb);
        row.sigma_l1 = l1_on(sn, sn.sigma, rep.xa, rep.xb);
        if (!rep.rows.empty()) {
            rep.u_decreasing = rep.u_decreasing && row.u_sup_diff < rep.rows.back().u_sup_diff;
            rep.rho_decreasing = rep.rho_decreasing && row.rho_l1 < rep.rows.back().rho_l1;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace nvw
