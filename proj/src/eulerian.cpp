#include "nvw/eulerian.hpp"

#include "nvw/errors.hpp"
#include "nvw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvw {

namespace {

void check_sizes(const std::vector<double>& grid, std::initializer_list<const std::vector<double>*> fields) {
    for (const auto* f : fields)
        if (f->size() != grid.size()) throw ValidationError("eulerian: all samples must share the grid");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ValidationError("eulerian: grid must be strictly increasing");
}

std::string at_x(const std::vector<double>& grid, std::size_t k) {
    std::ostringstream os;
    os << "x=" << grid[k] << " (node " << k << ")";
    return os.str();
}

// Second-order derivative on a possibly non-uniform grid.
double centered_derivative(const std::vector<double>& x, const std::vector<double>& f, std::size_t i) {
    double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    return (-hp / (hm * (hm + hp))) * f[i - 1] + ((hp - hm) / (hm * hp)) * f[i] + (hm / (hp * (hm + hp))) * f[i + 1];
}

}  // namespace

double EulerianState::sample(const std::vector<double>& grid, const std::vector<double>& f, double x) {
    if (grid.empty() || x < grid.front() || x > grid.back()) return 0;
    if (grid.size() == 1) return f[0];
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin());
    if (k >= grid.size()) return f.back();
    --k;
    double th = (x - grid[k]) / (grid[k + 1] - grid[k]);
    return f[k] + th * (f[k + 1] - f[k]);
}

EulerianState from_riemann(const std::vector<double>& grid, const std::vector<double>& u, const std::vector<double>& R,
                           const std::vector<double>& S, const std::vector<double>& rho,
                           const std::vector<double>& sigma, const std::vector<Atom>& mu_atoms,
                           const std::vector<Atom>& nu_atoms, const WaveSpeed& c, double mu_tail, double nu_tail) {
    check_sizes(grid, {&u, &R, &S, &rho, &sigma});
    EulerianState s;
    s.grid = grid;
    s.u = u;
    s.R = R;
    s.S = S;
    s.rho = rho;
    s.sigma = sigma;
    std::vector<double> dm(grid.size()), dn(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double ck = c.eval(u[k]);
        dm[k] = 0.25 * (R[k] * R[k] + ck * rho[k] * rho[k]);
        dn[k] = 0.25 * (S[k] * S[k] + ck * sigma[k] * sigma[k]);
    }
    // fourth-order cell masses keep X = x + mu((-inf, x)) consistent with the pointwise densities
    auto mm = cell_integrals(grid, dm), mn = cell_integrals(grid, dn);
    s.mu = RadonMeasure::with_masses(grid, dm, mm, mu_atoms, mu_tail);
    s.nu = RadonMeasure::with_masses(grid, dn, mn, nu_atoms, nu_tail);
    return s;
}

EulerianState from_primitives(const std::vector<double>& grid, const std::vector<double>& u,
                              const std::vector<double>& ut, const std::vector<double>& ux,
                              const std::vector<double>& rho, const std::vector<double>& sigma,
                              const std::vector<Atom>& mu_atoms, const std::vector<Atom>& nu_atoms,
                              const WaveSpeed& c, bool check_compatibility) {
    check_sizes(grid, {&u, &ut, &ux, &rho, &sigma});
    std::vector<double> R(grid.size()), S(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double ck = c.eval(u[k]);
        R[k] = ut[k] + ck * ux[k];
        S[k] = ut[k] - ck * ux[k];
    }
    EulerianState s = from_riemann(grid, u, R, S, rho, sigma, mu_atoms, nu_atoms, c);
    if (check_compatibility) {
        std::size_t worst = 0;
        double r = compatibility_residual(s, c, &worst);
        if (!(r <= 1)) {
            std::ostringstream os;
            os << "u_x inconsistent with u: residual " << r << " x tolerance at " << at_x(grid, worst);
            throw CompatibilityError(os.str());
        }
    }
    return s;
}

EulerianState zero_state(const std::vector<double>& grid) {
    std::vector<double> z(grid.size(), 0.0);
    return from_riemann(grid, z, z, z, z, z, {}, {}, WaveSpeed::constant(1.0));
}

double total_energy(const EulerianState& s) { return s.mu.total() + s.nu.total(); }

double compatibility_residual(const EulerianState& s, const WaveSpeed& c, std::size_t* worst) {
    const std::size_t n = s.size();
    if (n < 3) return 0;
    std::vector<double> ux(n);
    double umax = 0;
    for (std::size_t k = 0; k < n; ++k) {
        ux[k] = (s.R[k] - s.S[k]) / (2 * c.eval(s.u[k]));
        umax = std::max(umax, std::abs(ux[k]));
    }
    double worst_ratio = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double h = std::max(s.grid[i] - s.grid[i - 1], s.grid[i + 1] - s.grid[i]);
        double tol = 10 * h * h * (1 + umax);
        double r = std::abs(centered_derivative(s.grid, s.u, i) - ux[i]) / tol;
        if (!(r <= worst_ratio)) {
            worst_ratio = r;
            if (worst) *worst = i;
        }
    }
    return worst_ratio;
}

Report validate(const EulerianState& s, const WaveSpeed& c) {
    Report rep;
    const std::size_t n = s.size();
    bool finite = true;
    std::string bad;
    for (std::size_t k = 0; k < n && finite; ++k) {
        for (double v : {s.u[k], s.R[k], s.S[k], s.rho[k], s.sigma[k]}) {
            if (!std::isfinite(v)) {
                finite = false;
                bad = at_x(s.grid, k);
            }
        }
    }
    rep.add_flag("fields_finite", finite, bad);

    std::size_t w = 0;
    double comp = compatibility_residual(s, c, &w);
    rep.add("compatibility_ux", comp, 1.0, n >= 3 ? at_x(s.grid, w) : "");

    auto density_check = [&](const char* name, const RadonMeasure& m, const std::vector<double>& a,
                             const std::vector<double>& b) {
        double scale = 0, worst = 0;
        std::size_t wk = 0;
        std::vector<double> expect(n);
        for (std::size_t k = 0; k < n; ++k) {
            double ck = c.eval(s.u[k]);
            expect[k] = 0.25 * (a[k] * a[k] + ck * b[k] * b[k]);
            scale = std::max(scale, expect[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            double d = std::abs(m.density_at(s.grid[k]) - expect[k]);
            if (d > worst) {
                worst = d;
                wk = k;
            }
        }
        double rel = worst / std::max(scale, 1e-300);
        if (scale == 0) rel = worst;
        rep.add(name, rel, 1e-10, n ? at_x(s.grid, wk) : "");
    };
    density_check("mu_density", s.mu, s.R, s.rho);
    density_check("nu_density", s.nu, s.S, s.sigma);

    auto nonneg = [&](const char* name, const RadonMeasure& m) {
        bool ok = m.left_tail() >= 0;
        for (double d : m.density()) ok = ok && d >= 0;
        for (double d : m.cell_masses()) ok = ok && d >= 0;
        for (const Atom& a : m.atoms()) ok = ok && a.mass > 0;
        rep.add_flag(name, ok);
    };
    nonneg("mu_positive", s.mu);
    nonneg("nu_positive", s.nu);
    return rep;
}

namespace {

RadonMeasure pad_measure(const RadonMeasure& m, const std::vector<double>& left_pts, const std::vector<double>& right_pts) {
    if (m.grid().empty()) return m;
    std::vector<double> g, d, ms;
    for (double x : left_pts)
        if (x < m.grid().front()) {
            g.push_back(x);
            d.push_back(0);
        }
    std::size_t nl = g.size();
    for (std::size_t k = 0; k < nl; ++k) ms.push_back(0);
    g.insert(g.end(), m.grid().begin(), m.grid().end());
    d.insert(d.end(), m.density().begin(), m.density().end());
    ms.insert(ms.end(), m.cell_masses().begin(), m.cell_masses().end());
    for (double x : right_pts)
        if (x > g.back()) {
            g.push_back(x);
            d.push_back(0);
            ms.push_back(0);
        }
    return RadonMeasure::with_masses(g, d, ms, m.atoms(), m.left_tail());
}

}  // namespace

EulerianState pad(const EulerianState& s, double left, double right, double h) {
    if (s.grid.empty() || !(h > 0)) return s;
    std::vector<double> lp, rp;
    int nl = static_cast<int>(std::ceil(left / h - 1e-9)), nr = static_cast<int>(std::ceil(right / h - 1e-9));
    for (int k = nl; k >= 1; --k) lp.push_back(s.grid.front() - k * h);
    for (int k = 1; k <= nr; ++k) rp.push_back(s.grid.back() + k * h);
    EulerianState o;
    o.grid = lp;
    o.grid.insert(o.grid.end(), s.grid.begin(), s.grid.end());
    o.grid.insert(o.grid.end(), rp.begin(), rp.end());
    auto ext = [&](const std::vector<double>& f) {
        std::vector<double> r(lp.size(), 0.0);
        r.insert(r.end(), f.begin(), f.end());
        r.resize(o.grid.size(), 0.0);
        return r;
    };
    o.u = ext(s.u);
    o.R = ext(s.R);
    o.S = ext(s.S);
    o.rho = ext(s.rho);
    o.sigma = ext(s.sigma);
    o.mu = pad_measure(s.mu, lp, rp);
    o.nu = pad_measure(s.nu, lp, rp);
    return o;
}

EulerianState trim(const EulerianState& s) {
    const std::size_t n = s.size();
    if (n < 3 || s.mu.grid() != s.grid || s.nu.grid() != s.grid) return s;
    auto active = [&](std::size_t k) {
        if (s.u[k] != 0 || s.R[k] != 0 || s.S[k] != 0 || s.rho[k] != 0 || s.sigma[k] != 0) return true;
        if (s.mu.density()[k] != 0 || s.nu.density()[k] != 0) return true;
        if (k + 1 < n && (s.mu.cell_masses()[k] != 0 || s.nu.cell_masses()[k] != 0)) return true;
        if (k > 0 && (s.mu.cell_masses()[k - 1] != 0 || s.nu.cell_masses()[k - 1] != 0)) return true;
        return false;
    };
    std::size_t i0 = n, i1 = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (active(k)) {
            i0 = std::min(i0, k);
            i1 = k;
        }
    for (const RadonMeasure* m : {&s.mu, &s.nu})
        for (const Atom& a : m->atoms()) {
            std::size_t k = static_cast<std::size_t>(std::lower_bound(s.grid.begin(), s.grid.end(), a.x) - s.grid.begin());
            k = std::min(k, n - 1);
            i0 = std::min(i0, k > 0 ? k - 1 : 0);
            i1 = std::max(i1, k);
        }
    if (i0 == n) {
        // nothing active: keep a minimal zero grid
        i0 = 0;
        i1 = std::min<std::size_t>(1, n - 1);
    }
    std::size_t a = i0 > 0 ? i0 - 1 : 0, b = std::min(n - 1, i1 + 1);
    if (a == 0 && b == n - 1) return s;
    auto cut = [&](const std::vector<double>& f) { return std::vector<double>(f.begin() + a, f.begin() + b + 1); };
    EulerianState o;
    o.grid = cut(s.grid);
    o.u = cut(s.u);
    o.R = cut(s.R);
    o.S = cut(s.S);
    o.rho = cut(s.rho);
    o.sigma = cut(s.sigma);
    auto cut_m = [&](const RadonMeasure& m) {
        double tail = m.left_tail();
        for (std::size_t k = 0; k < a; ++k) tail += m.cell_masses()[k];
        std::vector<double> ms(m.cell_masses().begin() + a, m.cell_masses().begin() + b);
        return RadonMeasure::with_masses(o.grid, cut(m.density()), ms, m.atoms(), tail);
    };
    o.mu = cut_m(s.mu);
    o.nu = cut_m(s.nu);
    return o;
}

}  // namespace nvw
