#include "nvw/lagrangian.hpp"

#include "nvw/errors.hpp"
#include "nvw/io.hpp"
#include "nvw/quadrature.hpp"
#include "nvw/system.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nvw {

void PsiHalf::push(double X_, double x_, double U_, double J_, double K_, double V_, double H_, double xd_,
                   double Jd_, double Kd_) {
    X.push_back(X_);
    x.push_back(x_);
    U.push_back(U_);
    J.push_back(J_);
    K.push_back(K_);
    V.push_back(V_);
    H.push_back(H_);
    xd.push_back(xd_);
    Jd.push_back(Jd_);
    Kd.push_back(Kd_);
}

void PsiHalf::push_from(const PsiHalf& o, std::size_t k) {
    push(o.X[k], o.x[k], o.U[k], o.J[k], o.K[k], o.V[k], o.H[k], o.xd[k], o.Jd[k], o.Kd[k]);
}

bool PsiHalf::same_derivatives(std::size_t j, const PsiHalf& o, std::size_t k) const {
    return xd[j] == o.xd[k] && Jd[j] == o.Jd[k] && Kd[j] == o.Kd[k] && V[j] == o.V[k] && H[j] == o.H[k];
}

bool PsiPair::aligned() const {
    if (h1.size() != h2.size()) return false;
    for (std::size_t k = 0; k < h1.size(); ++k)
        if (h1.x[k] != h2.x[k]) return false;
    return true;
}

void CurveData::resize(std::size_t n) {
    s.assign(n, 0);
    X.assign(n, 0);
    Y.assign(n, 0);
    for (int c = 0; c < 5; ++c) {
        Z[c].assign(n, 0);
        V[c].assign(n, 0);
        W[c].assign(n, 0);
    }
    p.assign(n, 0);
    q.assign(n, 0);
}

namespace {

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-13 * (1 + std::abs(a)); }

// One half of map L over the given Eulerian nodes. sign = +1 for (mu, R, rho), -1 for (nu, S, sigma).
PsiHalf build_half(const std::vector<double>& nodes, const std::vector<double>& u, const std::vector<double>& wave,
                   const std::vector<double>& dens, const RadonMeasure& m, int sign, const WaveSpeed& c, int n_atom) {
    PsiHalf h;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double x = nodes[k];
        const double M = m.cumulative(x);
        const double X = x + M;
        const double ck = c.eval(u[k]);
        const double g = 0.25 * (wave[k] * wave[k] + ck * dens[k] * dens[k]);
        const double xd = 1 / (1 + g), Jd = g / (1 + g);
        const double V = sign * xd * wave[k] / (2 * ck);
        const double H = 0.5 * dens[k] * xd;
        const double Kd = sign * Jd / ck;
        h.push(X, x, u[k], M, 0, V, H, xd, Jd, Kd);
        const double a = m.atom_at(x);
        if (a > 0) {
            const double flatK = sign / ck;
            h.push(X, x, u[k], M, 0, 0, 0, 0, 1, flatK);
            int steps = std::max(1, static_cast<int>(std::ceil(n_atom * a)));
            for (int i = 1; i <= steps; ++i) {
                double f = a * i / steps;
                h.push(X + f, x, u[k], M + f, 0, 0, 0, 0, 1, flatK);
            }
            h.push(X + a, x, u[k], M + a, 0, V, H, xd, Jd, Kd);
        }
    }
    // K by quadrature of K', starting from the mass left of the grid
    if (h.size() > 0) {
        h.K[0] = sign * h.J[0] / c.eval(h.U[0]);
        const auto rough = rough_intervals(h.X, {&h.xd, &h.Jd, &h.Kd, &h.V});
        const auto st = quadrature_stencils(h.X, 4, &rough);
        for (std::size_t k = 1; k < h.size(); ++k) {
            double inc = 0;
            for (int m = 0; m < 4; ++m) inc += st[k].w[m] * h.Kd[st[k].idx[m]];
            h.K[k] = h.K[k - 1] + inc;
        }
    }
    return h;
}

double interp(double a, double b, double th) { return a + th * (b - a); }

// Node of half h at level x when h has no node there.
void push_virtual(PsiHalf& out, const PsiHalf& h, double x) {
    const std::size_t n = h.size();
    std::size_t k = static_cast<std::size_t>(std::lower_bound(h.x.begin(), h.x.end(), x) - h.x.begin());
    if (k == 0 || k == n) {
        // outside the sampled range: continue with zero data
        std::size_t e = k == 0 ? 0 : n - 1;
        double d = x - h.x[e];
        out.push(h.X[e] + d, x, 0, h.J[e], h.K[e], 0, 0, 1, 0, 0);
        return;
    }
    // last node of the lower level and first node of the upper level
    std::size_t a = k - 1, b = k;
    double th = (x - h.x[a]) / (h.x[b] - h.x[a]);
    out.push(interp(h.X[a], h.X[b], th), x, interp(h.U[a], h.U[b], th), interp(h.J[a], h.J[b], th),
             interp(h.K[a], h.K[b], th), interp(h.V[a], h.V[b], th), interp(h.H[a], h.H[b], th),
             interp(h.xd[a], h.xd[b], th), interp(h.Jd[a], h.Jd[b], th), interp(h.Kd[a], h.Kd[b], th));
}

}  // namespace

PsiPair map_L(const EulerianState& st, const WaveSpeed& c, int n_atom) {
    if (n_atom < 1) throw ConfigError("map_L: n_atom must be >= 1");
    std::vector<double> nodes = st.grid;
    for (const Atom& a : st.mu.atoms()) nodes.push_back(a.x);
    for (const Atom& a : st.nu.atoms()) nodes.push_back(a.x);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    const std::size_t n = nodes.size();
    std::vector<double> u(n), R(n), S(n), rho(n), sigma(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = nodes[k];
        auto it = std::lower_bound(st.grid.begin(), st.grid.end(), x);
        if (it != st.grid.end() && *it == x) {
            std::size_t i = static_cast<std::size_t>(it - st.grid.begin());
            u[k] = st.u[i];
            R[k] = st.R[i];
            S[k] = st.S[i];
            rho[k] = st.rho[i];
            sigma[k] = st.sigma[i];
        } else {
            u[k] = EulerianState::sample(st.grid, st.u, x);
            R[k] = EulerianState::sample(st.grid, st.R, x);
            S[k] = EulerianState::sample(st.grid, st.S, x);
            rho[k] = EulerianState::sample(st.grid, st.rho, x);
            sigma[k] = EulerianState::sample(st.grid, st.sigma, x);
        }
    }
    PsiPair p;
    p.h1 = build_half(nodes, u, R, rho, st.mu, +1, c, n_atom);
    p.h2 = build_half(nodes, u, S, sigma, st.nu, -1, c, n_atom);
    return align(p);
}

PsiPair align(const PsiPair& psi) {
    const PsiHalf& a = psi.h1;
    const PsiHalf& b = psi.h2;
    if (a.size() == 0 || b.size() == 0) throw ValidationError("align: empty half");
    PsiPair out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double level;
        if (i >= a.size()) level = b.x[j];
        else if (j >= b.size()) level = a.x[i];
        else level = std::min(a.x[i], b.x[j]);
        std::size_t i1 = i, j1 = j;
        while (i1 < a.size() && same_level(a.x[i1], level)) ++i1;
        while (j1 < b.size() && same_level(b.x[j1], level)) ++j1;
        PsiHalf la, lb;
        if (i1 > i) {
            for (std::size_t k = i; k < i1; ++k) la.push_from(a, k);
        } else {
            push_virtual(la, a, level);
        }
        if (j1 > j) {
            for (std::size_t k = j; k < j1; ++k) lb.push_from(b, k);
        } else {
            push_virtual(lb, b, level);
        }
        // bottom-left pair, up the left side, then along the top
        out.h1.push_from(la, 0);
        out.h2.push_from(lb, 0);
        for (std::size_t k = 1; k < lb.size(); ++k) {
            out.h1.push_from(la, 0);
            out.h2.push_from(lb, k);
        }
        for (std::size_t k = 1; k < la.size(); ++k) {
            out.h1.push_from(la, k);
            out.h2.push_from(lb, lb.size() - 1);
        }
        // a common level x for both halves
        std::size_t first = out.h1.size() - (la.size() + lb.size() - 1);
        for (std::size_t k = first; k < out.h1.size(); ++k) out.h2.x[k] = out.h1.x[k];
        i = i1;
        j = j1;
    }
    return out;
}

CurveData map_C(const PsiPair& psi_in, const WaveSpeed& c) {
    const PsiPair psi = psi_in.aligned() ? psi_in : align(psi_in);
    const PsiHalf& a = psi.h1;
    const PsiHalf& b = psi.h2;
    const std::size_t n = a.size();
    CurveData cv;
    cv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double X = a.X[k], Y = b.X[k];
        cv.X[k] = X;
        cv.Y[k] = Y;
        cv.s[k] = 0.5 * (X + Y);
        double U = a.U[k];
        double ck = c.eval(U);
        cv.Z[0][k] = 0;
        cv.Z[1][k] = a.x[k];
        cv.Z[2][k] = U;
        cv.Z[3][k] = a.J[k] + b.J[k];
        cv.Z[4][k] = a.K[k] + b.K[k];
        cv.V[0][k] = a.xd[k] / (2 * ck);
        cv.V[1][k] = a.xd[k] / 2;
        cv.V[2][k] = a.V[k];
        cv.V[3][k] = a.Jd[k];
        cv.V[4][k] = a.Kd[k];
        cv.W[0][k] = -b.xd[k] / (2 * ck);
        cv.W[1][k] = b.xd[k] / 2;
        cv.W[2][k] = b.V[k];
        cv.W[3][k] = b.Jd[k];
        cv.W[4][k] = b.Kd[k];
        cv.p[k] = a.H[k];
        cv.q[k] = b.H[k];
    }
    // Complete the derivative data along stretches and at kinks.
    double Vk[5], Wk[5], Vp[5], Wp[5], F0[5], F1[5];
    for (std::size_t k = 1; k < n; ++k) {
        double dX = cv.X[k] - cv.X[k - 1], dY = cv.Y[k] - cv.Y[k - 1];
        for (int m = 0; m < 5; ++m) {
            Vk[m] = cv.V[m][k];
            Wk[m] = cv.W[m][k];
            Vp[m] = cv.V[m][k - 1];
            Wp[m] = cv.W[m][k - 1];
        }
        double c0, c01, c1, c11;
        c.eval2(cv.Z[2][k - 1], c0, c01);
        c.eval2(cv.Z[2][k], c1, c11);
        system_rhs(c0, c01, Vp, Wp, F0);
        if (dX > 0 && dY == 0) {
            for (int m = 0; m < 5; ++m) Wk[m] = Wp[m] + dX * F0[m];
            for (int it = 0; it < 4; ++it) {
                system_rhs(c1, c11, Vk, Wk, F1);
                for (int m = 0; m < 5; ++m) Wk[m] = Wp[m] + 0.5 * dX * (F0[m] + F1[m]);
            }
        } else if (dY > 0 && dX == 0) {
            for (int m = 0; m < 5; ++m) Vk[m] = Vp[m] + dY * F0[m];
            for (int it = 0; it < 4; ++it) {
                system_rhs(c1, c11, Vk, Wk, F1);
                for (int m = 0; m < 5; ++m) Vk[m] = Vp[m] + 0.5 * dY * (F0[m] + F1[m]);
            }
        } else if (dX == 0 && dY == 0) {
            if (a.same_derivatives(k, a, k - 1))
                for (int m = 0; m < 5; ++m) Vk[m] = Vp[m];
            if (b.same_derivatives(k, b, k - 1))
                for (int m = 0; m < 5; ++m) Wk[m] = Wp[m];
        }
        for (int m = 0; m < 5; ++m) {
            cv.V[m][k] = Vk[m];
            cv.W[m][k] = Wk[m];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        double ck = c.eval(cv.Z[2][k]);
        cv.V[1][k] = ck * cv.V[0][k];
        cv.V[3][k] = ck * cv.V[4][k];
        cv.W[1][k] = -ck * cv.W[0][k];
        cv.W[3][k] = -ck * cv.W[4][k];
    }
    return cv;
}

namespace {

double invert_monotone(const std::function<double(double)>& f, double y) {
    double lo = y - 1, hi = y + 1;
    for (int i = 0; i < 200 && f(lo) > y; ++i) lo -= 2 * (hi - lo);
    for (int i = 0; i < 200 && f(hi) < y; ++i) hi += 2 * (hi - lo);
    if (f(lo) > y || f(hi) < y) throw DomainError("relabel: value outside the range of the relabeling map");
    for (int i = 0; i < 300 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < y) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

PsiHalf relabel_half(const PsiHalf& h, const std::function<double(double)>& f, const std::function<double(double)>& fp) {
    PsiHalf o = h;
    for (std::size_t k = 0; k < h.size(); ++k) {
        double Xb = (k > 0 && h.X[k] == h.X[k - 1]) ? o.X[k - 1] : invert_monotone(f, h.X[k]);
        double s = fp(Xb);
        if (!(s > 0)) throw DegeneracyError("relabel: map must be strictly increasing");
        o.X[k] = Xb;
        o.xd[k] *= s;
        o.Jd[k] *= s;
        o.Kd[k] *= s;
        o.V[k] *= s;
        o.H[k] *= s;
    }
    return o;
}

PsiHalf project_half(const PsiHalf& h) {
    PsiHalf o = h;
    for (std::size_t k = 0; k < h.size(); ++k) {
        double fp = h.xd[k] + h.Jd[k];
        if (!(fp >= 1e-12)) {
            std::ostringstream os;
            os << "project_F0: x' + J' = " << fp << " below 1e-12 at node " << k;
            throw DegeneracyError(os.str());
        }
        o.X[k] = h.x[k] + h.J[k];
        o.xd[k] /= fp;
        o.Jd[k] /= fp;
        o.Kd[k] /= fp;
        o.V[k] /= fp;
        o.H[k] /= fp;
    }
    return o;
}

std::string node_at(const char* half, std::size_t k, double X) {
    std::ostringstream os;
    os << half << " node " << k << " (X=" << X << ")";
    return os.str();
}

}  // namespace

PsiPair relabel(const PsiPair& psi, const std::function<double(double)>& f, const std::function<double(double)>& fp,
                const std::function<double(double)>& g, const std::function<double(double)>& gp) {
    PsiPair o;
    o.h1 = relabel_half(psi.h1, f, fp);
    o.h2 = relabel_half(psi.h2, g, gp);
    return o;
}

PsiPair project_F0(const PsiPair& psi) {
    PsiPair o;
    o.h1 = project_half(psi.h1);
    o.h2 = project_half(psi.h2);
    return o;
}

Report check_F(const PsiPair& psi, const WaveSpeed& c, double rel_tol) {
    Report rep;
    const PsiHalf* halves[2] = {&psi.h1, &psi.h2};
    for (int i = 0; i < 2; ++i) {
        const PsiHalf& h = *halves[i];
        const char* nm = i == 0 ? "psi1" : "psi2";
        const double sign = i == 0 ? 1 : -1;
        std::string pre = std::string(nm) + ".";
        double neg = 0;
        std::string wneg;
        double kj = 0, kj_scale = 0, en = 0, en_scale = 0;
        std::string wkj, wen;
        for (std::size_t k = 0; k < h.size(); ++k) {
            double m = std::min({h.xd[k], h.Jd[k], 0.0});
            if (-m > neg) {
                neg = -m;
                wneg = node_at(nm, k, h.X[k]);
            }
            double ck = c.eval(h.U[k]);
            double r1 = std::abs(h.Jd[k] - sign * ck * h.Kd[k]);
            kj_scale = std::max(kj_scale, std::abs(h.Jd[k]));
            if (r1 > kj) {
                kj = r1;
                wkj = node_at(nm, k, h.X[k]);
            }
            double lhs = h.xd[k] * h.Jd[k], rhs = ck * ck * h.V[k] * h.V[k] + ck * h.H[k] * h.H[k];
            en_scale = std::max({en_scale, std::abs(lhs), std::abs(rhs)});
            double r2 = std::abs(lhs - rhs);
            if (r2 > en) {
                en = r2;
                wen = node_at(nm, k, h.X[k]);
            }
        }
        rep.add(pre + "nonnegative_derivatives", neg, 0.0, wneg);
        rep.add(pre + "J_cK", kj_scale > 0 ? kj / kj_scale : kj, rel_tol, wkj);
        rep.add(pre + "energy_relation", en_scale > 0 ? en / en_scale : en, rel_tol, wen);
        // x + J increasing with slopes bounded away from 0 and infinity
        double smin = INFINITY, smax = 0, jdrop = 0;
        std::string wslope, wj;
        for (std::size_t k = 1; k < h.size(); ++k) {
            double dX = h.X[k] - h.X[k - 1];
            if (h.J[k] < h.J[k - 1] && h.J[k - 1] - h.J[k] > jdrop) {
                jdrop = h.J[k - 1] - h.J[k];
                wj = node_at(nm, k, h.X[k]);
            }
            if (dX <= 0) continue;
            double sl = ((h.x[k] + h.J[k]) - (h.x[k - 1] + h.J[k - 1])) / dX;
            if (sl < smin) {
                smin = sl;
                wslope = node_at(nm, k, h.X[k]);
            }
            smax = std::max(smax, sl);
        }
        double alpha = h.size() > 1 && std::isfinite(smin) ? std::max(smax - 1, smin > 0 ? 1 / smin - 1 : INFINITY) : 0;
        rep.add(pre + "x_plus_J_slope_alpha", alpha, 1e6, wslope);
        rep.add(pre + "J_nondecreasing", jdrop, 1e-12, wj);
    }
    return rep;
}

Report check_G(const CurveData& cv, const WaveSpeed& c, double rel_tol, double comp_tol) {
    Report rep;
    const std::size_t n = cv.size();
    auto where = [&](std::size_t k) {
        std::ostringstream os;
        os << "s=" << cv.s[k] << " (node " << k << ")";
        return os.str();
    };
    // monotone curve with X + Y = 2s
    double back = 0, sum = 0;
    std::string wb, ws;
    for (std::size_t k = 0; k < n; ++k) {
        double r = std::abs(cv.X[k] + cv.Y[k] - 2 * cv.s[k]) / (1 + std::abs(cv.s[k]));
        if (r > sum) {
            sum = r;
            ws = where(k);
        }
        if (k > 0) {
            double m = std::min(cv.X[k] - cv.X[k - 1], cv.Y[k] - cv.Y[k - 1]);
            if (-m > back) {
                back = -m;
                wb = where(k);
            }
        }
    }
    rep.add("curve_monotone", back, 0.0, wb);
    rep.add("X_plus_Y_2s", sum, 1e-14, ws);
    double neg = 0, z1 = 0;
    std::string wn, wz;
    for (std::size_t k = 0; k < n; ++k) {
        double m = std::min({cv.V[1][k], cv.W[1][k], cv.V[3][k], cv.W[3][k], 0.0});
        if (-m > neg) {
            neg = -m;
            wn = where(k);
        }
        if (std::abs(cv.Z[0][k]) > z1) {
            z1 = std::abs(cv.Z[0][k]);
            wz = where(k);
        }
    }
    rep.add("positivity", neg, 0.0, wn);
    rep.add("Z1_zero", z1, 1e-12, wz);

    struct Rel {
        const char* name;
        std::function<std::pair<double, double>(std::size_t, double)> sides;
    };
    const std::vector<Rel> rels = {
        {"V2_cV1", [&](std::size_t k, double ck) { return std::make_pair(cv.V[1][k], ck * cv.V[0][k]); }},
        {"W2_cW1", [&](std::size_t k, double ck) { return std::make_pair(cv.W[1][k], -ck * cv.W[0][k]); }},
        {"V4_cV5", [&](std::size_t k, double ck) { return std::make_pair(cv.V[3][k], ck * cv.V[4][k]); }},
        {"W4_cW5", [&](std::size_t k, double ck) { return std::make_pair(cv.W[3][k], -ck * cv.W[4][k]); }},
        {"energy_V", [&](std::size_t k, double ck) {
             return std::make_pair(2 * cv.V[3][k] * cv.V[1][k],
                                   ck * ck * cv.V[2][k] * cv.V[2][k] + ck * cv.p[k] * cv.p[k]);
         }},
        {"energy_W", [&](std::size_t k, double ck) {
             return std::make_pair(2 * cv.W[3][k] * cv.W[1][k],
                                   ck * ck * cv.W[2][k] * cv.W[2][k] + ck * cv.q[k] * cv.q[k]);
         }},
    };
    for (const Rel& r : rels) {
        double worst = 0, scale = 0;
        std::string w;
        for (std::size_t k = 0; k < n; ++k) {
            auto [l, rr] = r.sides(k, c.eval(cv.Z[2][k]));
            scale = std::max({scale, std::abs(l), std::abs(rr)});
            if (std::abs(l - rr) > worst) {
                worst = std::abs(l - rr);
                w = where(k);
            }
        }
        rep.add(r.name, scale > 0 ? worst / scale : worst, rel_tol, w);
    }
    // dZ = V dX + W dY along the curve (trapezoid), per unit step in s
    double comp = 0;
    std::string wc;
    for (std::size_t k = 1; k < n; ++k) {
        double dX = cv.X[k] - cv.X[k - 1], dY = cv.Y[k] - cv.Y[k - 1];
        double ds = cv.s[k] - cv.s[k - 1];
        if (ds <= 0) continue;
        for (int m = 0; m < 5; ++m) {
            double pred = 0.5 * (cv.V[m][k] + cv.V[m][k - 1]) * dX + 0.5 * (cv.W[m][k] + cv.W[m][k - 1]) * dY;
            double r = std::abs(cv.Z[m][k] - cv.Z[m][k - 1] - pred) / ds;
            if (r > comp) {
                comp = r;
                wc = where(k);
            }
        }
    }
    rep.add("compatibility_dZ", comp, comp_tol, wc);
    return rep;
}

void write_psi_csv(const PsiPair& psi_in, std::ostream& os) {
    const PsiPair psi = psi_in.aligned() ? psi_in : align(psi_in);
    os << "X,x1,U1,J1,K1,V1,H1,x1p,J1p,K1p,Y,x2,U2,J2,K2,V2,H2,x2p,J2p,K2p\n";
    const PsiHalf& a = psi.h1;
    const PsiHalf& b = psi.h2;
    for (std::size_t k = 0; k < a.size(); ++k)
        write_csv_row(os, {a.X[k], a.x[k], a.U[k], a.J[k], a.K[k], a.V[k], a.H[k], a.xd[k], a.Jd[k], a.Kd[k], b.X[k],
                           b.x[k], b.U[k], b.J[k], b.K[k], b.V[k], b.H[k], b.xd[k], b.Jd[k], b.Kd[k]});
}

}  // namespace nvw
