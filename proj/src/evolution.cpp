#include "nvw/evolution.hpp"

#include "nvw/errors.hpp"
#include "nvw/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nvw {

GridSolution time_shift(const GridSolution& sol, double T) {
    GridSolution o = sol;
    o.t_offset = sol.t_offset + T;
    return o;
}

// ==== extraction ====

namespace {

// A crossing of {t = 0}: value = (1 - th) * A(i0, j0) + th * A(i1, j1).
struct Crossing {
    double X, Y;
    std::size_t i0, j0, i1, j1;
    double th;
    bool node() const { return th == 0; }
};

double median_ds(const GridSolution& sol) {
    std::vector<double> d;
    for (std::size_t k = 1; k < sol.size(); ++k) {
        double ds = 0.5 * ((sol.X[k] + sol.Y[k]) - (sol.X[k - 1] + sol.Y[k - 1]));
        if (ds > 0) d.push_back(ds);
    }
    if (d.empty()) return 0;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

// Covered index range of a lattice row (by_row) or column.
bool covered_range(const GridSolution& sol, std::size_t k, bool by_row, std::size_t& lo, std::size_t& hi) {
    const std::size_t m = sol.ncells();
    const auto& B = sol.bounds;
    lo = sol.size();
    hi = 0;
    for (std::size_t c = 0; c < m; ++c) {
        if (k < B[c] || k > B[c + 1]) continue;
        for (std::size_t o = 0; o < m; ++o) {
            const Cell* cl = by_row ? sol.cell(o, c) : sol.cell(c, o);
            if (!cl) continue;
            lo = std::min(lo, B[o]);
            hi = std::max(hi, B[o + 1]);
        }
    }
    return lo <= hi;
}

}  // namespace

CurveData extract_time_curve(const GridSolution& sol, bool thin) {
    const std::size_t n = sol.size();
    std::vector<Crossing> pts;
    // rows: inf{X : t >= 0}, t nondecreasing in X
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t lo, hi;
        if (!covered_range(sol, j, true, lo, hi)) continue;
        if (sol.t(hi, j) < 0) continue;
        if (sol.t(lo, j) >= 0) {
            if (sol.t(lo, j) == 0 || lo == 0) pts.push_back({sol.X[lo], sol.Y[j], lo, j, lo, j, 0});
            continue;
        }
        std::size_t a = lo, b = hi;  // t(a) < 0 <= t(b)
        while (b - a > 1) {
            std::size_t mid = a + (b - a) / 2;
            if (sol.t(mid, j) >= 0) b = mid;
            else a = mid;
        }
        double tb = sol.t(b, j), ta = sol.t(a, j);
        if (tb == 0) {
            pts.push_back({sol.X[b], sol.Y[j], b, j, b, j, 0});
        } else {
            double th = -ta / (tb - ta);
            pts.push_back({sol.X[a] + th * (sol.X[b] - sol.X[a]), sol.Y[j], a, j, b, j, th});
        }
    }
    // columns: sup{Y : t >= 0}, t nonincreasing in Y
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo, hi;
        if (!covered_range(sol, i, false, lo, hi)) continue;
        if (sol.t(i, lo) < 0) continue;
        if (sol.t(i, hi) >= 0) {
            if (sol.t(i, hi) == 0 || hi == n - 1) pts.push_back({sol.X[i], sol.Y[hi], i, hi, i, hi, 0});
            continue;
        }
        std::size_t a = lo, b = hi;  // t(a) >= 0 > t(b)
        while (b - a > 1) {
            std::size_t mid = a + (b - a) / 2;
            if (sol.t(i, mid) >= 0) a = mid;
            else b = mid;
        }
        double ta = sol.t(i, a), tb = sol.t(i, b);
        if (ta == 0) {
            pts.push_back({sol.X[i], sol.Y[a], i, a, i, a, 0});
        } else {
            double th = ta / (ta - tb);
            pts.push_back({sol.X[i], sol.Y[a] + th * (sol.Y[b] - sol.Y[a]), i, a, i, b, th});
        }
    }
    if (pts.size() < 2) throw CoverageError("the zero set of t does not cross the solved region");
    std::sort(pts.begin(), pts.end(), [](const Crossing& a, const Crossing& b) {
        double sa = a.X + a.Y, sb = b.X + b.Y;
        if (sa != sb) return sa < sb;
        if (a.X != b.X) return a.X < b.X;
        if (a.i0 != b.i0) return a.i0 < b.i0;
        return a.j0 < b.j0;
    });

    // join coincident crossings through their lattice nodes, left side then top
    std::vector<Crossing> path;
    std::vector<char> keep;  // must survive thinning
    auto close = [](const Crossing& a, const Crossing& b) {
        double tol = 1e-13 * (1 + std::abs(a.X) + std::abs(a.Y));
        return std::abs(a.X - b.X) <= tol && std::abs(a.Y - b.Y) <= tol;
    };
    for (std::size_t k = 0; k < pts.size();) {
        std::size_t e = k + 1;
        while (e < pts.size() && close(pts[k], pts[e])) ++e;
        std::size_t imin = SIZE_MAX, imax = 0, jmin = SIZE_MAX, jmax = 0;
        bool nodes = false;
        for (std::size_t g = k; g < e; ++g)
            if (pts[g].node()) {
                nodes = true;
                imin = std::min(imin, pts[g].i0);
                imax = std::max(imax, pts[g].i0);
                jmin = std::min(jmin, pts[g].j0);
                jmax = std::max(jmax, pts[g].j0);
            }
        if (!nodes) {
            // crossings on repeated abscissae carry different one-sided derivatives; keep each
            for (std::size_t g = k; g < e; ++g) {
                path.push_back(pts[g]);
                keep.push_back(e - k > 1);
            }
        } else {
            const double Xg = pts[k].X, Yg = pts[k].Y;
            for (std::size_t j = jmin; j <= jmax; ++j)
                if (sol.covered(imin, j)) {
                    path.push_back({Xg, Yg, imin, j, imin, j, 0});
                    keep.push_back(1);
                }
            for (std::size_t i = imin + 1; i <= imax; ++i)
                if (sol.covered(i, jmax)) {
                    path.push_back({Xg, Yg, i, jmax, i, jmax, 0});
                    keep.push_back(1);
                }
        }
        k = e;
    }

    auto val = [&](const Crossing& p, auto&& get) {
        double a = get(p.i0, p.j0);
        return p.th == 0 ? a : (1 - p.th) * a + p.th * get(p.i1, p.j1);
    };
    CurveData cv;
    cv.resize(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Crossing& p = path[k];
        cv.X[k] = p.X;
        cv.Y[k] = p.Y;
        for (int m = 0; m < 5; ++m) {
            cv.Z[m][k] = val(p, [&](std::size_t i, std::size_t j) { return sol.Z(m, i, j); });
            cv.V[m][k] = val(p, [&](std::size_t i, std::size_t j) { return sol.V(m, i, j); });
            cv.W[m][k] = val(p, [&](std::size_t i, std::size_t j) { return sol.W(m, i, j); });
        }
        cv.p[k] = val(p, [&](std::size_t i, std::size_t) { return sol.p[i]; });
        cv.q[k] = val(p, [&](std::size_t, std::size_t j) { return sol.q[j]; });
    }
    // monotone parametrization; round-off reorderings are clamped, real ones are coverage failures
    for (std::size_t k = 1; k < cv.size(); ++k) {
        for (auto* v : {&cv.X, &cv.Y}) {
            double d = (*v)[k - 1] - (*v)[k];
            if (d > 1e-8 * (1 + std::abs((*v)[k]))) {
                std::ostringstream os;
                os << "extracted curve is not monotone near s=" << 0.5 * (cv.X[k] + cv.Y[k])
                   << "; the zero set of t leaves the solved band";
                throw CoverageError(os.str());
            }
            if (d > 0) (*v)[k] = (*v)[k - 1];
        }
    }
    for (std::size_t k = 0; k < cv.size(); ++k) cv.s[k] = 0.5 * (cv.X[k] + cv.Y[k]);

    // drop repeated nodes and thin interpolated ones to the lattice density
    const double ds = median_ds(sol);
    std::vector<std::size_t> sel;
    for (std::size_t k = 0; k < cv.size(); ++k) {
        if (!sel.empty()) {
            const std::size_t l = sel.back();
            bool same = cv.X[k] == cv.X[l] && cv.Y[k] == cv.Y[l] && cv.p[k] == cv.p[l] && cv.q[k] == cv.q[l];
            for (int m = 0; m < 5 && same; ++m)
                same = std::abs(cv.Z[m][k] - cv.Z[m][l]) <= 1e-12 && std::abs(cv.V[m][k] - cv.V[m][l]) <= 1e-12 &&
                       std::abs(cv.W[m][k] - cv.W[m][l]) <= 1e-12;
            if (same) continue;
            bool regular = !keep[k] && path[k].th != 0 && k + 1 < cv.size();
            if (thin && regular && cv.s[k] - cv.s[l] < 0.75 * ds) continue;
        }
        sel.push_back(k);
    }
    CurveData out;
    out.resize(sel.size());
    for (std::size_t r = 0; r < sel.size(); ++r) {
        std::size_t k = sel[r];
        out.s[r] = cv.s[k];
        out.X[r] = cv.X[k];
        out.Y[r] = cv.Y[k];
        for (int m = 0; m < 5; ++m) {
            out.Z[m][r] = cv.Z[m][k];
            out.V[m][r] = cv.V[m][k];
            out.W[m][r] = cv.W[m][k];
        }
        out.p[r] = cv.p[k];
        out.q[r] = cv.q[k];
    }
    for (std::size_t r = 1; r < out.size(); ++r)
        if (ds > 0 && out.s[r] - out.s[r - 1] > 16 * ds) {
            std::ostringstream os;
            os << "no crossing of t = 0 for s in (" << out.s[r - 1] << ", " << out.s[r] << ")";
            throw CoverageError(os.str());
        }
    return out;
}

double curve_point(const GridSolution& sol, double s, double tol) {
    auto t_at = [&](double X) -> double {
        auto v = sol.sample(0, X, 2 * s - X);
        if (!v) {
            std::ostringstream os;
            os << "anti-diagonal s=" << s << " leaves the solved region at X=" << X;
            throw CoverageError(os.str());
        }
        return *v;
    };
    double lo = std::max(sol.X.front(), 2 * s - sol.Y.back());
    double hi = std::min(sol.X.back(), 2 * s - sol.Y.front());
    if (lo > hi) throw CoverageError("anti-diagonal misses the lattice");
    // shrink to the covered part, then bisect for the first X with t >= 0
    auto inside = [&](double X) { return sol.sample(0, X, 2 * s - X).has_value(); };
    if (!inside(lo) || !inside(hi)) {
        double a = lo, b = hi;
        std::vector<double> probe;
        for (int k = 0; k <= 2000; ++k) probe.push_back(a + (b - a) * k / 2000.0);
        double first = NAN, last = NAN;
        for (double X : probe)
            if (inside(X)) {
                if (std::isnan(first)) first = X;
                last = X;
            }
        if (std::isnan(first)) throw CoverageError("anti-diagonal misses the solved region");
        lo = first;
        hi = last;
    }
    if (t_at(lo) >= 0) return lo;
    if (t_at(hi) < 0) throw CoverageError("t stays negative along the anti-diagonal");
    while (hi - lo > tol * (1 + std::abs(lo))) {
        double mid = 0.5 * (lo + hi);
        if (t_at(mid) < 0) lo = mid;
        else hi = mid;
    }
    return hi;
}

// ==== inverse maps ====

PsiPair map_D(const CurveData& cv, const WaveSpeed& c) {
    const std::size_t n = cv.size();
    if (n == 0) throw ValidationError("map_D: empty curve");
    PsiPair psi;
    PsiHalf& a = psi.h1;
    PsiHalf& b = psi.h2;
    // left of the data K1 = J1/c and K2 = -J2/c, so Z4 and Z5 recover the two tails
    double c0 = c.eval(cv.Z[2][0]);
    double J1 = std::clamp(0.5 * (cv.Z[3][0] + c0 * cv.Z[4][0]), 0.0, std::max(0.0, cv.Z[3][0]));
    double J2 = cv.Z[3][0] - J1;
    double K1 = J1 / c0, K2 = -J2 / c0;
    double debt = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            double dX = cv.X[k] - cv.X[k - 1], dY = cv.Y[k] - cv.Y[k - 1];
            double d1 = 0.5 * (cv.V[3][k] + cv.V[3][k - 1]) * dX;
            double d2 = 0.5 * (cv.W[3][k] + cv.W[3][k - 1]) * dY;
            // negative increments (quadrature noise) are repaid from later growth so that
            // J1 + J2 stays monotone and still ends at the last Z4
            double dz = cv.Z[3][k] - cv.Z[3][k - 1];
            if (dz < debt) {
                debt -= dz;
                dz = 0;
            } else {
                dz -= debt;
                debt = 0;
            }
            // split the increment of Z4 in proportion to the two one-sided integrals
            double tot = d1 + d2;
            if (tot > 0) {
                d1 = std::max(0.0, d1) * dz / tot;
                d2 = dz - d1;
            } else {
                d1 = d2 = 0.5 * dz;
            }
            J1 += d1;
            J2 += d2;
            K1 += 0.5 * (cv.V[4][k] + cv.V[4][k - 1]) * dX;
            K2 += 0.5 * (cv.W[4][k] + cv.W[4][k - 1]) * dY;
        }
        a.push(cv.X[k], cv.Z[1][k], cv.Z[2][k], J1, K1, cv.V[2][k], cv.p[k], 2 * cv.V[1][k], cv.V[3][k], cv.V[4][k]);
        b.push(cv.Y[k], cv.Z[1][k], cv.Z[2][k], J2, K2, cv.W[2][k], cv.q[k], 2 * cv.W[1][k], cv.W[3][k], cv.W[4][k]);
    }
    return psi;
}

namespace {

struct Level {
    std::size_t b, e;  // node range [b, e]
};

}  // namespace

EulerianState map_M(const PsiPair& psi_in, const WaveSpeed& c) {
    const PsiPair psi = psi_in.aligned() ? psi_in : align(psi_in);
    const PsiHalf& h1 = psi.h1;
    const PsiHalf& h2 = psi.h2;
    const std::size_t n = h1.size();
    if (n == 0) throw ValidationError("map_M: empty data");
    std::vector<Level> lv;
    for (std::size_t k = 0; k < n;) {
        std::size_t e = k;
        // round-off decreases of x join the current level
        while (e + 1 < n && h1.x[e + 1] - h1.x[k] <= 1e-13 * (1 + std::abs(h1.x[k]))) ++e;
        lv.push_back({k, e});
        k = e + 1;
    }
    const std::size_t L = lv.size();
    EulerianState st;
    st.grid.resize(L);
    st.u.resize(L);
    std::vector<double> R(L, NAN), S(L, NAN), rho(L, NAN), sig(L, NAN);
    for (std::size_t l = 0; l < L; ++l) {
        st.grid[l] = h1.x[lv[l].b];
        st.u[l] = h1.U[lv[l].b];
        double ck = c.eval(st.u[l]);
        double r = 0, p = 0, sr = 0, sp = 0;
        int n1 = 0, n2 = 0;
        for (std::size_t k = lv[l].b; k <= lv[l].e; ++k) {
            if (h1.xd[k] > 0) {
                r += 2 * ck * h1.V[k] / h1.xd[k];
                p += 2 * h1.H[k] / h1.xd[k];
                ++n1;
            }
            if (h2.xd[k] > 0) {
                sr += -2 * ck * h2.V[k] / h2.xd[k];
                sp += 2 * h2.H[k] / h2.xd[k];
                ++n2;
            }
        }
        if (n1) {
            R[l] = r / n1;
            rho[l] = p / n1;
        }
        if (n2) {
            S[l] = sr / n2;
            sig[l] = sp / n2;
        }
    }
    // levels without a regular node take the mean of their neighbours
    auto fill = [&](std::vector<double>& f) {
        for (std::size_t l = 0; l < L; ++l) {
            if (!std::isnan(f[l])) continue;
            double a = NAN, b = NAN;
            for (std::size_t k = l; k-- > 0;)
                if (!std::isnan(f[k])) {
                    a = f[k];
                    break;
                }
            for (std::size_t k = l + 1; k < L; ++k)
                if (!std::isnan(f[k])) {
                    b = f[k];
                    break;
                }
            f[l] = std::isnan(a) ? (std::isnan(b) ? 0 : b) : (std::isnan(b) ? a : 0.5 * (a + b));
        }
    };
    fill(R);
    fill(S);
    fill(rho);
    fill(sig);
    st.R = R;
    st.S = S;
    st.rho = rho;
    st.sigma = sig;
    const double total = h1.J.back() + h2.J.back();
    auto measure = [&](const PsiHalf& h, const std::vector<double>& w, const std::vector<double>& d) {
        std::vector<double> dens(L), mass(L > 0 ? L - 1 : 0, 0.0);
        std::vector<Atom> atoms;
        const double thr = 1e-9 * (1 + total);
        double carry = 0;
        for (std::size_t l = 0; l < L; ++l) {
            double ck = c.eval(st.u[l]);
            dens[l] = 0.25 * (w[l] * w[l] + ck * d[l] * d[l]);
            double a = h.J[lv[l].e] - h.J[lv[l].b];
            if (a > thr) atoms.push_back({st.grid[l], a});
            else carry += std::max(0.0, a);
            if (l + 1 < L) {
                mass[l] = std::max(0.0, h.J[lv[l + 1].b] - h.J[lv[l].e]) + carry;
                carry = 0;
            }
        }
        if (carry > 0 && !mass.empty()) mass.back() += carry;
        return RadonMeasure::with_masses(st.grid, dens, mass, atoms, std::max(0.0, h.J[0]));
    };
    st.mu = measure(h1, R, rho);
    st.nu = measure(h2, S, sig);
    return st;
}

// ==== evolution ====

namespace {

double median_spacing(const std::vector<double>& g) {
    std::vector<double> d;
    for (std::size_t k = 1; k < g.size(); ++k) d.push_back(g[k] - g[k - 1]);
    if (d.empty()) return 1;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

}  // namespace

GridSolution solve_band(const EulerianState& state, double T, const WaveSpeed& c, const EvolveParams& params) {
    if (state.size() < 2) throw ValidationError("evolve: state needs at least two grid points");
    if (!std::isfinite(T)) throw ConfigError("evolve: time must be finite");
    const double E = total_energy(state);
    const double w = 2 * c.kappa() * std::abs(T) + 2 * E + params.margin;
    EulerianState padded = pad(state, w, w, median_spacing(state.grid));
    CurveData cv = map_C(map_L(padded, c, params.n_atom), c);
    return tile_solve(cv, c, params.solver, T);
}

EulerianState slice_at(const GridSolution& sol, double T, const WaveSpeed& c, const EvolveParams& params) {
    CurveData slice = extract_time_curve(time_shift(sol, T), params.thin);
    return trim(map_M(map_D(slice, c), c));
}

EulerianState evolve(const EulerianState& state, double T, const WaveSpeed& c, const EvolveParams& params) {
    return slice_at(solve_band(state, T, c, params), T, c, params);
}

std::vector<EulerianState> evolve_many(const EulerianState& state, const std::vector<double>& times,
                                       const WaveSpeed& c, const EvolveParams& params) {
    std::vector<EulerianState> out(times.size());
    double tmax = 0, tmin = 0;
    for (double t : times) {
        if (!std::isfinite(t)) throw ConfigError("evolve: time must be finite");
        tmax = std::max(tmax, t);
        tmin = std::min(tmin, t);
    }
    std::optional<GridSolution> fwd, bwd;
    if (tmax > 0) fwd = solve_band(state, tmax, c, params);
    if (tmin < 0) bwd = solve_band(state, tmin, c, params);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] > 0) out[k] = slice_at(*fwd, times[k], c, params);
        else if (times[k] < 0) out[k] = slice_at(*bwd, times[k], c, params);
        else out[k] = evolve(state, 0, c, params);
    }
    return out;
}

double sup_u_difference(const EulerianState& a, const EulerianState& b) {
    double m = 0;
    for (const auto* g : {&a.grid, &b.grid})
        for (double x : *g) m = std::max(m, std::abs(a.u_at(x) - b.u_at(x)));
    return m;
}

double cumulative_l1_difference(const EulerianState& a, const EulerianState& b, int probes) {
    double lo = std::min(a.grid.front(), b.grid.front()), hi = std::max(a.grid.back(), b.grid.back());
    if (!(hi > lo) || probes < 2) return 0;
    double sum = 0;
    for (int k = 0; k < probes; ++k) {
        double x = lo + (hi - lo) * k / (probes - 1);
        double fa = a.mu.cumulative(x) + a.nu.cumulative(x);
        double fb = b.mu.cumulative(x) + b.nu.cumulative(x);
        sum += std::abs(fa - fb);
    }
    return sum / probes * (hi - lo);
}

Report check_semigroup(const EulerianState& state, double T1, double T2, const WaveSpeed& c,
                       const EvolveParams& params, double tol) {
    Report rep;
    EulerianState direct = evolve(state, T1 + T2, c, params);
    EulerianState mid = evolve(state, T1, c, params);
    EulerianState twice = evolve(mid, T2, c, params);
    EulerianState back = evolve(mid, -T1, c, params);
    rep.add("u_sup_semigroup", sup_u_difference(direct, twice), tol);
    rep.add("cumulative_l1_semigroup", cumulative_l1_difference(direct, twice), tol);
    rep.add("u_sup_reversal", sup_u_difference(back, state), tol);
    rep.add("cumulative_l1_reversal", cumulative_l1_difference(back, state), tol);
    return rep;
}

// ==== output ====

void write_slice_csv(std::ostream& os, double t, const EulerianState& s, bool header) {
    if (header) os << "t,x,u,R,S,rho,sigma,mu_density,nu_density\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        write_csv_row(os, {t, s.grid[k], s.u[k], s.R[k], s.S[k], s.rho[k], s.sigma[k],
                           s.mu.density_at(s.grid[k]), s.nu.density_at(s.grid[k])});
}

void write_atoms_csv(std::ostream& os, double t, const EulerianState& s, bool header) {
    if (header) os << "t,x,mass,which_measure\n";
    for (const auto& [m, name] : {std::pair{&s.mu, "mu"}, std::pair{&s.nu, "nu"}})
        for (const Atom& a : m->atoms()) os << fmt_double(t) << ',' << fmt_double(a.x) << ',' << fmt_double(a.mass)
                                            << ',' << name << '\n';
}

}  // namespace nvw
