#include "nvw/goursat.hpp"

#include "nvw/errors.hpp"
#include "nvw/system.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define NVW_HAVE_X86 1
#endif

namespace nvw {

int default_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NVW_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) n = n > 0 ? std::min(n, v) : v;
    }
    return std::max(1, n);
}

// ==== prefix sweeps ====

namespace detail {

namespace {

void prefix_scalar(const double* f, double* P, const Stencil* st, std::size_t steps, std::size_t l0,
                   std::size_t l1, std::size_t stride) {
    for (std::size_t l = l0; l < l1; ++l) P[l] = 0;
    for (std::size_t k = 1; k < steps; ++k) {
        const Stencil& s = st[k];
        const double* f0 = f + s.idx[0] * stride;
        const double* f1 = f + s.idx[1] * stride;
        const double* f2 = f + s.idx[2] * stride;
        const double* f3 = f + s.idx[3] * stride;
        const double* pp = P + (k - 1) * stride;
        double* pc = P + k * stride;
        for (std::size_t l = l0; l < l1; ++l)
            pc[l] = pp[l] + (((s.w[0] * f0[l] + s.w[1] * f1[l]) + s.w[2] * f2[l]) + s.w[3] * f3[l]);
    }
}

#ifdef NVW_HAVE_X86
__attribute__((target("avx2"))) void prefix_avx2(const double* f, double* P, const Stencil* st, std::size_t steps,
                                                 std::size_t lanes, std::size_t stride) {
    const std::size_t vl = lanes / 4 * 4;
    for (std::size_t l = 0; l < vl; l += 4) _mm256_storeu_pd(P + l, _mm256_setzero_pd());
    for (std::size_t k = 1; k < steps; ++k) {
        const Stencil& s = st[k];
        const __m256d w0 = _mm256_set1_pd(s.w[0]), w1 = _mm256_set1_pd(s.w[1]);
        const __m256d w2 = _mm256_set1_pd(s.w[2]), w3 = _mm256_set1_pd(s.w[3]);
        const double* f0 = f + s.idx[0] * stride;
        const double* f1 = f + s.idx[1] * stride;
        const double* f2 = f + s.idx[2] * stride;
        const double* f3 = f + s.idx[3] * stride;
        const double* pp = P + (k - 1) * stride;
        double* pc = P + k * stride;
        for (std::size_t l = 0; l < vl; l += 4) {
            __m256d acc = _mm256_add_pd(_mm256_mul_pd(w0, _mm256_loadu_pd(f0 + l)),
                                        _mm256_mul_pd(w1, _mm256_loadu_pd(f1 + l)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(w2, _mm256_loadu_pd(f2 + l)));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(w3, _mm256_loadu_pd(f3 + l)));
            _mm256_storeu_pd(pc + l, _mm256_add_pd(_mm256_loadu_pd(pp + l), acc));
        }
    }
    if (vl < lanes) prefix_scalar(f, P, st, steps, vl, lanes, stride);
}

bool cpu_has_avx2() {
    static const bool has = __builtin_cpu_supports("avx2");
    return has;
}
#endif

}  // namespace

bool simd_available() {
#ifdef NVW_HAVE_X86
    return cpu_has_avx2();
#else
    return false;
#endif
}

void prefix_sum(const double* f, double* P, const Stencil* st, std::size_t steps, std::size_t lanes,
                std::size_t stride, bool allow_simd) {
    if (steps == 0 || lanes == 0) return;
#ifdef NVW_HAVE_X86
    if (allow_simd && lanes >= 4 && cpu_has_avx2()) {
        prefix_avx2(f, P, st, steps, lanes, stride);
        return;
    }
#endif
    (void)allow_simd;
    prefix_scalar(f, P, st, steps, 0, lanes, stride);
}

}  // namespace detail

// ==== single cell ====

namespace {

enum class CellKind { diagonal, future, past };

// Edge data a cell is integrated from: each row starts at a column, each column at a row.
struct Anchors {
    std::vector<std::size_t> ra, ca;  // local anchor column per row, anchor row per column
    std::array<std::vector<double>, 5> ZR, WR, ZC, VC;
};

std::vector<std::size_t> anchor_rows(CellKind kind, std::size_t nx, std::size_t ny) {
    std::vector<std::size_t> ca(nx);
    for (std::size_t i = 0; i < nx; ++i)
        ca[i] = kind == CellKind::diagonal ? i : kind == CellKind::future ? ny - 1 : 0;
    return ca;
}

std::vector<std::size_t> anchor_cols(CellKind kind, std::size_t nx, std::size_t ny) {
    std::vector<std::size_t> ra(ny);
    for (std::size_t j = 0; j < ny; ++j)
        ra[j] = kind == CellKind::diagonal ? j : kind == CellKind::future ? 0 : nx - 1;
    return ra;
}

struct Workspace {
    std::vector<double> cc, c1, t1, t2, P;
    std::array<std::vector<double>, 5> F;
};

void transpose(const double* A, double* At, std::size_t nx, std::size_t ny) {
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) At[i * ny + j] = A[j * nx + i];
}

// Prefix integral along X of row-major A: P[j*nx+i] = int_{X_0}^{X_i} A(., j).
struct Geometry {
    std::size_t nx, ny;
    std::vector<Stencil> sx, sy;
};

void prefix_x(const double* A, double* P, const Geometry& g, Workspace& w) {
    const std::size_t nx = g.nx, ny = g.ny;
    w.t1.resize(nx * ny);
    w.t2.resize(nx * ny);
    transpose(A, w.t1.data(), nx, ny);
    detail::prefix_sum(w.t1.data(), w.t2.data(), g.sx.data(), nx, ny, ny);
    transpose(w.t2.data(), P, ny, nx);
}

void prefix_y(const double* A, double* P, const Geometry& g) {
    detail::prefix_sum(A, P, g.sy.data(), g.ny, g.nx, g.nx);
}

struct State {
    std::array<std::vector<double>, 5> Zh, Zv, V, W;
};

double sup_change(const std::array<std::vector<double>, 5>& a, const std::array<std::vector<double>, 5>& b) {
    double m = 0;
    for (int c = 0; c < 5; ++c)
        for (std::size_t k = 0; k < a[c].size(); ++k) {
            double d = std::abs(a[c][k] - b[c][k]);
            if (!(d <= m)) m = d;  // propagates NaN
        }
    return m;
}

// One Picard step: new (V, W) from F(Z_h)(V, W), then new (Z_h, Z_v) from the new V, W.
double picard_step(const Geometry& g, const Anchors& an, const WaveSpeed& c, const State& in, State& out,
                   Workspace& w) {
    const std::size_t nx = g.nx, ny = g.ny, n = nx * ny;
    w.cc.resize(n);
    w.c1.resize(n);
    for (std::size_t k = 0; k < n; ++k) c.eval2(in.Zh[2][k], w.cc[k], w.c1[k]);
    for (int m = 0; m < 5; ++m) w.F[m].resize(n);
    double Vk[5], Wk[5], Fk[5];
    for (std::size_t k = 0; k < n; ++k) {
        for (int m = 0; m < 5; ++m) {
            Vk[m] = in.V[m][k];
            Wk[m] = in.W[m][k];
        }
        system_rhs(w.cc[k], w.c1[k], Vk, Wk, Fk);
        for (int m = 0; m < 5; ++m) w.F[m][k] = Fk[m];
    }
    w.P.resize(n);
    for (int m = 0; m < 5; ++m) {
        out.V[m].resize(n);
        out.W[m].resize(n);
        out.Zh[m].resize(n);
        out.Zv[m].resize(n);
        // V_Y = F along columns
        prefix_y(w.F[m].data(), w.P.data(), g);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                out.V[m][j * nx + i] = an.VC[m][i] + (w.P[j * nx + i] - w.P[an.ca[i] * nx + i]);
        // W_X = F along rows
        prefix_x(w.F[m].data(), w.P.data(), g, w);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                out.W[m][j * nx + i] = an.WR[m][j] + (w.P[j * nx + i] - w.P[j * nx + an.ra[j]]);
        prefix_x(out.V[m].data(), w.P.data(), g, w);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                out.Zh[m][j * nx + i] = an.ZR[m][j] + (w.P[j * nx + i] - w.P[j * nx + an.ra[j]]);
        prefix_y(out.W[m].data(), w.P.data(), g);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                out.Zv[m][j * nx + i] = an.ZC[m][i] + (w.P[j * nx + i] - w.P[an.ca[i] * nx + i]);
    }
    return sup_change(out.V, in.V) + sup_change(out.W, in.W) + sup_change(out.Zh, in.Zh) +
           sup_change(out.Zv, in.Zv);
}

Geometry geometry(const GridSolution& sol, std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1,
                  int order) {
    Geometry g;
    g.nx = i1 - i0 + 1;
    g.ny = j1 - j0 + 1;
    std::vector<double> xs(sol.X.begin() + i0, sol.X.begin() + i1 + 1);
    std::vector<double> ys(sol.Y.begin() + j0, sol.Y.begin() + j1 + 1);
    std::vector<char> rx(sol.rough_x.begin() + i0, sol.rough_x.begin() + i1 + 1);
    std::vector<char> ry(sol.rough_y.begin() + j0, sol.rough_y.begin() + j1 + 1);
    rx[0] = ry[0] = 0;
    g.sx = quadrature_stencils(xs, order, &rx);
    g.sy = quadrature_stencils(ys, order, &ry);
    return g;
}

std::string cell_name(const Cell& cl, const GridSolution& sol) {
    std::ostringstream os;
    os << "cell X in [" << sol.X[cl.i0] << ", " << sol.X[cl.i1] << "], Y in [" << sol.Y[cl.j0] << ", "
       << sol.Y[cl.j1] << "]";
    return os.str();
}

std::shared_ptr<Cell> solve_cell(const GridSolution& sol, std::size_t i0, std::size_t i1, std::size_t j0,
                                 std::size_t j1, const Anchors& an, const WaveSpeed& c, const SolverParams& prm) {
    auto cell = std::make_shared<Cell>();
    cell->i0 = i0;
    cell->i1 = i1;
    cell->j0 = j0;
    cell->j1 = j1;
    const Geometry g = geometry(sol, i0, i1, j0, j1, prm.order);
    const std::size_t nx = g.nx, ny = g.ny, n = nx * ny;
    State a, b;
    for (int m = 0; m < 5; ++m) {
        a.V[m].resize(n);
        a.W[m].resize(n);
        a.Zh[m].resize(n);
        a.Zv[m].resize(n);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                a.V[m][j * nx + i] = an.VC[m][i];
                a.W[m][j * nx + i] = an.WR[m][j];
                a.Zh[m][j * nx + i] = an.ZR[m][j];
                a.Zv[m][j * nx + i] = an.ZC[m][i];
            }
    }
    Workspace w;
    double best = INFINITY;
    int it = 0;
    for (;; ++it) {
        if (it >= prm.max_iter)
            throw NonContraction("no convergence within max_iter on " + cell_name(*cell, sol) +
                                 "; subdivide the cell");
        double diff = picard_step(g, an, c, a, b, w);
        std::swap(a, b);
        if (!std::isfinite(diff))
            throw NonContraction("non-finite iterate on " + cell_name(*cell, sol) + "; subdivide the cell");
        if (it > 4 && diff > 1e3 * best && diff > 1e-6)
            throw NonContraction("diverging iteration on " + cell_name(*cell, sol) + "; subdivide the cell");
        best = std::min(best, diff);
        if (diff <= prm.tol) break;
    }
    cell->iterations = it + 1;
    double disc = 0;
    for (int m = 0; m < 5; ++m) {
        cell->Z[m].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            cell->Z[m][k] = 0.5 * (a.Zh[m][k] + a.Zv[m][k]);
            disc = std::max(disc, std::abs(a.Zh[m][k] - a.Zv[m][k]));
        }
        for (std::size_t j = 0; j < ny; ++j) cell->Z[m][j * nx + an.ra[j]] = an.ZR[m][j];
        for (std::size_t i = 0; i < nx; ++i) cell->Z[m][an.ca[i] * nx + i] = an.ZC[m][i];
        cell->Zh[m] = std::move(a.Zh[m]);
        cell->V[m] = std::move(a.V[m]);
        cell->W[m] = std::move(a.W[m]);
    }
    cell->discrepancy = disc;
    // discretization negatives in x_X, x_Y, J_X, J_Y
    for (int m : {1, 3}) {
        // quadrature error scales with the total energy, not with the local density
        const double floor = 1e-12 + 1e-7 * (1 + std::abs(sol.energy));
        for (auto* arr : {&cell->V[m], &cell->W[m]}) {
            for (double& v : *arr) {
                if (v >= 0) continue;
                if (v < -floor) {
                    std::ostringstream os;
                    os << "negative " << (m == 1 ? "x" : "J") << " derivative " << v << " on "
                       << cell_name(*cell, sol);
                    throw DegeneracyError(os.str());
                }
                v = 0;
            }
        }
    }
    return cell;
}

// ==== tiling ====

std::vector<std::size_t> make_bounds(const std::vector<double>& s, double ds) {
    std::vector<std::size_t> b{0};
    const std::size_t n = s.size();
    while (b.back() < n - 1) {
        std::size_t k = b.back() + 1;
        const double target = s[b.back()] + ds;
        while (k < n - 1 && s[k] < target) ++k;
        // do not leave a sliver at the end
        if (n - 1 - k > 0 && s[n - 1] - s[k] < 0.5 * ds) k = n - 1;
        b.push_back(k);
    }
    return b;
}

GridSolution lattice(const CurveData& cv) {
    if (cv.size() < 2) throw TilingError("curve needs at least two nodes");
    GridSolution sol;
    sol.X = cv.X;
    sol.Y = cv.Y;
    sol.p = cv.p;
    sol.q = cv.q;
    sol.energy = cv.Z[3].back();
    std::vector<const std::vector<double>*> fv, fw;
    for (int m = 0; m < 5; ++m) {
        fv.push_back(&cv.V[m]);
        fw.push_back(&cv.W[m]);
    }
    sol.rough_x = rough_intervals(cv.X, fv);
    sol.rough_y = rough_intervals(cv.Y, fw);
    for (std::size_t k = 1; k < cv.size(); ++k)
        if (cv.X[k] < cv.X[k - 1] || cv.Y[k] < cv.Y[k - 1] || !(cv.s[k] >= cv.s[k - 1]))
            throw TilingError("curve is not monotone at node " + std::to_string(k));
    return sol;
}

Anchors diagonal_anchors(const CurveData& cv, std::size_t k0, std::size_t k1) {
    const std::size_t n = k1 - k0 + 1;
    Anchors an;
    an.ra = anchor_cols(CellKind::diagonal, n, n);
    an.ca = anchor_rows(CellKind::diagonal, n, n);
    for (int m = 0; m < 5; ++m) {
        an.ZR[m].assign(cv.Z[m].begin() + k0, cv.Z[m].begin() + k1 + 1);
        an.ZC[m] = an.ZR[m];
        an.WR[m].assign(cv.W[m].begin() + k0, cv.W[m].begin() + k1 + 1);
        an.VC[m].assign(cv.V[m].begin() + k0, cv.V[m].begin() + k1 + 1);
    }
    return an;
}

// Anchors from the stored values of solved cells covering the anchor nodes.
Anchors neighbor_anchors(CellKind kind, const Cell& rowsrc, const Cell& colsrc, std::size_t i0, std::size_t i1,
                         std::size_t j0, std::size_t j1) {
    const std::size_t nx = i1 - i0 + 1, ny = j1 - j0 + 1;
    Anchors an;
    an.ra = anchor_cols(kind, nx, ny);
    an.ca = anchor_rows(kind, nx, ny);
    for (int m = 0; m < 5; ++m) {
        an.ZR[m].resize(ny);
        an.WR[m].resize(ny);
        an.ZC[m].resize(nx);
        an.VC[m].resize(nx);
        for (std::size_t j = 0; j < ny; ++j) {
            std::size_t k = rowsrc.idx(i0 + an.ra[j], j0 + j);
            an.ZR[m][j] = rowsrc.Z[m][k];
            an.WR[m][j] = rowsrc.W[m][k];
        }
        for (std::size_t i = 0; i < nx; ++i) {
            std::size_t k = colsrc.idx(i0 + i, j0 + an.ca[i]);
            an.ZC[m][i] = colsrc.Z[m][k];
            an.VC[m][i] = colsrc.V[m][k];
        }
    }
    return an;
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (nt <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::size_t err_index = n;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= n) return;
            try {
                fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                // report the lowest failing index so errors do not depend on scheduling
                if (k < err_index) {
                    err_index = k;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

GridSolution solve_tiled(const CurveData& cv, const WaveSpeed& c, const SolverParams& prm, double ds,
                         std::optional<double> target) {
    GridSolution sol = lattice(cv);
    sol.bounds = make_bounds(cv.s, ds);
    const std::size_t m = sol.ncells(), n = sol.size();
    sol.cells.assign(m * m, nullptr);
    const int threads = prm.threads > 0 ? prm.threads : default_threads();
    const bool future = !target || *target > 0;
    const bool past = !target || *target < 0;
    std::size_t solved = 0;
    auto budget = [&](std::size_t add) {
        solved += add;
        if (solved > prm.cell_budget)
            throw ResourceError("cell budget " + std::to_string(prm.cell_budget) + " exhausted at " +
                                std::to_string(solved) + " cells");
    };
    auto slot = [&](std::size_t a, std::size_t b) -> std::shared_ptr<const Cell>& { return sol.cells[a * m + b]; };
    const auto& B = sol.bounds;

    budget(m);
    parallel_for(m, threads, [&](std::size_t a) {
        slot(a, a) = solve_cell(sol, B[a], B[a + 1], B[a], B[a + 1], diagonal_anchors(cv, B[a], B[a + 1]), c, prm);
    });
    for (std::size_t d = 0; d + 1 < m; ++d) {
        if (target) {
            if (*target == 0) break;
            // stop once {t = T} lies inside the band; domain edges do not count
            double ext = *target > 0 ? INFINITY : -INFINITY;
            for (std::size_t a = 0; a + d < m; ++a) {
                std::size_t ca = *target > 0 ? a + d : a, rb = *target > 0 ? a : a + d;
                const Cell& cl = *slot(ca, rb);
                std::size_t row = *target > 0 ? cl.j0 : cl.j1;
                std::size_t col = *target > 0 ? cl.i1 : cl.i0;
                if (row != (*target > 0 ? 0 : n - 1))
                    for (std::size_t i = cl.i0; i <= cl.i1; ++i) {
                        double t = cl.Z[0][cl.idx(i, row)];
                        ext = *target > 0 ? std::min(ext, t) : std::max(ext, t);
                    }
                if (col != (*target > 0 ? n - 1 : 0))
                    for (std::size_t j = cl.j0; j <= cl.j1; ++j) {
                        double t = cl.Z[0][cl.idx(col, j)];
                        ext = *target > 0 ? std::min(ext, t) : std::max(ext, t);
                    }
            }
            if (*target > 0 ? ext > *target : ext < *target) break;
        }
        const std::size_t D = d + 1, cnt = m - D;
        if (future) {
            budget(cnt);
            parallel_for(cnt, threads, [&](std::size_t k) {
                std::size_t a = k + D, b = k;
                Anchors an = neighbor_anchors(CellKind::future, *slot(a - 1, b), *slot(a, b + 1), B[a], B[a + 1], B[b],
                                              B[b + 1]);
                slot(a, b) = solve_cell(sol, B[a], B[a + 1], B[b], B[b + 1], an, c, prm);
            });
        }
        if (past) {
            budget(cnt);
            parallel_for(cnt, threads, [&](std::size_t k) {
                std::size_t a = k, b = k + D;
                Anchors an = neighbor_anchors(CellKind::past, *slot(a + 1, b), *slot(a, b - 1), B[a], B[a + 1], B[b],
                                              B[b + 1]);
                slot(a, b) = solve_cell(sol, B[a], B[a + 1], B[b], B[b + 1], an, c, prm);
            });
        }
    }
    return sol;
}

}  // namespace

GridSolution tile_solve(const CurveData& curve, const WaveSpeed& c, const SolverParams& params,
                        std::optional<double> target_time) {
    if (!(params.tol > 0) || params.max_iter < 1 || !(params.cell_ds > 0))
        throw ConfigError("solver parameters must be positive");
    double ds = params.cell_ds;
    for (int r = 0;; ++r, ds *= 0.5) {
        try {
            return solve_tiled(curve, c, params, ds, target_time);
        } catch (const NonContraction&) {
            if (r >= params.max_refine) throw;
        }
    }
}

GridSolution solve_rectangle(const CurveData& curve, const WaveSpeed& c, const SolverParams& params) {
    double span = curve.s.empty() ? 1.0 : curve.s.back() - curve.s.front();
    SolverParams p = params;
    p.cell_ds = 2 * span + 1;
    p.max_refine = 0;
    return tile_solve(curve, c, p, std::nullopt);
}

// ==== access ====

const Cell* GridSolution::find(std::size_t i, std::size_t j) const {
    const std::size_t m = ncells();
    if (m == 0 || i >= size() || j >= size()) return nullptr;
    auto pick = [&](std::size_t k, std::size_t out[2]) {
        std::size_t a = static_cast<std::size_t>(std::upper_bound(bounds.begin(), bounds.end(), k) - bounds.begin());
        a = a == 0 ? 0 : a - 1;
        if (a >= m) a = m - 1;
        out[0] = a;
        out[1] = (k == bounds[a] && a > 0) ? a - 1 : a;
    };
    std::size_t ai[2], bj[2];
    pick(i, ai);
    pick(j, bj);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            if (const Cell* cl = cell(ai[x], bj[y])) return cl;
    return nullptr;
}

namespace {
const Cell& need(const GridSolution& s, std::size_t i, std::size_t j) {
    const Cell* cl = s.find(i, j);
    if (!cl) {
        std::ostringstream os;
        os << "lattice node (" << i << ", " << j << ") is outside the solved region";
        throw CoverageError(os.str());
    }
    return *cl;
}
}  // namespace

double GridSolution::Z(int comp, std::size_t i, std::size_t j) const {
    const Cell& cl = need(*this, i, j);
    double v = cl.Z[comp][cl.idx(i, j)];
    return comp == 0 ? v - t_offset : v;
}

double GridSolution::V(int comp, std::size_t i, std::size_t j) const {
    const Cell& cl = need(*this, i, j);
    return cl.V[comp][cl.idx(i, j)];
}

double GridSolution::W(int comp, std::size_t i, std::size_t j) const {
    const Cell& cl = need(*this, i, j);
    return cl.W[comp][cl.idx(i, j)];
}

std::optional<double> GridSolution::sample(int comp, double Xp, double Yp) const {
    auto bracket = [](const std::vector<double>& g, double v, std::size_t& lo, std::size_t& hi, double& th) {
        if (v < g.front() || v > g.back()) return false;
        std::size_t k = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), v) - g.begin());
        if (g[k] == v) {
            lo = hi = k;
            th = 0;
            return true;
        }
        lo = k - 1;
        hi = k;
        th = (v - g[lo]) / (g[hi] - g[lo]);
        return true;
    };
    std::size_t i0, i1, j0, j1;
    double tx, ty;
    if (!bracket(X, Xp, i0, i1, tx) || !bracket(Y, Yp, j0, j1, ty)) return std::nullopt;
    if (!covered(i0, j0) || !covered(i1, j0) || !covered(i0, j1) || !covered(i1, j1)) return std::nullopt;
    double a = Z(comp, i0, j0), b = Z(comp, i1, j0), cc = Z(comp, i0, j1), d = Z(comp, i1, j1);
    return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * cc + tx * d);
}

double GridSolution::max_discrepancy() const {
    double m = 0;
    for (const auto& cl : cells)
        if (cl) m = std::max(m, cl->discrepancy);
    return m;
}

double picard_residual(const GridSolution& sol, const WaveSpeed& c, int order) {
    const std::size_t m = sol.ncells();
    double worst = 0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const Cell* cl = sol.cell(a, b);
            if (!cl) continue;
            CellKind kind = a == b ? CellKind::diagonal : a > b ? CellKind::future : CellKind::past;
            Anchors an = neighbor_anchors(kind, *cl, *cl, cl->i0, cl->i1, cl->j0, cl->j1);
            Geometry g = geometry(sol, cl->i0, cl->i1, cl->j0, cl->j1, order);
            State in, out;
            in.V = cl->V;
            in.W = cl->W;
            in.Zh = cl->Zh;
            in.Zv = cl->Z;
            Workspace w;
            picard_step(g, an, c, in, out, w);
            double d = sup_change(out.V, in.V) + sup_change(out.W, in.W) + sup_change(out.Zh, in.Zh);
            worst = std::max(worst, d);
        }
    return worst;
}

Report check_H(const GridSolution& sol, const WaveSpeed& c) {
    Report rep;
    struct Acc {
        double worst = 0, scale = 0;
        std::string where;
    };
    Acc acc[6], neg, jb, kb, sumpos;
    const char* names[6] = {"xX_c_tX", "xY_c_tY", "JX_c_KX", "JY_c_KY", "energy_X", "energy_Y"};
    const double E = sol.energy;
    const double kap = c.kappa();
    auto at = [&](std::size_t i, std::size_t j) {
        std::ostringstream os;
        os << "(X,Y)=(" << sol.X[i] << ", " << sol.Y[j] << ")";
        return os.str();
    };
    auto put = [&](Acc& a, double res, double scale, std::size_t i, std::size_t j) {
        a.scale = std::max(a.scale, scale);
        if (!(res <= a.worst)) {
            a.worst = res;
            a.where = at(i, j);
        }
    };
    for (const auto& cp : sol.cells) {
        if (!cp) continue;
        const Cell& cl = *cp;
        for (std::size_t j = cl.j0; j <= cl.j1; ++j)
            for (std::size_t i = cl.i0; i <= cl.i1; ++i) {
                std::size_t k = cl.idx(i, j);
                double cc = c.eval(cl.Z[2][k]);
                double V[5], W[5];
                for (int m = 0; m < 5; ++m) {
                    V[m] = cl.V[m][k];
                    W[m] = cl.W[m][k];
                }
                put(acc[0], std::abs(V[1] - cc * V[0]), std::abs(V[1]), i, j);
                put(acc[1], std::abs(W[1] + cc * W[0]), std::abs(W[1]), i, j);
                put(acc[2], std::abs(V[3] - cc * V[4]), std::abs(V[3]), i, j);
                put(acc[3], std::abs(W[3] + cc * W[4]), std::abs(W[3]), i, j);
                double lx = 2 * V[3] * V[1], rx = cc * cc * V[2] * V[2] + cc * sol.p[i] * sol.p[i];
                double ly = 2 * W[3] * W[1], ry = cc * cc * W[2] * W[2] + cc * sol.q[j] * sol.q[j];
                put(acc[4], std::abs(lx - rx), std::max(std::abs(lx), std::abs(rx)), i, j);
                put(acc[5], std::abs(ly - ry), std::max(std::abs(ly), std::abs(ry)), i, j);
                put(neg, std::max(0.0, -std::min({V[1], W[1], V[3], W[3]})), 0, i, j);
                put(sumpos, (V[1] + V[3] > 0 && W[1] + W[3] > 0) ? 0.0 : 1.0, 0, i, j);
                double J = cl.Z[3][k], K = cl.Z[4][k];
                put(jb, std::max({0.0, -J, J - E}), 0, i, j);
                put(kb, std::max(0.0, std::abs(K) - (1 + kap) * E), 0, i, j);
            }
    }
    for (int r = 0; r < 6; ++r)
        rep.add(names[r], acc[r].scale > 0 ? acc[r].worst / acc[r].scale : acc[r].worst, 1e-7, acc[r].where);
    rep.add("positivity", neg.worst, 0.0, neg.where);
    rep.add("x_plus_J_derivatives_positive", sumpos.worst, 0.0, sumpos.where);
    rep.add("J_bounds", jb.worst, 1e-9 * (1 + E), jb.where);
    rep.add("K_bounds", kb.worst, 1e-9 * (1 + E), kb.where);
    rep.add("Zh_Zv_discrepancy", sol.max_discrepancy(), 1e-3);
    return rep;
}

}  // namespace nvw
