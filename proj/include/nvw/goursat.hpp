#pragma once

#include "nvw/lagrangian.hpp"
#include "nvw/quadrature.hpp"
#include "nvw/report.hpp"
#include "nvw/wavespeed.hpp"

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace nvw {

struct SolverParams {
    double tol = 1e-12;       ///< sum of sup-norm changes per Picard step
    int max_iter = 200;
    double cell_ds = 0.25;    ///< initial cell width in s
    int max_refine = 6;       ///< cell halvings after non-contraction
    std::size_t cell_budget = 200000;
    int threads = 0;          ///< 0: NVW_THREADS or hardware concurrency
    int order = 4;            ///< 4: cubic stencils on smooth stretches, 2: trapezoid everywhere
};

/// Threads to use: NVW_THREADS if set, else hardware concurrency, at least 1.
int default_threads();

/// Solution on one block of the lattice. Arrays are row-major: (j - j0) * nx + (i - i0).
struct Cell {
    std::size_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
    std::array<std::vector<double>, 5> Z, Zh, V, W;
    double discrepancy = 0;  ///< max |Z_h - Z_v| before merging
    int iterations = 0;

    std::size_t nx() const { return i1 - i0 + 1; }
    std::size_t ny() const { return j1 - j0 + 1; }
    std::size_t idx(std::size_t i, std::size_t j) const { return (j - j0) * nx() + (i - i0); }
};

/// Element of H on the lattice spanned by the curve nodes: column i sits at X[i], row j at Y[j],
/// and curve node k is lattice node (k, k). Repeated abscissae carry one-sided derivatives.
class GridSolution {
public:
    std::vector<double> X, Y, p, q;
    std::vector<char> rough_x, rough_y;  ///< lattice intervals where the curve data jumps
    std::vector<std::size_t> bounds;  ///< cell a spans lattice indices [bounds[a], bounds[a+1]]
    std::vector<std::shared_ptr<const Cell>> cells;  ///< ncells()^2, null where not solved
    double t_offset = 0;  ///< subtracted from t on access
    double energy = 0;    ///< total energy carried by the curve

    std::size_t size() const { return X.size(); }
    std::size_t ncells() const { return bounds.empty() ? 0 : bounds.size() - 1; }
    const Cell* cell(std::size_t a, std::size_t b) const { return cells[a * ncells() + b].get(); }
    /// A solved cell containing lattice node (i, j), or null.
    const Cell* find(std::size_t i, std::size_t j) const;
    bool covered(std::size_t i, std::size_t j) const { return find(i, j) != nullptr; }

    /// Components at a lattice node (t already shifted). Throws CoverageError if unsolved.
    double Z(int comp, std::size_t i, std::size_t j) const;
    double V(int comp, std::size_t i, std::size_t j) const;
    double W(int comp, std::size_t i, std::size_t j) const;
    double t(std::size_t i, std::size_t j) const { return Z(0, i, j); }

    /// Bilinear value of Z component at a point inside the solved region; null if uncovered.
    std::optional<double> sample(int comp, double Xp, double Yp) const;
    double max_discrepancy() const;
};

/// Solves the whole lattice as a single rectangle.
GridSolution solve_rectangle(const CurveData& curve, const WaveSpeed& c, const SolverParams& params = {});

/// Tiles the lattice into cells of width ~cell_ds in s and solves them by wavefronts of equal
/// distance from the diagonal. With a target time only the band needed to contain {t = T} is
/// solved; otherwise every cell is. Cells are halved and the solve restarted on non-contraction.
GridSolution tile_solve(const CurveData& curve, const WaveSpeed& c, const SolverParams& params = {},
                        std::optional<double> target_time = std::nullopt);

/// Largest change of (Z, V, W) under one more Picard step applied to the stored solution.
double picard_residual(const GridSolution& sol, const WaveSpeed& c, int order = 4);

/// Relations of H on the solved region: x_X = c t_X, J_X = c K_X, the energy identities,
/// positivity, and the energy bounds.
Report check_H(const GridSolution& sol, const WaveSpeed& c);

namespace detail {

/// P[k] = P[k-1] + stencil k applied to f, along `steps`, for `lanes` contiguous lanes spaced
/// `stride` apart. Uses AVX2 when available; results are bit-identical either way.
void prefix_sum(const double* f, double* P, const Stencil* st, std::size_t steps, std::size_t lanes,
                std::size_t stride, bool allow_simd = true);
bool simd_available();

}  // namespace detail

}  // namespace nvw
