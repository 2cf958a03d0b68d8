#pragma once

#include "nvw/eulerian.hpp"
#include "nvw/goursat.hpp"
#include "nvw/lagrangian.hpp"
#include "nvw/report.hpp"

#include <iosfwd>
#include <optional>

namespace nvw {

struct EvolveParams {
    SolverParams solver;
    int n_atom = 32;
    double margin = 1.0;  ///< extra zero padding per side beyond 2 kappa |T| + 2 E
    bool thin = true;     ///< thin the extracted curve to the input node density
};

/// t replaced by t - T. Arrays are shared, only the offset changes.
GridSolution time_shift(const GridSolution& sol, double T);

/// The curve {t = 0} of the (shifted) solution as an element of G0. Row crossings give
/// inf{X : t >= 0}, column crossings sup{Y : t >= 0}; coincident crossings are joined along the
/// left side and then the top. Throws CoverageError when the zero set leaves the solved band.
CurveData extract_time_curve(const GridSolution& sol, bool thin = true);

/// X(s) = sup{X : t(X', 2s - X') < 0 for all X' < X} by bisection on the bilinear t.
/// Reference definition of the extracted curve; throws CoverageError outside the solved region.
double curve_point(const GridSolution& sol, double s, double tol = 1e-13);

/// Map D: curve in G0 to an aligned element of F.
PsiPair map_D(const CurveData& curve, const WaveSpeed& c);

/// Map M: element of F to Eulerian data. Levels of x1 where J1 increases become atoms.
EulerianState map_M(const PsiPair& psi, const WaveSpeed& c);

/// One evolution of the state to time T (negative T runs backward).
EulerianState evolve(const EulerianState& state, double T, const WaveSpeed& c, const EvolveParams& params = {});

/// Pads the state and solves the band holding every slice {t = T'} with T' between 0 and T.
GridSolution solve_band(const EulerianState& state, double T, const WaveSpeed& c, const EvolveParams& params = {});
/// The Eulerian data on {t = T} of a solution from solve_band.
EulerianState slice_at(const GridSolution& sol, double T, const WaveSpeed& c, const EvolveParams& params = {});
/// Several times from shared solves, one per sign of T.
std::vector<EulerianState> evolve_many(const EulerianState& state, const std::vector<double>& times,
                                       const WaveSpeed& c, const EvolveParams& params = {});

/// Differences between evolve(T1 + T2) and evolve(evolve(T1), T2), plus the round trip T1 then -T1.
Report check_semigroup(const EulerianState& state, double T1, double T2, const WaveSpeed& c,
                       const EvolveParams& params, double tol);

/// Sup |u_a - u_b| on the union of both grids (values 0 outside a grid).
double sup_u_difference(const EulerianState& a, const EulerianState& b);
/// Mean |F_a - F_b| of the cumulative functions of mu + nu at `probes` uniform points, times the span.
double cumulative_l1_difference(const EulerianState& a, const EulerianState& b, int probes = 200);

/// Time-slice CSV: t, x, u, R, S, rho, sigma, mu_density, nu_density.
void write_slice_csv(std::ostream& os, double t, const EulerianState& s, bool header = true);
/// Atoms CSV: t, x, mass, which_measure.
void write_atoms_csv(std::ostream& os, double t, const EulerianState& s, bool header = true);

}  // namespace nvw
