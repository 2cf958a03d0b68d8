#pragma once

#include "nvw/evolution.hpp"

#include "json.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace nvw {

// ==== conservation ====

struct ConservationReport {
    std::vector<double> times, total_energy, mu_mass, nu_mass;
    std::vector<int> atoms_count;
    double drift = 0;  ///< max |E(t) - E(0)| / E(0), 0 for zero energy

    nlohmann::json to_json() const;
    /// CSV: t, total_energy, mu_mass, nu_mass, atoms_count.
    void write_csv(std::ostream& os) const;
};

/// Energies of the evolved states at sorted times (slices of one solve per sign of t).
ConservationReport conservation_series(const EulerianState& state, const std::vector<double>& times,
                                       const WaveSpeed& c, const EvolveParams& params = {});

/// M(L(state)) against the state: field sup errors at the input nodes (tolerance field_tol),
/// cumulatives of mu and nu at 200 probes and the atom lists (tolerance cum_tol).
Report roundtrip_check(const EulerianState& state, const WaveSpeed& c, double field_tol, double cum_tol,
                       int n_atom = 32);

// ==== smooth-regime residuals ====

struct ConslawResidual {
    double v_residual = 0;  ///< mean |v_t - (c^2 w)_x|
    double w_residual = 0;  ///< mean |w_t - v_x|
    double h = 0;           ///< spacing used in t and x
    double scale = 0;       ///< mean |v_t| + |w_t| for relative reading
};

/// Centered differences of v = R^2 + c rho^2 + S^2 + c sigma^2 and w = (R^2 + c rho^2 - S^2 - c sigma^2)/c
/// from the slices at T - h, T, T + h, sampled on a uniform grid of spacing h over [xa, xb].
/// Throws NotApplicable when a slice carries an atom in [xa - h, xb + h].
ConslawResidual conslaw_residual(const EulerianState& state, double T, double h, double xa, double xb,
                                 const WaveSpeed& c, const EvolveParams& params = {});

/// Smooth tensor bump b((t - t0)/r) b((x - x0)/r) with b(z) = (1 - z^2)^3 on |z| < 1.
struct TestFunction {
    double t0 = 0, x0 = 0, r = 1;
    double value(double t, double x) const;
    double dt(double t, double x) const;
    double dx(double t, double x) const;
};

struct WeakResidual {
    double wave = 0, rho = 0, sigma = 0;  ///< |lhs - rhs| / (sum of |terms|), worst over the test functions
};

/// Weak-form identities for the wave equation and the two transport equations, integrated over
/// the solved lattice in characteristic coordinates (dx dt = 2 x_X x_Y / c dX dY).
WeakResidual weak_residual(const GridSolution& sol, const WaveSpeed& c, const std::vector<TestFunction>& phis);

/// Largest |u(t(X,Y), x(X,Y)) - U(X,Y)| over lattice nodes within `band` of the slice times,
/// with u taken from the slices and a first-order correction (t - t_k)(R + S)/2.
double lagrangian_consistency(const GridSolution& sol, const std::vector<double>& slice_times, double band,
                              const WaveSpeed& c, const EvolveParams& params = {});

// ==== regularity experiments ====

struct RegularizationReport {
    double tau = 0, xa = 0, xb = 0;  ///< shrunk interval [x_l + kappa tau, x_r - kappa tau]
    double rho0_min = 0, sigma0_min = 0;
    double rho_min = 0, sigma_min = 0;
    int atoms_inside = 0;
    bool pass() const { return rho_min > 0 && sigma_min > 0 && atoms_inside == 0; }
    nlohmann::json to_json() const;
};

/// Evolves data with positive rho0, sigma0 on the grid interval and inspects the shrunk interval.
/// Throws NotApplicable if a density minimum is not positive or tau is out of range.
RegularizationReport regularization_check(const EulerianState& state, double tau, const WaveSpeed& c,
                                          const EvolveParams& params = {});

struct ApproximationRow {
    double eps = 0, lambda_R = 1, lambda_S = 1;
    double u_sup_diff = 0;  ///< sup |u^n(tau) - u(tau)| on the shrunk interval
    double rho_l1 = 0;      ///< L1 norm of rho^n(tau) on the shrunk interval
    double sigma_l1 = 0;
};

struct ApproximationReport {
    double tau = 0, xa = 0, xb = 0;
    std::vector<ApproximationRow> rows;
    bool u_decreasing = true, rho_decreasing = true;
    nlohmann::json to_json() const;
    /// CSV: eps, lambda_R, lambda_S, u_sup_diff, rho_l1, sigma_l1.
    void write_csv(std::ostream& os) const;
};

/// Data with rho0 = sigma0 = eps on the grid interval and R, S scaled so that mu and nu keep the base
/// totals. u is rebuilt from int c(u) du = lambda int c(u0) du so it stays compatible.
EulerianState perturbed_state(const EulerianState& base, double eps, const WaveSpeed& c, double* lambda_R = nullptr,
                              double* lambda_S = nullptr);

/// Base data must have rho0 = sigma0 = 0 and no atoms. Epsilons should decrease.
ApproximationReport approximation_study(const EulerianState& base, const std::vector<double>& epsilons, double tau,
                                        const WaveSpeed& c, const EvolveParams& params = {});

/// int_0^u c(v) dv by Gauss-Legendre on subintervals.
double primitive_c(const WaveSpeed& c, double u);

}  // namespace nvw
