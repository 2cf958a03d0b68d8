#pragma once

#include "nvw/measures.hpp"
#include "nvw/report.hpp"
#include "nvw/wavespeed.hpp"

#include <vector>

namespace nvw {

/// Eulerian data (u, R, S, rho, sigma, mu, nu) sampled on an increasing grid,
/// extended by zero outside it.
struct EulerianState {
    std::vector<double> grid, u, R, S, rho, sigma;
    RadonMeasure mu, nu;

    std::size_t size() const { return grid.size(); }
    /// Linear interpolation of a field, 0 outside the grid.
    static double sample(const std::vector<double>& grid, const std::vector<double>& f, double x);
    double u_at(double x) const { return sample(grid, u, x); }
};

/// R = u_t + c u_x, S = u_t - c u_x, mu/nu densities 1/4 (R^2 + c rho^2), 1/4 (S^2 + c sigma^2).
/// Throws CompatibilityError when u_x disagrees with the differences of u beyond 10 h^2 (1 + max|u_x|).
EulerianState from_primitives(const std::vector<double>& grid, const std::vector<double>& u,
                              const std::vector<double>& ut, const std::vector<double>& ux,
                              const std::vector<double>& rho, const std::vector<double>& sigma,
                              const std::vector<Atom>& mu_atoms, const std::vector<Atom>& nu_atoms,
                              const WaveSpeed& c, bool check_compatibility = true);

/// Builds the measures from the fields (trapezoid cell masses) plus atoms and left tails.
EulerianState from_riemann(const std::vector<double>& grid, const std::vector<double>& u,
                           const std::vector<double>& R, const std::vector<double>& S,
                           const std::vector<double>& rho, const std::vector<double>& sigma,
                           const std::vector<Atom>& mu_atoms, const std::vector<Atom>& nu_atoms,
                           const WaveSpeed& c, double mu_tail = 0, double nu_tail = 0);

EulerianState zero_state(const std::vector<double>& grid);

double total_energy(const EulerianState& s);

/// Largest |u_x - (R - S)/(2c)| relative to the allowed 10 h^2 (1 + max|u_x|); index of the worst node.
double compatibility_residual(const EulerianState& s, const WaveSpeed& c, std::size_t* worst = nullptr);

Report validate(const EulerianState& s, const WaveSpeed& c);

/// Extends the state by zero on uniform margins of the given widths (spacing h).
EulerianState pad(const EulerianState& s, double left, double right, double h);

/// Drops leading/trailing nodes that carry no field values and no mass, keeping one zero node per side.
EulerianState trim(const EulerianState& s);

}  // namespace nvw
