#pragma once

#include "nvw/wavespeed.hpp"

#include <functional>
#include <vector>

namespace nvw::oracle {

using Fn = std::function<double(double)>;

struct FdSolution {
    std::vector<double> x, u, rho, sigma;
};

/// Leapfrog / centered-difference integrator for
///   u_tt - c(c u_x)_x = -c'(rho^2 + sigma^2)/4,  rho_t - (c rho)_x = 0,  sigma_t + (c sigma)_x = 0
/// on [xl, xr] with N + 1 uniform nodes, zero Dirichlet boundaries and dt/h = 0.4/kappa.
/// The first step is taken with RK4. Only valid while the solution stays smooth.
FdSolution fd_solve(const Fn& u0, const Fn& u1, const Fn& rho0, const Fn& sigma0, const WaveSpeed& c, double xl,
                    double xr, int N, double T);

/// Richardson combination (4 u_{h/2} - u_h) / 3 on the coarse nodes.
FdSolution fd_reference(const Fn& u0, const Fn& u1, const Fn& rho0, const Fn& sigma0, const WaveSpeed& c, double xl,
                        double xr, int N, double T);

}  // namespace nvw::oracle
