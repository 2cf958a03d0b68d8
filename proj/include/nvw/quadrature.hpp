#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace nvw {

/// Integral over [x[k-1], x[k]] as sum_m w[m] f[idx[m]].
struct Stencil {
    std::array<std::size_t, 4> idx{};
    std::array<double, 4> w{};
};

std::vector<Stencil> trapezoid_stencils(const std::vector<double>& x);
/// Cubic four-point stencils where four consecutive abscissae are distinct with spacing ratio <= 5,
/// trapezoid elsewhere (repeated abscissae mark kinks). order < 4 gives trapezoid everywhere.
/// A stencil never spans an interval flagged in `rough` (indexed by the right node).
std::vector<Stencil> quadrature_stencils(const std::vector<double>& x, int order,
                                         const std::vector<char>* rough = nullptr);

/// Flags interval [x[k-1], x[k]] when one of the sampled functions has a slope there more than four
/// times the slopes on both neighbouring intervals, i.e. an unresolved jump. Changes below 1e-9 of
/// the function's sup norm are ignored.
std::vector<char> rough_intervals(const std::vector<double>& x, const std::vector<const std::vector<double>*>& fs);

/// Cell integrals of sampled f: cubic stencils where f is nonnegative and the cubic value is
/// nonnegative, trapezoid otherwise.
std::vector<double> cell_integrals(const std::vector<double>& x, const std::vector<double>& f);

}  // namespace nvw
