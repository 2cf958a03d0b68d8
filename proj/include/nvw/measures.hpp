#pragma once

#include "json.hpp"

#include <optional>
#include <vector>

namespace nvw {

struct Atom {
    double x = 0;
    double mass = 0;
};

/// Finite positive measure on the line: nodal density samples on a grid, exact
/// per-cell masses, point masses, and mass left of the grid.
/// Inside a cell the density is the linear interpolant of the node samples,
/// rescaled so that it integrates to the stored cell mass.
class RadonMeasure {
public:
    RadonMeasure() = default;
    /// Cell masses from the trapezoid rule on the density samples.
    RadonMeasure(std::vector<double> grid, std::vector<double> density, std::vector<Atom> atoms = {},
                 double left_tail = 0);
    static RadonMeasure with_masses(std::vector<double> grid, std::vector<double> density,
                                    std::vector<double> cell_masses, std::vector<Atom> atoms = {},
                                    double left_tail = 0);
    /// {"density": {"grid": [...], "values": [...]}, "atoms": [[x, m], ...], "left_tail": m}
    static RadonMeasure from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& density() const { return density_; }
    const std::vector<double>& cell_masses() const { return mass_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double left_tail() const { return left_tail_; }

    /// mu((-inf, x)), open on the right.
    double cumulative(double x) const;
    /// mu((-inf, x]).
    double cumulative_closed(double x) const;
    /// Mass of the atom at exactly x, 0 if none.
    double atom_at(double x) const;
    /// Linear interpolation of the density samples, 0 outside the grid.
    double density_at(double x) const;

    double ac_mass() const;
    double atom_mass() const;
    double total() const { return left_tail_ + ac_mass() + atom_mass(); }

private:
    std::vector<double> grid_, density_, mass_;
    std::vector<Atom> atoms_;
    double left_tail_ = 0;
    std::vector<double> cum_;       // left_tail + cell masses before node k
    std::vector<double> atom_cum_;  // atom mass strictly before atom k

    void finish();
};

/// Nondecreasing piecewise-linear map through (input, output) samples.
/// A repeated input is a vertical jump; outside the samples it continues with fixed slopes.
class MonotoneMap {
public:
    MonotoneMap(std::vector<double> in, std::vector<double> out, double left_slope = 1, double right_slope = 1);

    /// Value at x; at a jump the lower value (left-continuous).
    double operator()(double x) const;
    /// sup{x : f(x) < y}.
    double generalized_inverse(double y) const;

    const std::vector<double>& inputs() const { return in_; }
    const std::vector<double>& outputs() const { return out_; }

private:
    std::vector<double> in_, out_;
    double ls_, rs_;
};

/// f(x) = x + mu((-inf, x)) sampled on the grid and at the atoms.
MonotoneMap cumulative_map(const RadonMeasure& m);

/// Push-forward of the measure with node weights w (a density in the input variable) under f.
/// Cells whose image has zero length become atoms. `node_slopes` (f' at the nodes) and
/// `cell_masses` (exact input-cell masses) are optional refinements of the nodal estimates.
RadonMeasure push_forward(const MonotoneMap& f, const std::vector<double>& weights,
                          const std::optional<std::vector<double>>& node_slopes = std::nullopt,
                          const std::optional<std::vector<double>>& cell_masses = std::nullopt,
                          double left_mass = 0);

}  // namespace nvw
