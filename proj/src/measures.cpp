#include "nvw/measures.hpp"

#include "nvw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nvw {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0; }

}  // namespace

RadonMeasure::RadonMeasure(std::vector<double> grid, std::vector<double> density, std::vector<Atom> atoms,
                           double left_tail)
    : grid_(std::move(grid)), density_(std::move(density)), atoms_(std::move(atoms)), left_tail_(left_tail) {
    if (density_.size() != grid_.size()) throw ValidationError("measure: density and grid sizes differ");
    mass_.clear();
    for (std::size_t k = 0; k + 1 < grid_.size(); ++k)
        mass_.push_back(0.5 * (density_[k] + density_[k + 1]) * (grid_[k + 1] - grid_[k]));
    finish();
}

RadonMeasure RadonMeasure::with_masses(std::vector<double> grid, std::vector<double> density,
                                       std::vector<double> cell_masses, std::vector<Atom> atoms, double left_tail) {
    RadonMeasure m;
    m.grid_ = std::move(grid);
    m.density_ = std::move(density);
    m.mass_ = std::move(cell_masses);
    m.atoms_ = std::move(atoms);
    m.left_tail_ = left_tail;
    if (m.density_.size() != m.grid_.size()) throw ValidationError("measure: density and grid sizes differ");
    std::size_t cells = m.grid_.empty() ? 0 : m.grid_.size() - 1;
    if (m.mass_.size() != cells) throw ValidationError("measure: need one mass per grid cell");
    m.finish();
    return m;
}

void RadonMeasure::finish() {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!std::isfinite(grid_[k])) throw ValidationError("measure: non-finite grid point");
        if (k > 0 && !(grid_[k] > grid_[k - 1])) throw ValidationError("measure: grid must be strictly increasing");
        if (!finite_nonneg(density_[k]))
            throw ValidationError("measure: density must be finite and >= 0 (node " + std::to_string(k) + ")");
    }
    for (double m : mass_)
        if (!finite_nonneg(m)) throw ValidationError("measure: cell masses must be finite and >= 0");
    if (!finite_nonneg(left_tail_)) throw ValidationError("measure: left tail must be finite and >= 0");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    std::vector<Atom> merged;
    for (const Atom& a : atoms_) {
        if (!std::isfinite(a.x) || !std::isfinite(a.mass) || !(a.mass > 0))
            throw ValidationError("measure: atoms need a finite position and positive mass");
        if (!merged.empty() && merged.back().x == a.x) merged.back().mass += a.mass;
        else merged.push_back(a);
    }
    atoms_ = std::move(merged);

    cum_.assign(grid_.size(), left_tail_);
    for (std::size_t k = 1; k < grid_.size(); ++k) cum_[k] = cum_[k - 1] + mass_[k - 1];
    atom_cum_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t k = 0; k < atoms_.size(); ++k) atom_cum_[k + 1] = atom_cum_[k] + atoms_[k].mass;
}

RadonMeasure RadonMeasure::from_json(const nlohmann::json& j) {
    std::vector<double> grid, values, masses;
    if (j.contains("density")) {
        const auto& d = j.at("density");
        grid = d.at("grid").get<std::vector<double>>();
        values = d.at("values").get<std::vector<double>>();
    }
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2) throw ParseError("measure atoms must be [x, mass] pairs");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
    }
    double tail = j.value("left_tail", 0.0);
    if (j.contains("cell_masses"))
        return with_masses(grid, values, j.at("cell_masses").get<std::vector<double>>(), atoms, tail);
    return RadonMeasure(grid, values, atoms, tail);
}

nlohmann::json RadonMeasure::to_json() const {
    nlohmann::json j;
    j["density"] = {{"grid", grid_}, {"values", density_}};
    j["cell_masses"] = mass_;
    nlohmann::json a = nlohmann::json::array();
    for (const Atom& at : atoms_) a.push_back({at.x, at.mass});
    j["atoms"] = a;
    j["left_tail"] = left_tail_;
    return j;
}

double RadonMeasure::cumulative(double x) const {
    double c = left_tail_;
    if (grid_.size() >= 2 && x > grid_.front()) {
        if (x >= grid_.back()) {
            c = cum_.back();
        } else {
            std::size_t k = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin()) - 1;
            double h = grid_[k + 1] - grid_[k];
            double th = (x - grid_[k]) / h;
            double d0 = density_[k], d1 = density_[k + 1];
            double frac = d0 + d1 > 0 ? (d0 * th + 0.5 * (d1 - d0) * th * th) / (0.5 * (d0 + d1)) : th;
            c = cum_[k] + mass_[k] * frac;
        }
    }
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.x < v; });
    return c + atom_cum_[static_cast<std::size_t>(it - atoms_.begin())];
}

double RadonMeasure::cumulative_closed(double x) const { return cumulative(x) + atom_at(x); }

double RadonMeasure::atom_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.x < v; });
    return (it != atoms_.end() && it->x == x) ? it->mass : 0.0;
}

double RadonMeasure::density_at(double x) const {
    if (grid_.empty() || x < grid_.front() || x > grid_.back()) return 0;
    if (grid_.size() == 1) return density_[0];
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin());
    if (k >= grid_.size()) return density_.back();
    --k;
    double th = (x - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return density_[k] + th * (density_[k + 1] - density_[k]);
}

double RadonMeasure::ac_mass() const { return cum_.empty() ? 0.0 : cum_.back() - left_tail_; }

double RadonMeasure::atom_mass() const { return atom_cum_.back(); }

// ==== MonotoneMap

MonotoneMap::MonotoneMap(std::vector<double> in, std::vector<double> out, double left_slope, double right_slope)
    : in_(std::move(in)), out_(std::move(out)), ls_(left_slope), rs_(right_slope) {
    if (in_.empty() || in_.size() != out_.size()) throw ValidationError("monotone map: need matching non-empty samples");
    for (std::size_t k = 0; k < in_.size(); ++k) {
        if (!std::isfinite(in_[k]) || !std::isfinite(out_[k])) throw ValidationError("monotone map: non-finite sample");
        if (k > 0 && (in_[k] < in_[k - 1] || out_[k] < out_[k - 1]))
            throw ValidationError("monotone map: samples must be nondecreasing");
    }
    if (!(ls_ >= 0) || !(rs_ >= 0)) throw ValidationError("monotone map: slopes must be >= 0");
}

double MonotoneMap::operator()(double x) const {
    if (x < in_.front()) return out_.front() + ls_ * (x - in_.front());
    if (x > in_.back()) return out_.back() + rs_ * (x - in_.back());
    std::size_t k = static_cast<std::size_t>(std::lower_bound(in_.begin(), in_.end(), x) - in_.begin());
    if (in_[k] == x) return out_[k];
    double th = (x - in_[k - 1]) / (in_[k] - in_[k - 1]);
    return out_[k - 1] + th * (out_[k] - out_[k - 1]);
}

double MonotoneMap::generalized_inverse(double y) const {
    std::size_t k = static_cast<std::size_t>(std::lower_bound(out_.begin(), out_.end(), y) - out_.begin());
    if (k == 0) {
        if (ls_ > 0) return in_.front() - (out_.front() - y) / ls_;
        throw DomainError("generalized inverse: value at or below the infimum of the map");
    }
    if (k == out_.size()) {
        if (rs_ > 0) return in_.back() + (y - out_.back()) / rs_;
        throw DomainError("generalized inverse: value above the supremum of the map");
    }
    if (out_[k] == y || in_[k] == in_[k - 1]) return in_[k];
    double th = (y - out_[k - 1]) / (out_[k] - out_[k - 1]);
    return in_[k - 1] + th * (in_[k] - in_[k - 1]);
}

MonotoneMap cumulative_map(const RadonMeasure& m) {
    std::vector<double> pts = m.grid();
    for (const Atom& a : m.atoms()) pts.push_back(a.x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> in, out;
    for (double x : pts) {
        double lo = x + m.cumulative(x);
        in.push_back(x);
        out.push_back(lo);
        double a = m.atom_at(x);
        if (a > 0) {
            in.push_back(x);
            out.push_back(lo + a);
        }
    }
    if (in.empty()) {
        in.push_back(0);
        out.push_back(m.left_tail());
    }
    return MonotoneMap(in, out, 1, 1);
}

RadonMeasure push_forward(const MonotoneMap& f, const std::vector<double>& weights,
                          const std::optional<std::vector<double>>& node_slopes,
                          const std::optional<std::vector<double>>& cell_masses, double left_mass) {
    const auto& in = f.inputs();
    const auto& out = f.outputs();
    const std::size_t n = in.size();
    if (weights.size() != n) throw ValidationError("push_forward: one weight per map sample required");
    for (double w : weights)
        if (!finite_nonneg(w)) throw ValidationError("push_forward: weights must be finite and >= 0");
    if (node_slopes && node_slopes->size() != n) throw ValidationError("push_forward: one slope per sample required");
    std::vector<double> mass(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        mass[k] = cell_masses ? (*cell_masses)[k] : 0.5 * (weights[k] + weights[k + 1]) * (in[k + 1] - in[k]);
        if (!finite_nonneg(mass[k])) throw ValidationError("push_forward: cell masses must be finite and >= 0");
    }
    if (cell_masses && cell_masses->size() + 1 != n) throw ValidationError("push_forward: one mass per cell required");

    auto flat = [&](std::size_t k) {
        if (std::abs(out[k + 1] - out[k]) <= 1e-13 * (1 + std::abs(out[k]))) return true;
        return node_slopes && (*node_slopes)[k] == 0 && (*node_slopes)[k + 1] == 0 && in[k + 1] > in[k];
    };
    auto node_estimate = [&](std::size_t k, double cell_density) {
        if (node_slopes && (*node_slopes)[k] > 0) return weights[k] / (*node_slopes)[k];
        return cell_density;
    };

    std::vector<double> grid, masses;
    std::vector<double> dens_sum, dens_cnt;
    std::vector<Atom> atoms;
    double pending = 0, pending_x = 0;
    auto flush = [&]() {
        if (pending > 0) atoms.push_back({pending_x, pending});
        pending = 0;
    };
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (flat(k)) {
            if (pending == 0) pending_x = grid.empty() ? out[k] : grid.back();
            pending += mass[k];
            continue;
        }
        flush();
        if (grid.empty()) {
            grid.push_back(out[k]);
            dens_sum.push_back(0);
            dens_cnt.push_back(0);
        }
        double a = grid.back(), b = out[k + 1];
        double cd = mass[k] / (b - a);
        dens_sum.back() += node_estimate(k, cd);
        dens_cnt.back() += 1;
        grid.push_back(b);
        masses.push_back(mass[k]);
        dens_sum.push_back(node_estimate(k + 1, cd));
        dens_cnt.push_back(1);
    }
    flush();
    std::vector<double> density(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) density[k] = dens_cnt[k] > 0 ? dens_sum[k] / dens_cnt[k] : 0;
    if (grid.size() == 1) {
        grid.clear();
        density.clear();
    }
    return RadonMeasure::with_masses(grid, density, masses, atoms, left_mass);
}

}  // namespace nvw
