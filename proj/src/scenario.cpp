#include "nvw/scenario.hpp"

#include "nvw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nvw {

namespace {

using nlohmann::json;

FieldSpec parse_field(const json& j, const std::string& key) {
    FieldSpec f;
    if (j.is_string()) f.expr = Expr::parse(j.get<std::string>());
    else if (j.is_number()) f.expr = Expr::constant(j.get<double>());
    else if (j.is_array()) f.values = j.get<std::vector<double>>();
    else throw ConfigError("initial." + key + ": expected an expression, a number or an array");
    return f;
}

double parse_scalar(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return Expr::parse(j.get<std::string>())(0.0);
    throw ConfigError(key + ": expected a number or a constant expression");
}

std::vector<Atom> parse_atoms(const json& j, const std::string& key) {
    std::vector<Atom> out;
    if (!j.is_array()) throw ConfigError(key + ": expected a list of [x, mass] pairs");
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2) throw ConfigError(key + ": expected [x, mass] pairs");
        out.push_back({parse_scalar(a[0], key), parse_scalar(a[1], key)});
    }
    return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

std::vector<double> sample(const FieldSpec& f, const std::vector<double>& x, const std::string& name) {
    if (f.expr) {
        std::vector<double> v(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            v[k] = (*f.expr)(x[k]);
            if (!std::isfinite(v[k])) throw ConfigError("initial." + name + " is not finite at x=" + std::to_string(x[k]));
        }
        return v;
    }
    if (f.values.empty()) return std::vector<double>(x.size(), 0.0);
    if (f.values.size() != x.size())
        throw ConfigError("initial." + name + ": " + std::to_string(f.values.size()) + " samples for " +
                          std::to_string(x.size()) + " grid nodes");
    return f.values;
}

/// Second-order differences, one-sided at the ends.
std::vector<double> differentiate(const std::vector<double>& x, const std::vector<double>& f) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        if (n == 2) d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
        return d;
    }
    auto three = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
        // derivative at `at` of the parabola through three nodes
        double xa = x[a], xb = x[b], xc = x[c];
        return f[a] * (2 * at - xb - xc) / ((xa - xb) * (xa - xc)) + f[b] * (2 * at - xa - xc) / ((xb - xa) * (xb - xc)) +
               f[c] * (2 * at - xa - xb) / ((xc - xa) * (xc - xb));
    };
    d[0] = three(0, 1, 2, x[0]);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = three(k - 1, k, k + 1, x[k]);
    d[n - 1] = three(n - 3, n - 2, n - 1, x[n - 1]);
    return d;
}

}  // namespace

std::vector<double> Scenario::nodes() const {
    if (!x.empty()) return x;
    std::vector<double> g(grid);
    for (int k = 0; k < grid; ++k) g[k] = k == grid - 1 ? xr : xl + (xr - xl) * k / (grid - 1);
    return g;
}

EulerianState Scenario::initial_state() const {
    const std::vector<double> g = nodes();
    std::vector<double> uu = sample(u, g, "u"), rr = sample(rho, g, "rho"), ss = sample(sigma, g, "sigma");
    if (R.present() || S.present()) {
        return from_riemann(g, uu, sample(R, g, "R"), sample(S, g, "S"), rr, ss, mu_atoms, nu_atoms, c, mu_tail,
                            nu_tail);
    }
    std::vector<double> dx;
    if (ux.present()) dx = sample(ux, g, "ux");
    else if (u.expr) dx = sample(FieldSpec{u.expr->derivative(), {}}, g, "ux");
    else dx = differentiate(g, uu);
    EulerianState s = from_primitives(g, uu, sample(ut, g, "ut"), dx, rr, ss, mu_atoms, nu_atoms, c);
    if (mu_tail != 0 || nu_tail != 0)
        s = from_riemann(g, s.u, s.R, s.S, s.rho, s.sigma, mu_atoms, nu_atoms, c, mu_tail, nu_tail);
    return s;
}

Scenario Scenario::with_grid(int n) const {
    if (n < 3) throw ConfigError("grid must have at least 3 nodes");
    if (!x.empty()) throw ConfigError("grid override needs a uniform scenario grid");
    for (const FieldSpec* f : {&u, &ut, &ux, &R, &S, &rho, &sigma})
        if (!f->values.empty()) throw ConfigError("grid override needs fields given as expressions");
    Scenario s = *this;
    s.grid = n;
    return s;
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    check_keys(j,
               {"name", "description", "task", "wavespeed", "domain", "grid", "x", "initial", "mu_atoms", "nu_atoms",
                "mu_tail", "nu_tail", "solver", "times", "tau", "epsilons", "levels", "expect"},
               "scenario");
    Scenario s;
    try {
        s.name = j.value("name", std::string("unnamed"));
        s.description = j.value("description", std::string());
        s.task = j.value("task", std::string("solve"));
        if (!j.contains("wavespeed")) throw ConfigError("scenario: missing 'wavespeed'");
        s.c = WaveSpeed::from_json(j);
        if (j.contains("x")) {
            s.x = j.at("x").get<std::vector<double>>();
            if (s.x.size() < 3) throw ConfigError("scenario: explicit grid needs at least 3 nodes");
            for (std::size_t k = 1; k < s.x.size(); ++k)
                if (!(s.x[k] > s.x[k - 1])) throw ConfigError("scenario: explicit grid must increase");
            s.xl = s.x.front();
            s.xr = s.x.back();
            s.grid = static_cast<int>(s.x.size());
        } else {
            if (!j.contains("domain")) throw ConfigError("scenario: missing 'domain' or 'x'");
            auto d = j.at("domain").get<std::vector<double>>();
            if (d.size() != 2 || !(d[1] > d[0])) throw ConfigError("scenario: domain must be [x_l, x_r] with x_l < x_r");
            s.xl = d[0];
            s.xr = d[1];
            s.grid = j.value("grid", 101);
            if (s.grid < 3) throw ConfigError("scenario: grid must have at least 3 nodes");
        }
        const json init = j.value("initial", json::object());
        check_keys(init, {"u", "ut", "ux", "R", "S", "rho", "sigma"}, "initial");
        std::pair<const char*, FieldSpec*> fields[] = {{"u", &s.u},     {"ut", &s.ut},   {"ux", &s.ux},
                                                       {"R", &s.R},     {"S", &s.S},     {"rho", &s.rho},
                                                       {"sigma", &s.sigma}};
        for (auto& [k, f] : fields)
            if (init.contains(k)) *f = parse_field(init.at(k), k);
        if (s.R.present() != s.S.present()) throw ConfigError("initial: R and S must be given together");
        if (s.R.present() && (s.ut.present() || s.ux.present()))
            throw ConfigError("initial: give either R and S or ut and ux");
        if (j.contains("mu_atoms")) s.mu_atoms = parse_atoms(j.at("mu_atoms"), "mu_atoms");
        if (j.contains("nu_atoms")) s.nu_atoms = parse_atoms(j.at("nu_atoms"), "nu_atoms");
        if (j.contains("mu_tail")) s.mu_tail = parse_scalar(j.at("mu_tail"), "mu_tail");
        if (j.contains("nu_tail")) s.nu_tail = parse_scalar(j.at("nu_tail"), "nu_tail");
        if (j.contains("solver")) {
            const json& p = j.at("solver");
            check_keys(p, {"tol", "max_iter", "cell_ds", "max_refine", "cell_budget", "threads", "order", "n_atom", "margin"},
                       "solver");
            auto& sp = s.params.solver;
            sp.tol = p.value("tol", sp.tol);
            sp.max_iter = p.value("max_iter", sp.max_iter);
            sp.cell_ds = p.value("cell_ds", sp.cell_ds);
            sp.max_refine = p.value("max_refine", sp.max_refine);
            sp.cell_budget = p.value("cell_budget", sp.cell_budget);
            sp.threads = p.value("threads", sp.threads);
            sp.order = p.value("order", sp.order);
            s.params.n_atom = p.value("n_atom", s.params.n_atom);
            s.params.margin = p.value("margin", s.params.margin);
            if (!(sp.tol > 0) || sp.max_iter < 1 || !(sp.cell_ds > 0) || sp.max_refine < 0 || sp.cell_budget < 1 ||
                sp.threads < 0 || (sp.order != 2 && sp.order != 4) || s.params.n_atom < 1 || !(s.params.margin >= 0))
                throw ConfigError("solver: parameters must be positive (order 2 or 4)");
        }
        s.times = j.value("times", std::vector<double>{});
        for (double t : s.times)
            if (!std::isfinite(t)) throw ConfigError("times must be finite");
        s.tau = j.value("tau", 0.0);
        s.epsilons = j.value("epsilons", std::vector<double>{});
        s.levels = j.value("levels", 3);
        if (s.levels < 2) throw ConfigError("levels must be at least 2");
        s.expect = j.value("expect", json::object());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    // every referenced expression must evaluate on the grid
    (void)s.initial_state();
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open scenario file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
    Scenario s = parse_scenario(j);
    if (s.name == "unnamed") s.name = file.stem().string();
    return s;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        static const std::set<std::string> solver = {"non_contraction", "resource", "coverage", "tiling", "degeneracy"};
        return solver.count(err->kind()) ? 3 : 2;
    }
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
    return 3;
}

nlohmann::json error_record(const std::exception& e) {
    std::string kind = "internal";
    if (const auto* err = dynamic_cast<const Error*>(&e)) kind = err->kind();
    else if (dynamic_cast<const nlohmann::json::exception*>(&e)) kind = "parse";
    return {{"error", kind}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
}

}  // namespace nvw
