#pragma once

#include "nvw/diagnostics.hpp"
#include "nvw/expr.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nvw {

/// An initial field given by an expression in x or by samples on the scenario grid.
struct FieldSpec {
    std::optional<Expr> expr;
    std::vector<double> values;
    bool present() const { return expr.has_value() || !values.empty(); }
};

struct Scenario {
    std::string name, description, task = "solve";
    WaveSpeed c;
    double xl = -1, xr = 1;
    int grid = 101;
    std::vector<double> x;  ///< explicit grid, overrides xl, xr, grid
    FieldSpec u, ut, ux, R, S, rho, sigma;
    std::vector<Atom> mu_atoms, nu_atoms;
    double mu_tail = 0, nu_tail = 0;
    EvolveParams params;
    std::vector<double> times;
    double tau = 0;
    std::vector<double> epsilons;
    int levels = 3;
    nlohmann::json expect = nlohmann::json::object();

    /// Grid nodes: explicit samples or a uniform grid of `grid` nodes on [xl, xr].
    std::vector<double> nodes() const;
    /// The initial Eulerian state. R and S given directly take precedence over ut and ux.
    EulerianState initial_state() const;
    /// The same scenario on a uniform grid with n nodes. Throws ConfigError for sampled fields.
    Scenario with_grid(int n) const;
};

/// Parses a scenario document. Throws ParseError or ConfigError.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& file);

/// Scenario files (*.json) in a directory, sorted by name.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

// ==== tasks ====

struct TaskOptions {
    std::filesystem::path out;  ///< output directory, created if missing; empty for no files
    bool dump_lagrangian = false;
};

/// Outcome of one task: the report document and whether every asserted invariant held.
struct TaskResult {
    nlohmann::json report;
    bool ok = true;
};

/// Tasks: solve, verify, conservation, convergence, regularization, approximation.
/// Solver failures propagate as exceptions.
TaskResult run_task(const std::string& task, const Scenario& sc, const TaskOptions& opt);

/// Exit status for an exception: 2 for input errors, 3 for solver errors, 1 otherwise.
int exit_code_for(const std::exception& e);
/// {"error": kind, "message": text, "exit_code": code}.
nlohmann::json error_record(const std::exception& e);

}  // namespace nvw
