/// nvw <task> --scenario FILE --out DIR [--tol X] [--grid N] [--levels K] [--dump-lagrangian]

#include "nvw/errors.hpp"
#include "nvw/scenario.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

#ifndef NVW_SCENARIO_DIR
#define NVW_SCENARIO_DIR "scenarios"
#endif

/// A path as given, or a bundled scenario name.
fs::path resolve_scenario(const std::string& arg, const fs::path& dir) {
    fs::path p(arg);
    if (fs::exists(p)) return p;
    fs::path named = dir / (arg + ".json");
    if (fs::exists(named)) return named;
    throw nvw::ConfigError("scenario not found: " + arg);
}

void write_error(const nlohmann::json& rec, const fs::path& out) {
    std::cerr << rec.dump() << '\n';
    if (out.empty()) return;
    std::error_code ec;
    fs::create_directories(out, ec);
    std::ofstream os(out / "error.json");
    if (os) os << rec.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conservative solutions of the nonlinear variational wave system"};
    std::string task, scenario, out;
    std::string dir = NVW_SCENARIO_DIR;
    double tol = 0;
    int grid = 0, levels = 0;
    bool dump = false;
    app.add_option("task", task, "solve, verify, conservation, convergence, regularization, approximation, run, list")
        ->required()
        ->check(CLI::IsMember({"solve", "verify", "conservation", "convergence", "regularization", "approximation",
                               "run", "list"}));
    app.add_option("--scenario", scenario, "scenario file or bundled scenario name");
    app.add_option("--out", out, "output directory");
    app.add_option("--tol", tol, "Picard tolerance")->check(CLI::PositiveNumber);
    app.add_option("--grid", grid, "number of grid nodes")->check(CLI::Range(3, 1 << 22));
    app.add_option("--levels", levels, "refinement levels for convergence")->check(CLI::Range(2, 12));
    app.add_flag("--dump-lagrangian", dump, "write the Lagrangian data as psi.csv");
    app.add_option("--dir", dir, "directory of bundled scenarios");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        if (rc == 0) return 0;
        write_error({{"error", "usage"}, {"message", e.what()}, {"exit_code", 2}}, {});
        return 2;
    }

    try {
        if (task == "list") {
            for (const auto& p : nvw::list_scenarios(dir)) {
                nvw::Scenario s = nvw::load_scenario(p);
                std::cout << s.name << '\t' << s.task << '\t' << s.description << '\n';
            }
            return 0;
        }
        if (scenario.empty()) throw nvw::UsageError("--scenario is required for task " + task);
        nvw::Scenario sc = nvw::load_scenario(resolve_scenario(scenario, dir));
        if (grid > 0) sc = sc.with_grid(grid);
        if (tol > 0) sc.params.solver.tol = tol;
        if (levels > 0) sc.levels = levels;
        nvw::TaskOptions opt;
        opt.out = out;
        opt.dump_lagrangian = dump;
        const std::string t = task == "run" ? sc.task : task;
        nvw::TaskResult res = nvw::run_task(t, sc, opt);
        std::cout << res.report.dump(2) << '\n';
        if (!res.ok) {
            write_error({{"error", "invariant"}, {"message", t + " reported a failed invariant"}, {"exit_code", 1}}, out);
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        nlohmann::json rec = nvw::error_record(e);
        write_error(rec, out);
        return rec["exit_code"].get<int>();
    }
}
