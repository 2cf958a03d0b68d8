#include "nvw/errors.hpp"
#include "nvw/io.hpp"
#include "nvw/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

namespace nvw {

namespace {

using nlohmann::json;

void write_file(const TaskOptions& opt, const std::string& name, const std::function<void(std::ostream&)>& body) {
    if (opt.out.empty()) return;
    std::filesystem::create_directories(opt.out);
    std::ofstream os(opt.out / name);
    if (!os) throw ConfigError("cannot write " + (opt.out / name).string());
    body(os);
}

std::string slice_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "slice_%03zu.csv", k);
    return buf;
}

json atoms_json(const EulerianState& s) {
    json a = json::array();
    for (const auto& [m, name] : {std::pair{&s.mu, "mu"}, std::pair{&s.nu, "nu"}})
        for (const Atom& at : m->atoms()) a.push_back({{"measure", name}, {"x", at.x}, {"mass", at.mass}});
    return a;
}

double grid_step(const Scenario& sc) {
    auto g = sc.nodes();
    double h = 0;
    for (std::size_t k = 1; k < g.size(); ++k) h = std::max(h, g[k] - g[k - 1]);
    return h;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ==== tasks ====

TaskResult task_solve(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    const EulerianState s0 = sc.initial_state();
    std::vector<double> times = sc.times.empty() ? std::vector<double>{0.0} : sc.times;
    auto slices = evolve_many(s0, times, sc.c, sc.params);
    json rows = json::array();
    const double E0 = total_energy(s0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        rows.push_back({{"t", times[k]},
                        {"nodes", slices[k].size()},
                        {"energy", total_energy(slices[k])},
                        {"atoms", atoms_json(slices[k])},
                        {"file", slice_name(k)}});
        write_file(opt, slice_name(k), [&](std::ostream& os) { write_slice_csv(os, times[k], slices[k]); });
    }
    write_file(opt, "initial.csv", [&](std::ostream& os) { write_slice_csv(os, 0.0, s0); });
    write_file(opt, "atoms.csv", [&](std::ostream& os) {
        write_atoms_csv(os, 0.0, s0, true);
        for (std::size_t k = 0; k < times.size(); ++k) write_atoms_csv(os, times[k], slices[k], false);
    });
    res.report = {{"initial_energy", E0}, {"slices", rows}};
    return res;
}

TaskResult task_verify(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    const auto t0 = std::chrono::steady_clock::now();
    const EulerianState s0 = sc.initial_state();
    const double h = grid_step(sc);
    const json& ex = sc.expect;
    Report rep;
    rep.merge(validate(s0, sc.c), "initial.");
    PsiPair psi = map_L(s0, sc.c, sc.params.n_atom);
    rep.merge(check_F(psi, sc.c), "F.");
    CurveData cv = map_C(psi, sc.c);
    rep.merge(check_G(cv, sc.c), "G.");
    const double field_tol = ex.value("roundtrip_factor", 50.0) * h * h;
    rep.merge(roundtrip_check(s0, sc.c, field_tol, ex.value("cumulative_tol", 1e-8), sc.params.n_atom));

    json out;
    if (ex.contains("atoms")) {
        // atoms expected after M(L(data))
        EulerianState back = map_M(psi, sc.c);
        out["roundtrip_atoms"] = atoms_json(back);
        for (const auto& a : ex.at("atoms")) {
            const std::string which = a.at("measure").get<std::string>();
            const RadonMeasure& m = which == "mu" ? back.mu : back.nu;
            double x = a.at("x").get<double>(), mass = a.at("mass").get<double>();
            rep.add("expected_atom_" + which + "_at_" + fmt_double(x), std::abs(m.atom_at(x) - mass),
                    a.value("tol", 1e-9));
        }
    }
    if (!sc.times.empty()) {
        const double E0 = total_energy(s0);
        auto slices = evolve_many(s0, sc.times, sc.c, sc.params);
        double drift = 0;
        bool finite = true;
        json rows = json::array();
        for (std::size_t k = 0; k < slices.size(); ++k) {
            double E = total_energy(slices[k]);
            drift = std::max(drift, E0 > 0 ? std::abs(E - E0) / E0 : std::abs(E));
            for (double v : slices[k].u) finite = finite && std::isfinite(v);
            rows.push_back({{"t", sc.times[k]}, {"energy", E}, {"atoms", atoms_json(slices[k])}});
            write_file(opt, slice_name(k), [&](std::ostream& os) { write_slice_csv(os, sc.times[k], slices[k]); });
        }
        out["slices"] = rows;
        rep.add("energy_drift", drift, ex.value("drift", 1e-6));
        rep.add_flag("slices_finite", finite);
        if (ex.value("check_H", true)) {
            // relations of H on the unpadded lattice of the data
            GridSolution sol = tile_solve(cv, sc.c, sc.params.solver);
            Report hr = check_H(sol, sc.c);
            for (Check& c : hr.checks)
                if (c.name.rfind("xX", 0) == 0 || c.name.rfind("xY", 0) == 0 || c.name.rfind("JX", 0) == 0 ||
                    c.name.rfind("JY", 0) == 0 || c.name.rfind("energy", 0) == 0) {
                    c.tolerance = ex.value("relation_tol", 1e-6);
                    c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
                }
            rep.merge(hr, "H.");
        }
    }
    out["checks"] = rep.to_json();
    out["seconds"] = seconds_since(t0);
    if (opt.dump_lagrangian) write_file(opt, "psi.csv", [&](std::ostream& os) { write_psi_csv(psi, os); });
    res.ok = rep.ok();
    res.report = out;
    return res;
}

TaskResult task_conservation(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    const EulerianState s0 = sc.initial_state();
    std::vector<double> times = sc.times.empty() ? std::vector<double>{0.0} : sc.times;
    ConservationReport cr = conservation_series(s0, times, sc.c, sc.params);
    write_file(opt, "conservation.csv", [&](std::ostream& os) { cr.write_csv(os); });
    const double tol = sc.expect.value("drift", 1e-6);
    res.ok = cr.drift <= tol;
    res.report = cr.to_json();
    res.report["initial_energy"] = total_energy(s0);
    res.report["drift_tol"] = tol;
    return res;
}

TaskResult task_convergence(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    static const char* names[6] = {"xX_c_tX", "xY_c_tY", "JX_c_KX", "JY_c_KY", "energy_X", "energy_Y"};
    const double ratio_min = sc.expect.value("convergence_ratio", 3.0);
    const double floor = sc.expect.value("residual_floor", 1e-11);
    json levels = json::array();
    std::vector<std::array<double, 6>> resid;
    for (int l = 0; l < sc.levels; ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        const int n = (sc.grid - 1) * (1 << l) + 1;
        Scenario s = sc.with_grid(n);
        CurveData cv = map_C(map_L(s.initial_state(), s.c, s.params.n_atom), s.c);
        GridSolution sol = tile_solve(cv, s.c, s.params.solver);
        Report hr = check_H(sol, s.c);
        std::array<double, 6> r{};
        json row = {{"grid", n}, {"h", grid_step(s)}, {"lattice", sol.size()}};
        for (int k = 0; k < 6; ++k) {
            r[k] = hr.find(names[k])->residual;
            row[names[k]] = r[k];
        }
        if (!resid.empty()) {
            json ratios;
            for (int k = 0; k < 6; ++k) {
                double prev = resid.back()[k];
                double q = r[k] > 0 ? prev / r[k] : INFINITY;
                ratios[names[k]] = std::isfinite(q) ? json(q) : json(nullptr);
                if (prev > floor && !(q >= ratio_min)) res.ok = false;
            }
            row["ratios"] = ratios;
        }
        row["seconds"] = seconds_since(t0);
        resid.push_back(r);
        levels.push_back(row);
    }
    write_file(opt, "convergence.csv", [&](std::ostream& os) {
        os << "grid,h";
        for (const char* n : names) os << ',' << n;
        os << '\n';
        for (const auto& row : levels) {
            os << row["grid"].get<int>() << ',' << fmt_double(row["h"].get<double>());
            for (const char* n : names) os << ',' << fmt_double(row[n].get<double>());
            os << '\n';
        }
    });
    res.report = {{"levels", levels}, {"ratio_min", ratio_min}, {"residual_floor", floor}};
    return res;
}

TaskResult task_regularization(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    const EulerianState s0 = sc.initial_state();
    RegularizationReport rr = regularization_check(s0, sc.tau, sc.c, sc.params);
    EulerianState s = evolve(s0, sc.tau, sc.c, sc.params);
    write_file(opt, slice_name(0), [&](std::ostream& os) { write_slice_csv(os, sc.tau, s); });
    res.ok = rr.pass();
    res.report = rr.to_json();
    return res;
}

TaskResult task_approximation(const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    const EulerianState s0 = sc.initial_state();
    std::vector<double> eps = sc.epsilons.empty() ? std::vector<double>{0.2, 0.1, 0.05} : sc.epsilons;
    ApproximationReport ar = approximation_study(s0, eps, sc.tau, sc.c, sc.params);
    write_file(opt, "approximation.csv", [&](std::ostream& os) { ar.write_csv(os); });
    // non-monotone columns are reported, not fatal
    res.report = ar.to_json();
    return res;
}

}  // namespace

TaskResult run_task(const std::string& task, const Scenario& sc, const TaskOptions& opt) {
    TaskResult res;
    if (task == "solve") res = task_solve(sc, opt);
    else if (task == "verify") res = task_verify(sc, opt);
    else if (task == "conservation") res = task_conservation(sc, opt);
    else if (task == "convergence") res = task_convergence(sc, opt);
    else if (task == "regularization") res = task_regularization(sc, opt);
    else if (task == "approximation") res = task_approximation(sc, opt);
    else throw UsageError("unknown task '" + task + "'");
    if (opt.dump_lagrangian && task != "verify")
        write_file(opt, "psi.csv", [&](std::ostream& os) {
            write_psi_csv(map_L(sc.initial_state(), sc.c, sc.params.n_atom), os);
        });
    res.report["task"] = task;
    res.report["scenario"] = sc.name;
    res.report["ok"] = res.ok;
    res.report["wavespeed"] = sc.c.to_json();
    write_file(opt, "report.json", [&](std::ostream& os) { os << res.report.dump(2) << '\n'; });
    return res;
}

}  // namespace nvw
