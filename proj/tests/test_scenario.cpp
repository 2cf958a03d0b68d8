#include "nvw/errors.hpp"
#include "nvw/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace nvw;
using nlohmann::json;

namespace {

#ifndef NVW_SCENARIO_DIR
#define NVW_SCENARIO_DIR "scenarios"
#endif

json minimal() {
    return json::parse(R"J({"wavespeed": {"kind": "constant", "params": [1]}, "domain": [-1, 1], "grid": 11,
                           "initial": {"u": "0.1*exp(-x^2)"}})J");
}

}  // namespace

TEST(Scenario, ParsesExpressionsAndDefaults) {
    Scenario s = parse_scenario(minimal());
    EXPECT_EQ(s.grid, 11);
    EXPECT_EQ(s.task, "solve");
    EulerianState st = s.initial_state();
    ASSERT_EQ(st.size(), 11u);
    // u_x comes from the symbolic derivative, u_t defaults to zero so R = -S
    for (std::size_t k = 0; k < st.size(); ++k) EXPECT_NEAR(st.R[k], -st.S[k], 1e-15);
    EXPECT_NEAR(st.R[3], -0.2 * st.grid[3] * std::exp(-st.grid[3] * st.grid[3]), 1e-15);
}

TEST(Scenario, ArrayFieldsAndExplicitGrid) {
    json j = minimal();
    j.erase("domain");
    j.erase("grid");
    j["x"] = {-1, -0.5, 0, 0.5, 1};
    j["initial"] = {{"u", {0, 0, 0, 0, 0}}, {"rho", 1.0}, {"sigma", {1, 1, 1, 1, 1}}};
    j["mu_atoms"] = json::array({json::array({0, "pi/4"})});
    Scenario s = parse_scenario(j);
    EulerianState st = s.initial_state();
    EXPECT_NEAR(st.mu.atom_at(0), std::atan(1.0), 1e-15);
    EXPECT_NEAR(st.mu.ac_mass(), 0.25 * 2, 1e-12);
    EXPECT_THROW(s.with_grid(21), ConfigError);
}

TEST(Scenario, RejectsUnknownKeysAndBadValues) {
    json a = minimal();
    a["grdi"] = 3;
    EXPECT_THROW(parse_scenario(a), ConfigError);
    json b = minimal();
    b["initial"]["v"] = "x";
    EXPECT_THROW(parse_scenario(b), ConfigError);
    json c = minimal();
    c["solver"] = {{"order", 3}};
    EXPECT_THROW(parse_scenario(c), ConfigError);
    json d = minimal();
    d["initial"]["u"] = "sin(";
    EXPECT_THROW(parse_scenario(d), ParseError);
    json e = minimal();
    e["initial"]["rho"] = {1, 2};
    EXPECT_THROW(parse_scenario(e), ConfigError);
    json f = minimal();
    f.erase("wavespeed");
    EXPECT_THROW(parse_scenario(f), ConfigError);
    json g = minimal();
    g["initial"]["R"] = 0;
    EXPECT_THROW(parse_scenario(g), ConfigError);
    json h = minimal();
    h["domain"] = {1, -1};
    EXPECT_THROW(parse_scenario(h), ConfigError);
}

TEST(Scenario, ExitCodesAndRecords) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
    EXPECT_EQ(exit_code_for(ParseError("x")), 2);
    EXPECT_EQ(exit_code_for(CompatibilityError("x")), 2);
    EXPECT_EQ(exit_code_for(NotApplicable("x")), 2);
    EXPECT_EQ(exit_code_for(NonContraction("x")), 3);
    EXPECT_EQ(exit_code_for(ResourceError("x")), 3);
    EXPECT_EQ(exit_code_for(CoverageError("x")), 3);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 3);
    json r = error_record(NonContraction("slow"));
    EXPECT_EQ(r["error"], "non_contraction");
    EXPECT_EQ(r["message"], "slow");
    EXPECT_EQ(r["exit_code"], 3);
}

TEST(Scenario, BundledScenariosRunTheirTasks) {
    auto files = list_scenarios(NVW_SCENARIO_DIR);
    ASSERT_GE(files.size(), 6u);
    for (const auto& f : files) {
        Scenario s = load_scenario(f);
        EXPECT_FALSE(s.description.empty()) << f;
        TaskResult r = run_task(s.task, s, {});
        EXPECT_TRUE(r.ok) << f << '\n' << r.report.dump(1);
        EXPECT_EQ(r.report["task"], s.task);
    }
}

TEST(Scenario, TasksWriteTheirFiles) {
    namespace fs = std::filesystem;
    const fs::path out = fs::temp_directory_path() / "nvw_scenario_test";
    fs::remove_all(out);
    Scenario s = load_scenario(fs::path(NVW_SCENARIO_DIR) / "zero.json");
    TaskResult r = run_task("solve", s, {out, true});
    EXPECT_TRUE(r.ok);
    for (const char* f : {"report.json", "initial.csv", "atoms.csv", "slice_000.csv", "slice_002.csv", "psi.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    std::ifstream in(out / "report.json");
    json rep = json::parse(in);
    EXPECT_EQ(rep["scenario"], "zero");
    EXPECT_THROW(run_task("frobnicate", s, {}), UsageError);
    fs::remove_all(out);
}
