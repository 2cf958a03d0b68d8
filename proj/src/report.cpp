#include "nvw/report.hpp"

#include <cmath>
#include <sstream>

namespace nvw {

void Report::add(std::string name, double residual, double tolerance, std::string where) {
    Check c;
    c.name = std::move(name);
    c.residual = residual;
    c.tolerance = tolerance;
    c.pass = std::isfinite(residual) && residual <= tolerance;
    c.where = std::move(where);
    checks.push_back(std::move(c));
}

void Report::add_flag(std::string name, bool pass, std::string where) {
    Check c;
    c.name = std::move(name);
    c.pass = pass;
    c.residual = pass ? 0 : 1;
    c.where = std::move(where);
    checks.push_back(std::move(c));
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (Check c : other.checks) {
        c.name = prefix + c.name;
        checks.push_back(std::move(c));
    }
}

bool Report::ok() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

const Check* Report::find(const std::string& name) const {
    for (const Check& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::json Report::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Check& c : checks) {
        nlohmann::json j = {{"name", c.name}, {"pass", c.pass}, {"tolerance", c.tolerance}, {"where", c.where}};
        j["residual"] = std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json(nullptr);
        arr.push_back(std::move(j));
    }
    return {{"ok", ok()}, {"checks", arr}};
}

std::string Report::summary() const {
    std::ostringstream os;
    for (const Check& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << " residual=" << c.residual << " tol=" << c.tolerance;
        if (!c.where.empty()) os << " at " << c.where;
        os << "\n";
    }
    return os.str();
}

}  // namespace nvw
