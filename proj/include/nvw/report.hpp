#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace nvw {

/// One named invariant with its worst residual and where it occurred.
struct Check {
    std::string name;
    bool pass = true;
    double residual = 0;
    double tolerance = 0;
    std::string where;
};

struct Report {
    std::vector<Check> checks;

    void add(std::string name, double residual, double tolerance, std::string where = {});
    /// Record a check with an explicit verdict.
    void add_flag(std::string name, bool pass, std::string where = {});
    void merge(const Report& other, const std::string& prefix = {});
    bool ok() const;
    const Check* find(const std::string& name) const;
    nlohmann::json to_json() const;
    std::string summary() const;
};

}  // namespace nvw
