#pragma once

#include <stdexcept>
#include <string>

namespace nvw {

/// Base class for all library errors. `kind()` is a short machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error("usage", m) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error("parse", m) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain", m) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error("validation", m) {}
};
struct CompatibilityError : Error {
    explicit CompatibilityError(const std::string& m) : Error("compatibility", m) {}
};
struct DegeneracyError : Error {
    explicit DegeneracyError(const std::string& m) : Error("degeneracy", m) {}
};
struct NonContraction : Error {
    explicit NonContraction(const std::string& m) : Error("non_contraction", m) {}
};
struct TilingError : Error {
    explicit TilingError(const std::string& m) : Error("tiling", m) {}
};
struct ResourceError : Error {
    explicit ResourceError(const std::string& m) : Error("resource", m) {}
};
struct CoverageError : Error {
    explicit CoverageError(const std::string& m) : Error("coverage", m) {}
};
struct NotApplicable : Error {
    explicit NotApplicable(const std::string& m) : Error("not_applicable", m) {}
};

}  // namespace nvw
