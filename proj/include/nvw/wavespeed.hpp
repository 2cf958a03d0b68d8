#pragma once

#include "json.hpp"
#include <string>
#include <vector>

namespace nvw {

enum class SpeedKind { constant, builtin, tabulated };

/// Wave speed c(u) with certified bounds 1/kappa <= c <= kappa, |c'| <= k1, |c''| <= k2.
class WaveSpeed {
public:
    static WaveSpeed constant(double c0);
    /// c(u) = a + b/(1+u^2), a > 0, b >= 0.
    static WaveSpeed builtin(double a, double b);
    /// Monotone cubic through (u_i, c_i), constant outside the table.
    static WaveSpeed tabulated(std::vector<double> u, std::vector<double> c);
    static WaveSpeed from_json(const nlohmann::json& j);

    /// c = 1.
    WaveSpeed() : params_{1.0} {}

    double eval(double u) const;
    double eval_derivative(double u, int order) const;
    /// c and c' in one call.
    void eval2(double u, double& c, double& c1) const;

    SpeedKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    double kappa() const { return kappa_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }
    std::string describe() const;
    nlohmann::json to_json() const;

private:
    SpeedKind kind_ = SpeedKind::constant;
    std::vector<double> params_;
    double kappa_ = 1, k1_ = 0, k2_ = 0;
    // tabulated: knots, values, Hermite slopes
    std::vector<double> tu_, tc_, tm_;

    int interval(double u) const;
};

}  // namespace nvw
