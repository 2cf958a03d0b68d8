#include "nvw/wavespeed.hpp"

#include "nvw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvw {

WaveSpeed WaveSpeed::constant(double c0) {
    if (!(c0 > 0) || !std::isfinite(c0)) throw ConfigError("constant wave speed must be positive");
    WaveSpeed w;
    w.kind_ = SpeedKind::constant;
    w.params_ = {c0};
    w.kappa_ = std::max(c0, 1.0 / c0);
    w.k1_ = 0;
    w.k2_ = 0;
    return w;
}

WaveSpeed WaveSpeed::builtin(double a, double b) {
    if (!(a > 0) || !(b >= 0) || !std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("builtin wave speed needs a > 0 and b >= 0");
    WaveSpeed w;
    w.kind_ = SpeedKind::builtin;
    w.params_ = {a, b};
    w.kappa_ = std::max({a + b, 1.0 / a, 1.0});
    // max |2u/(1+u^2)^2| at u^2 = 1/3; max |(6u^2-2)/(1+u^2)^3| at u = 0
    w.k1_ = b * 3.0 * std::sqrt(3.0) / 8.0;
    w.k2_ = 2.0 * b;
    return w;
}

WaveSpeed WaveSpeed::tabulated(std::vector<double> u, std::vector<double> c) {
    const std::size_t n = u.size();
    if (n < 2 || c.size() != n) throw ConfigError("tabulated wave speed needs >= 2 matching samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(u[i]) || !std::isfinite(c[i]) || !(c[i] > 0))
            throw ConfigError("tabulated wave speed values must be finite and positive");
        if (i > 0 && !(u[i] > u[i - 1])) throw ConfigError("tabulated wave speed knots must increase");
    }
    WaveSpeed w;
    w.kind_ = SpeedKind::tabulated;
    w.params_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        w.params_.push_back(u[i]);
        w.params_.push_back(c[i]);
    }
    // Fritsch-Carlson slopes; zero end slopes keep c in C^1 with the constant extension.
    std::vector<double> d(n - 1), m(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (c[i + 1] - c[i]) / (u[i + 1] - u[i]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0) {
            m[i] = 0;
        } else {
            double h0 = u[i] - u[i - 1], h1 = u[i + 1] - u[i];
            double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    w.tu_ = std::move(u);
    w.tc_ = std::move(c);
    w.tm_ = std::move(m);

    // The weighted harmonic slopes keep every piece monotone, so the knots bound c.
    // On a piece c' is quadratic and c'' linear in the local coordinate.
    double cmin = *std::min_element(w.tc_.begin(), w.tc_.end());
    double cmax = *std::max_element(w.tc_.begin(), w.tc_.end());
    double k1 = 0, k2 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = w.tu_[i + 1] - w.tu_[i];
        double a0 = w.tc_[i], a1 = w.tc_[i + 1], m0 = w.tm_[i] * h, m1 = w.tm_[i + 1] * h;
        double e0 = -6 * a0 - 4 * m0 + 6 * a1 - 2 * m1;
        double e1 = 6 * a0 + 2 * m0 - 6 * a1 + 4 * m1;
        k2 = std::max({k2, std::abs(e0) / (h * h), std::abs(e1) / (h * h)});
        k1 = std::max({k1, std::abs(w.tm_[i]), std::abs(w.tm_[i + 1])});
        double A = 6 * a0 + 3 * m0 - 6 * a1 + 3 * m1;
        if (A != 0) {
            double t = -e0 / (2 * A);
            if (t > 0 && t < 1) k1 = std::max(k1, std::abs(w.eval_derivative(w.tu_[i] + t * h, 1)));
        }
    }
    w.kappa_ = 1.01 * std::max({cmax, 1.0 / cmin, 1.0});
    w.k1_ = 1.01 * k1;
    w.k2_ = 1.01 * k2;
    return w;
}

WaveSpeed WaveSpeed::from_json(const nlohmann::json& j) {
    const auto& ws = j.contains("wavespeed") ? j.at("wavespeed") : j;
    if (!ws.is_object() || !ws.contains("kind")) throw ConfigError("wavespeed: missing 'kind'");
    std::string kind = ws.at("kind").get<std::string>();
    std::vector<double> p;
    if (ws.contains("params")) p = ws.at("params").get<std::vector<double>>();
    if (kind == "constant") {
        if (p.size() != 1) throw ConfigError("wavespeed constant: params must be [c0]");
        return constant(p[0]);
    }
    if (kind == "builtin" || kind == "builtin-smooth") {
        if (p.size() != 2) throw ConfigError("wavespeed builtin: params must be [a, b]");
        return builtin(p[0], p[1]);
    }
    if (kind == "tabulated") {
        if (p.size() < 4 || p.size() % 2 != 0)
            throw ConfigError("wavespeed tabulated: params must be [u0, c0, u1, c1, ...]");
        std::vector<double> u, c;
        for (std::size_t i = 0; i < p.size(); i += 2) {
            u.push_back(p[i]);
            c.push_back(p[i + 1]);
        }
        return tabulated(u, c);
    }
    throw ConfigError("wavespeed: unknown kind '" + kind + "'");
}

int WaveSpeed::interval(double u) const {
    auto it = std::upper_bound(tu_.begin(), tu_.end(), u);
    int i = static_cast<int>(it - tu_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(tu_.size()) - 2);
}

double WaveSpeed::eval(double u) const {
    switch (kind_) {
    case SpeedKind::constant:
        return params_[0];
    case SpeedKind::builtin:
        return params_[0] + params_[1] / (1.0 + u * u);
    case SpeedKind::tabulated: {
        if (u <= tu_.front()) return tc_.front();
        if (u >= tu_.back()) return tc_.back();
        int i = interval(u);
        double h = tu_[i + 1] - tu_[i];
        double t = (u - tu_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * tc_[i] + (t3 - 2 * t2 + t) * h * tm_[i] +
               (-2 * t3 + 3 * t2) * tc_[i + 1] + (t3 - t2) * h * tm_[i + 1];
    }
    }
    return 0;
}

double WaveSpeed::eval_derivative(double u, int order) const {
    if (order != 1 && order != 2) throw UsageError("eval_derivative: order must be 1 or 2");
    switch (kind_) {
    case SpeedKind::constant:
        return 0;
    case SpeedKind::builtin: {
        double b = params_[1], q = 1.0 + u * u;
        if (order == 1) return -2.0 * b * u / (q * q);
        return b * (6.0 * u * u - 2.0) / (q * q * q);
    }
    case SpeedKind::tabulated: {
        if (u <= tu_.front() || u >= tu_.back()) return 0;
        int i = interval(u);
        double h = tu_[i + 1] - tu_[i];
        double t = (u - tu_[i]) / h;
        double t2 = t * t;
        double a0 = tc_[i], a1 = tc_[i + 1], m0 = tm_[i] * h, m1 = tm_[i + 1] * h;
        if (order == 1)
            return ((6 * t2 - 6 * t) * a0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * a1 +
                    (3 * t2 - 2 * t) * m1) /
                   h;
        return ((12 * t - 6) * a0 + (6 * t - 4) * m0 + (-12 * t + 6) * a1 + (6 * t - 2) * m1) / (h * h);
    }
    }
    return 0;
}

void WaveSpeed::eval2(double u, double& c, double& c1) const {
    if (kind_ == SpeedKind::builtin) {
        double b = params_[1], q = 1.0 / (1.0 + u * u);
        c = params_[0] + b * q;
        c1 = -2.0 * b * u * q * q;
        return;
    }
    if (kind_ == SpeedKind::constant) {
        c = params_[0];
        c1 = 0;
        return;
    }
    c = eval(u);
    c1 = eval_derivative(u, 1);
}

std::string WaveSpeed::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case SpeedKind::constant: os << "c = " << params_[0]; break;
    case SpeedKind::builtin: os << "c(u) = " << params_[0] << " + " << params_[1] << "/(1+u^2)"; break;
    case SpeedKind::tabulated: os << "tabulated c(u), " << tu_.size() << " knots"; break;
    }
    return os.str();
}

nlohmann::json WaveSpeed::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_ == SpeedKind::constant ? "constant" : kind_ == SpeedKind::builtin ? "builtin" : "tabulated";
    j["params"] = params_;
    j["kappa"] = kappa_;
    j["k1"] = k1_;
    j["k2"] = k2_;
    return j;
}

}  // namespace nvw
