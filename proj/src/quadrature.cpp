#include "nvw/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nvw {

std::vector<Stencil> trapezoid_stencils(const std::vector<double>& x) {
    std::vector<Stencil> st(x.size());
    for (std::size_t k = 1; k < x.size(); ++k) {
        double h = 0.5 * (x[k] - x[k - 1]);
        st[k] = {{k - 1, k, k, k}, {h, h, 0, 0}};
    }
    return st;
}

std::vector<char> rough_intervals(const std::vector<double>& x, const std::vector<const std::vector<double>*>& fs) {
    const std::size_t n = x.size();
    std::vector<char> rough(n, 0);
    for (const auto* fp : fs) {
        const std::vector<double>& f = *fp;
        double scale = 0;
        for (double v : f) scale = std::max(scale, std::abs(v));
        const double floor = 1e-9 * scale;
        auto slope = [&](std::size_t k) {
            double h = x[k] - x[k - 1];
            return h > 0 ? std::abs(f[k] - f[k - 1]) / h : NAN;
        };
        for (std::size_t k = 1; k < n; ++k) {
            if (!(x[k] > x[k - 1]) || std::abs(f[k] - f[k - 1]) <= floor) continue;
            double d = slope(k), nb = 0;
            bool any = false;
            for (std::size_t m : {k - 1, k + 1}) {
                if (m < 1 || m >= n) continue;
                double e = slope(m);
                if (std::isnan(e)) continue;
                nb = std::max(nb, e);
                any = true;
            }
            if (any && d > 4 * nb) rough[k] = 1;
        }
    }
    return rough;
}

std::vector<Stencil> quadrature_stencils(const std::vector<double>& x, int order, const std::vector<char>* rough) {
    std::vector<Stencil> st = trapezoid_stencils(x);
    const std::size_t n = x.size();
    if (order < 4 || n < 4) return st;
    auto ok = [&](std::size_t s) {
        double lo = INFINITY, hi = 0;
        for (std::size_t m = s + 1; m <= s + 3; ++m) {
            double d = x[m] - x[m - 1];
            if (!(d > 0) || (rough && (*rough)[m])) return false;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        return hi <= 5 * lo;
    };
    // two-point Gauss rule integrates the cubic interpolant exactly
    const double g = 0.5 / std::sqrt(3.0);
    for (std::size_t k = 1; k < n; ++k) {
        if (!(x[k] > x[k - 1])) continue;
        // stencil start s: centered first, then shifted right, then left
        const long cand[3] = {long(k) - 2, long(k) - 1, long(k) - 3};
        for (long sl : cand) {
            if (sl < 0 || std::size_t(sl) + 3 > n - 1) continue;
            std::size_t s = std::size_t(sl);
            if (!ok(s)) continue;
            Stencil t;
            const double a = x[k - 1], b = x[k], mid = 0.5 * (a + b), h = b - a;
            for (int m = 0; m < 4; ++m) {
                t.idx[m] = s + m;
                double w = 0;
                for (double q : {mid - g * h, mid + g * h}) {
                    double l = 1;
                    for (int r = 0; r < 4; ++r)
                        if (r != m) l *= (q - x[s + r]) / (x[s + m] - x[s + r]);
                    w += l;
                }
                t.w[m] = 0.5 * h * w;
            }
            st[k] = t;
            break;
        }
    }
    return st;
}

std::vector<double> cell_integrals(const std::vector<double>& x, const std::vector<double>& f) {
    std::vector<double> out;
    if (x.size() < 2) return out;
    const auto rough = rough_intervals(x, {&f});
    const auto st = quadrature_stencils(x, 4, &rough);
    out.resize(x.size() - 1);
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double trap = 0.5 * (f[k - 1] + f[k]) * (x[k] - x[k - 1]);
        const Stencil& s = st[k];
        double v = 0;
        bool pos = true;
        for (int m = 0; m < 4; ++m) {
            v += s.w[m] * f[s.idx[m]];
            pos = pos && f[s.idx[m]] >= 0;
        }
        out[k - 1] = (pos && v >= 0) ? v : trap;
    }
    return out;
}

}  // namespace nvw
