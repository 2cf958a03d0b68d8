#pragma once

#include "nvw/eulerian.hpp"
#include "nvw/report.hpp"
#include "nvw/wavespeed.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace nvw {

/// One half (x_i, U_i, J_i, K_i, V_i, H_i) of an element of F, sampled on a nondecreasing
/// grid. Consecutive nodes with the same abscissa carry one-sided derivative values.
struct PsiHalf {
    std::vector<double> X, x, U, J, K, V, H, xd, Jd, Kd;

    std::size_t size() const { return X.size(); }
    void push(double X_, double x_, double U_, double J_, double K_, double V_, double H_, double xd_, double Jd_,
              double Kd_);
    /// Copy node k of another half.
    void push_from(const PsiHalf& o, std::size_t k);
    /// True when node k of `o` has the same derivative data as node j here.
    bool same_derivatives(std::size_t j, const PsiHalf& o, std::size_t k) const;
};

struct PsiPair {
    PsiHalf h1, h2;
    /// Both halves have one node per curve point (x1 == x2 nodewise).
    bool aligned() const;
};

/// Element of G0 on a sampled curve: node k sits at (X[k], Y[k]) and carries Z, V = Z_X, W = Z_Y, p, q.
struct CurveData {
    std::vector<double> s, X, Y;
    std::array<std::vector<double>, 5> Z, V, W;
    std::vector<double> p, q;

    std::size_t size() const { return s.size(); }
    void resize(std::size_t n);
};

/// Map L: Eulerian data to Lagrangian data, one node per Eulerian node plus
/// `n_atom` nodes per unit mass across every atom. The result is aligned.
PsiPair map_L(const EulerianState& state, const WaveSpeed& c, int n_atom = 32);

/// Pairs the nodes of the two halves level by level in x, interpolating where one half has no node.
/// Where both halves are flat at the same level the pairing runs up the left side and then along the top.
PsiPair align(const PsiPair& psi);

/// Map C: Lagrangian data to the initial curve with Z, V, W, p, q. Along horizontal (vertical)
/// stretches W (V) is integrated with W_X = F(Z)(V, W) (V_Y = F(Z)(V, W)) from the stretch start.
CurveData map_C(const PsiPair& psi, const WaveSpeed& c);

/// Relabeling psi . (f, g): samples psi at f(Xbar) and scales derivatives by f'(Xbar).
PsiPair relabel(const PsiPair& psi, const std::function<double(double)>& f, const std::function<double(double)>& fp,
                const std::function<double(double)>& g, const std::function<double(double)>& gp);

/// Projection onto F0 (x_i + J_i = id). Throws DegeneracyError if x_i' + J_i' < 1e-12 somewhere.
PsiPair project_F0(const PsiPair& psi);

Report check_F(const PsiPair& psi, const WaveSpeed& c, double rel_tol = 1e-9);
Report check_G(const CurveData& curve, const WaveSpeed& c, double rel_tol = 1e-9, double comp_tol = 1e-2);

/// CSV with all twelve components of psi and the stored derivatives, one row per node.
void write_psi_csv(const PsiPair& psi, std::ostream& os);

}  // namespace nvw
