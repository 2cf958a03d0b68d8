#pragma once

namespace nvw {

/// Right-hand side of Z_XY = F(Z)(Z_X, Z_Y) for Z = (t, x, U, J, K), given c(U) and c'(U).
inline void system_rhs(double c, double c1, const double* V, const double* W, double* F) {
    const double a = c1 / (2 * c);
    F[0] = -a * (V[2] * W[0] + W[2] * V[0]);
    F[1] = a * (W[2] * V[1] + V[2] * W[1]);
    F[2] = c1 / (2 * c * c * c) * (W[1] * V[3] + V[1] * W[3]) - a * V[2] * W[2];
    F[3] = a * (W[2] * V[3] + V[2] * W[3]);
    F[4] = -a * (W[2] * V[4] + V[2] * W[4]);
}

}  // namespace nvw
