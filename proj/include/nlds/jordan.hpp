#pragma once

// Kernel and Jordan-chain diagnostics of JL at a profile.
//
// The kernel holds J phi (gauge) and d_x phi (translation); each carries a
// size-2 Jordan block:
//   JL d_omega phi = J phi,        JL xi = d_x phi,
//   xi = omega x J phi - (1/2) alpha1 phi.
// The chain grows at dQ/domega = 0 (gauge block) and at E = 0 (translation
// block); the latter is equivalent to the vanishing of
//   c11 = <alpha1 phi, J d_x phi> + omega Q,
// which equals the energy on exact solutions.

#include "nlds/functionals.hpp"
#include "nlds/linop.hpp"

namespace nlds {

struct JordanReport {
    double omega = 0.0;
    double residual_kernel_U1 = 0.0;  // |JL J phi| / |J phi|
    double residual_kernel_tr = 0.0;  // |JL d_x phi| / |d_x phi|
    double residual_chain_U1 = 0.0;   // |JL d_omega phi - J phi| / |J phi|
    double residual_chain_tr = 0.0;   // |JL xi - d_x phi| / |d_x phi|
    double vk_pairing = 0.0;          // <d_omega phi, phi>
    double cross_orthogonality = 0.0; // <d_omega phi, J d_x phi>
    double c11 = 0.0;
    double energy = 0.0;
    double c11_defect = 0.0;          // |c11 - E|
    double u1_lsq_residual = 0.0;     // relative residual of JL u = d_omega phi
};

/// The translation generalized eigenvector xi on the grid.
Eigen::VectorXd build_xi(const WaveProfile& profile);

/// The four chain residuals (relative to the right-hand-side norms).
JordanReport chain_residuals(const LinearizedOperator& op, const WaveProfile& profile,
                             const OmegaDerivative& d_omega);

/// <d_omega phi, phi>; equals (dQ/domega)/2 up to difference truncation.
double vk_pairing(const WaveProfile& profile, const OmegaDerivative& d_omega);

struct CMatrixResult {
    double c11;
    double energy;
    double defect;
};

/// c11 by quadrature against the operator's differentiation scheme.
CMatrixResult c_matrix(const WaveProfile& profile);

/// Everything above in one pass, including the least-squares solvability
/// diagnostic for the next gauge-chain vector (small residual only where the
/// VK condition holds).
JordanReport jordan_report(const LinearizedOperator& op, const WaveProfile& profile,
                           const OmegaDerivative& d_omega, bool with_lsq = false);

}  // namespace nlds
