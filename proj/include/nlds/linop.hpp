#pragma once

// Discretization of the real-form linearization JL(omega) about a profile.
//
//   L = D_m - omega*I - blockdiag(nonlinear_jacobian(phi(x_j)))
//   D_m = (J alpha1) (x) D + m beta (x) I
//
// on fields y(x) in R^4 stored component-major: a 4M vector holds the blocks
// [Re psi1; Re psi2; Im psi1; Im psi2], each of length M.
//
// The operator commutes with the twisted reflection (P y)(x) = beta y(-x).
// Components (Re psi1, Im psi1) are even and (Re psi2, Im psi2) odd in the
// "even" symmetry class (the one containing the profile and the U(1) kernel
// vector J phi); the "odd" class is the complement and contains d_x phi.
// This assignment follows from beta = diag(1,-1,1,-1) and is pinned by the
// kernel-parity tests.

#include <Eigen/Dense>
#include <array>
#include <memory>

#include "nlds/errors.hpp"
#include "nlds/grid.hpp"
#include "nlds/model.hpp"
#include "nlds/profile.hpp"

namespace nlds {

using Eigen::MatrixXd;

/// Dense first-derivative matrix.  Fourier: spectral differentiation on the
/// periodized interval (exactly antisymmetric).  FD4: fourth-order central
/// stencils with mirrored one-sided closures at the two boundary pairs.
MatrixXd differentiation_matrix(const Grid& grid);

enum class Parity { Even, Odd };
std::string to_string(Parity p);

// Symmetry-adapted orthonormal basis of one parity class.  Every basis vector
// touches at most two grid entries, so projections and the reduced matrix are
// assembled by index gathering.
struct ParityBasis {
    Parity parity;
    int full_dim = 0;
    // per basis vector: first (index, weight) and optional second entry
    std::vector<int> idx0, idx1;          // idx1 = -1 for self-paired nodes
    std::vector<double> w0, w1;

    int dim() const { return static_cast<int>(idx0.size()); }
    Eigen::VectorXd project(const Eigen::VectorXd& full) const;
    Eigen::VectorXd lift(const Eigen::VectorXd& reduced) const;
};

ParityBasis parity_basis(const Grid& grid, Parity parity);

struct LinearizedOperator {
    ModelSpec model;
    double omega = 0.0;
    Grid grid;
    std::shared_ptr<const MatrixXd> D;          // differentiation matrix
    std::vector<Matrix4d> V;                    // nonlinear Jacobian per node
    std::array<double, 2> band_edges{};         // (m - |omega|, m + |omega|)

    int dim() const { return 4 * grid.M; }

    /// Apply the symmetric part S = D_m - omega - V.
    Eigen::VectorXd apply_S(const Eigen::VectorXd& y) const;
    /// Apply A = J S.
    Eigen::VectorXd apply_A(const Eigen::VectorXd& y) const;

    /// Materialized dense matrices (4M x 4M).
    MatrixXd dense_S() const;
    MatrixXd dense_A() const;

    /// Reduced dense block of A on one symmetry class (2M x 2M).
    MatrixXd parity_block(const ParityBasis& basis) const;
};

/// Dense symmetric part S; profile must live on the same grid.
MatrixXd assemble_L(const ModelSpec& model, const WaveProfile& profile, const Grid& grid);

/// The full linearization A = J L with band-edge metadata.
LinearizedOperator assemble_JL(const ModelSpec& model, const WaveProfile& profile,
                               const Grid& grid);

/// Operator for the zero profile (free Dirac minus omega), used as a reference.
LinearizedOperator assemble_JL_zero(const ModelSpec& model, double omega, const Grid& grid);

/// Operator on a restricted domain, with the potential regenerated by direct
/// integration of the stationary orbit.  Sound whenever the potential (which
/// falls off like rho^k, 2k times faster than the wave tail) and the sought
/// eigenfunctions are negligible at the subdomain ends; the slow wave tail
/// itself need not be.  Zero-mode diagnostics do not apply on such grids.
LinearizedOperator assemble_JL_subdomain(const ModelSpec& model, double omega,
                                         const Grid& grid);

struct ParityBlocks {
    ParityBasis even_basis, odd_basis;
    MatrixXd even, odd;
};

/// Splits A into its even/odd blocks.  Throws if the profile parity defect
/// exceeds 1e-10 * max|v| (profiles from solve_profile are mirrored exactly).
ParityBlocks parity_decompose(const LinearizedOperator& op, const WaveProfile& profile);
ParityBlocks parity_decompose(const LinearizedOperator& op);

// Field helpers (component-major layout).
Eigen::VectorXd flatten_profile(const WaveProfile& p);            // (v, 0, 0, u)
Eigen::VectorXd flatten_derivative(const OmegaDerivative& d);     // (dv, 0, 0, du)
Eigen::VectorXd apply_pointwise(const Matrix4d& m4, const Eigen::VectorXd& y);
Eigen::VectorXd apply_componentwise(const MatrixXd& D, const Eigen::VectorXd& y);

inline Eigen::VectorXd apply_J_field(const Eigen::VectorXd& y) {
    return apply_pointwise(mat_J(), y);
}

}  // namespace nlds
