#pragma once

// Solitary-wave profiles phi_omega = (v, iu).
//
// The stationary system is integrated outward from x = 0 starting at the exact
// on-orbit amplitude (v0, 0); after every accepted step the state is projected
// back onto the level set H = 0 of the first integral, which removes the
// secular growth along the unstable direction of the homoclinic orbit.  The
// half profile is then resampled onto the requested uniform grid (cubic
// Hermite on the dense integrator output) and mirrored, so v is exactly even
// and u exactly odd.

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "nlds/errors.hpp"
#include "nlds/grid.hpp"
#include "nlds/model.hpp"

namespace nlds {

using Eigen::VectorXd;

struct StationaryRhs {
    ModelSpec model;
    double omega;

    /// d/dx (v, u) at a point.
    Eigen::Vector2d operator()(const Eigen::Vector2d& vu) const;
};

/// Right-hand side of the stationary ODE system; rejects omega outside (-m, m).
StationaryRhs stationary_system(const ModelSpec& model, double omega);

/// Central amplitude v0 = ((k+1)(m-omega))^{1/(2k)}; u(0) = 0 by parity.
double initial_amplitude(const ModelSpec& model, double omega);

/// Conserved quantity of the stationary flow; vanishes on the soliton orbit.
double first_integral(const ModelSpec& model, double omega, double v, double u);

/// Default half-width R = max(30, 30/kappa), kappa = sqrt(m^2 - omega^2).
double default_domain_halfwidth(const ModelSpec& model, double omega);

struct SolveOptions {
    int M = 512;
    Scheme scheme = Scheme::Fourier;
    std::optional<double> R;   // override the default half-width
    double rel_tol = 1e-12;
};

struct WaveProfile {
    ModelSpec model;
    double omega = 0.0;
    Grid grid;
    VectorXd x;  // grid nodes
    VectorXd v;  // even component
    VectorXd u;  // odd component
    double kappa = 0.0;     // sqrt(m^2 - omega^2)
    double residual = 0.0;  // max stationary-equation defect of the dense solution
    int s_sign_changes = 0; // sign changes of s = v^2 - u^2 along the grid

    double max_abs_v() const { return v.cwiseAbs().maxCoeff(); }
};

/// Integrates the half orbit and mirrors it onto the grid.
/// Throws IntegrationDiverged when the orbit escapes (e.g. GN with omega <= 0)
/// or the tail cannot be held below 1e-10 * max|v| at the requested R.
WaveProfile solve_profile(const ModelSpec& model, double omega,
                          const SolveOptions& opts = {});

/// Max over grid nodes of |H(v_j, u_j)|.
double first_integral_residual(const WaveProfile& profile);

/// Orbit samples (v, u) on an arbitrary grid, without the tail-floor check.
/// Meant for assembling the linearization on a restricted domain when the
/// potential decays much faster than the wave itself; the samples at the grid
/// ends need not be negligible, so this is not a valid standalone profile.
std::pair<VectorXd, VectorXd> sample_orbit(const ModelSpec& model, double omega,
                                           const Grid& grid, double rel_tol = 1e-12);

struct OmegaDerivative {
    double omega = 0.0;
    double delta_omega = 0.0;
    Grid grid;
    VectorXd dv;
    VectorXd du;
};

/// Centered difference (phi_{w+dw} - phi_{w-dw}) / (2 dw) on a fixed grid
/// (R is pinned to the center value so all solves share nodes).
/// With richardson = true the two-step extrapolation (4 D_{dw/2} - D_dw)/3 is
/// returned instead.
OmegaDerivative d_omega_profile(const ModelSpec& model, double omega,
                                double delta_omega,
                                const SolveOptions& opts = {},
                                bool richardson = false);

}  // namespace nlds
