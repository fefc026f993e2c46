#pragma once

// Frequency sweeps: profiles, functionals and filtered spectra over an omega
// grid, followed by branch tracking and origin-collision detection.  Slices
// are computed by a worker pool; each omega is filtered against the same
// operator rebuilt at half resolution.

#include "nlds/jordan.hpp"
#include "nlds/spectrum.hpp"

namespace nlds {

struct NumericsConfig {
    int M = 512;
    Scheme scheme = Scheme::Fourier;
    std::optional<double> R;       // domain override
    double delta_omega = 1e-4;     // omega-derivative step
    double filter_tol = 1e-3;      // refinement-match tolerance
    double match_radius = 0.2;     // branch tracking radius
    double band_tol = 1e-3;        // essential-ray proximity label
    int threads = 0;               // 0 = hardware concurrency
    std::string cache_dir;         // filtered-slice cache; empty = off
};

struct SweepRequest {
    ModelSpec model;
    double omega_min = -0.99;
    double omega_max = 0.99;
    int count = 200;
    bool adaptive = true;  // 3x density within 0.05 of detected events
    NumericsConfig numerics;
};

struct SweepResult {
    std::vector<SweepEntry> table;        // functional reports, omega-ordered
    std::vector<SpectrumSlice> slices;    // successful slices, omega-ordered
    std::vector<EigenTrajectory> trajectories;
    std::vector<CollisionEvent> events;
};

/// Interior omega samples of (lo, hi): count points excluding the endpoints.
std::vector<double> interior_grid(double lo, double hi, int count);

SolveOptions solve_options(const NumericsConfig& n);

/// Profile + filtered spectrum slice at one omega.
SpectrumSlice compute_slice(const ModelSpec& model, double omega,
                            const NumericsConfig& numerics,
                            const EigenOptions& eig_opts = {});

SweepResult run_sweep(const SweepRequest& request);

}  // namespace nlds
