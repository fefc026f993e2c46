#pragma once

// Conserved functionals of a profile and the critical-frequency searches.
//
//   Q = int (v^2 + u^2)          charge
//   K = int (v u' - u v')        derivative part of the energy
//   M = m int (v^2 - u^2)        mass part
//   V = -int (interaction scalar density)
//   E = K + M + V,   L = -E + omega Q
//
// On exact solutions the Pohozaev/virial relations K = -kV, omega Q = M + V
// and K = -L hold; their defects measure discretization quality.  K is formed
// with the same differentiation matrix as the linearization so that the
// defects are consistent with the operator-level residuals.

#include <optional>
#include <vector>

#include "nlds/linop.hpp"
#include "nlds/profile.hpp"

namespace nlds {

struct FunctionalReport {
    double omega = 0.0;
    double Q = 0.0, K = 0.0, M = 0.0, V = 0.0, E = 0.0, L = 0.0;
    double defect_virial1 = 0.0;  // |K + kV|
    double defect_virial2 = 0.0;  // |omega Q - M - V|
    double defect_KL = 0.0;       // |K + L|
    std::optional<double> dQ_domega;
};

double charge(const WaveProfile& profile);

FunctionalReport energy_terms(const WaveProfile& profile);

/// The three defects of an existing report (recomputed from a profile).
FunctionalReport virial_report(const WaveProfile& profile);

struct SweepEntry {
    double omega = 0.0;
    bool ok = false;
    std::string error;
    FunctionalReport report;
};

/// One report per omega; failures are recorded and the sweep continues.
/// dQ/domega is filled by centered differences on the sweep grid.
std::vector<SweepEntry> sweep_functionals(const ModelSpec& model,
                                          const std::vector<double>& omegas,
                                          const SolveOptions& opts = {});

/// Fills the dQ_domega column in place from neighbouring Q values.
void fill_dq_domega(std::vector<SweepEntry>& table);

struct CriticalSearchOptions {
    SolveOptions solve;
    double xtol_E = 1e-5;
    double xtol_VK = 1e-4;
    double delta_omega = 1e-4;  // FD step for dQ/domega
};

/// Root of omega -> E(phi_omega) in [a, b]; throws NoSignChange.
double find_omega_E(const ModelSpec& model, double bracket_lo, double bracket_hi,
                    const CriticalSearchOptions& opts = {});

/// Root of omega -> dQ/domega (Richardson-refined centered difference).
double find_omega_VK(const ModelSpec& model, double bracket_lo, double bracket_hi,
                     const CriticalSearchOptions& opts = {});

}  // namespace nlds
