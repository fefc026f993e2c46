#pragma once

// Spectrum of the linearization: dense eigendecomposition of the parity
// blocks, resolution filtering against a coarser grid, branch tracking across
// an omega sweep, and detection of eigenvalue collisions at the origin.
//
// Eigenvalues come in quadruples {lambda, -lambda, conj(lambda), -conj(lambda)};
// tracking works on the quadrant representative (Re >= 0, Im >= 0), in which a
// pair of imaginary eigenvalues colliding at 0 and re-emerging as a real pair
// is a single branch passing through the origin.

#include <complex>
#include <optional>
#include <vector>

#include "nlds/functionals.hpp"
#include "nlds/linop.hpp"

namespace nlds {

using Complex = std::complex<double>;

struct EigenOptions {
    bool use_parity = true;
    bool with_vectors = false;   // enables the localization diagnostic
    double band_tol = 1e-3;      // proximity to the essential-spectrum rays
};

struct SpectrumSlice {
    double omega = 0.0;
    int grid_M = 0;
    std::array<double, 2> band_edges{};
    std::vector<Complex> eigenvalues;
    std::vector<Parity> parities;
    std::vector<bool> retained;       // resolution-stable (set by filter_resolved)
    std::vector<bool> near_band;      // within band_tol of the essential rays
    std::vector<double> localization; // tail-mass fraction; empty unless vectors on
    bool filtered = false;
    double eps_disc = 0.0;            // zero-mode magnitude at this resolution

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Eigenvalues (optionally eigenvectors) of a dense real matrix via LAPACK
/// dgeev.  Throws EigenSolverError when the QR iteration fails.
std::vector<Complex> eig_dense(const MatrixXd& A, Eigen::MatrixXcd* vectors = nullptr);

// Binary slice serialization, used by the sweep cache.
void write_slice_binary(const std::string& path, const SpectrumSlice& slice);
SpectrumSlice read_slice_binary(const std::string& path);

/// Full spectrum of JL with parity labels from the block of origin.
SpectrumSlice eigen_slice(const LinearizedOperator& op, const EigenOptions& opts = {});

/// Marks an eigenvalue of `fine` retained iff `coarse` (same omega, half the
/// resolution) has a partner within tol.  Returns the fine slice with flags.
SpectrumSlice filter_resolved(const SpectrumSlice& coarse, const SpectrumSlice& fine,
                              double tol);

struct RealPairs {
    std::vector<double> positive;  // one entry per +/- pair
    int unpaired = 0;              // symmetry-violation count
};

/// Retained eigenvalues with |Im| <= tol and |Re| > tol, folded into pairs.
RealPairs real_pairs(const SpectrumSlice& slice, double tol);

struct TrajectorySample {
    double omega;
    Complex lambda;  // quadrant representative
};

struct CollisionEvent {
    double omega_star = 0.0;
    enum class Kind { OriginCollision, OriginBirth } kind = Kind::OriginCollision;
    enum class Emerging { RealPair, ImaginaryPair } emerging = Emerging::RealPair;
    int branch_id = -1;
    // nearest critical frequency from the functional table
    std::string crossref_type;  // "omega_E" | "omega_VK" | ""
    double crossref_value = 0.0;
    double crossref_distance = 0.0;
};

struct EigenTrajectory {
    int id = 0;
    Parity parity = Parity::Even;
    std::vector<TrajectorySample> samples;
    std::vector<double> split_omegas;  // ambiguous matches recorded, not fatal
};

/// Greedy nearest-neighbour matching of quadrant representatives across
/// omega-ordered slices, per parity class.  Zero modes (|lambda| <= 2 eps_disc)
/// and near-band points are not tracked.
std::vector<EigenTrajectory> track(const std::vector<SpectrumSlice>& slices,
                                   double matching_radius);

/// Critical frequencies interpolated from sign changes in the functional table.
struct CriticalPoints {
    std::vector<double> omega_E;
    std::vector<double> omega_VK;
};
CriticalPoints table_critical_points(const std::vector<SweepEntry>& table);

/// Origin collisions: a branch whose signed square Re(lambda^2) changes sign
/// (imaginary pair <-> real pair through 0).  omega_star interpolates the zero
/// of lambda^2, which is linear in omega near a Jordan-block collision.
/// `emerging` reports the pair type on the lower-omega side.
std::vector<CollisionEvent> detect_origin_collisions(
    const std::vector<EigenTrajectory>& trajectories,
    const std::vector<SweepEntry>& functional_table);

}  // namespace nlds
