#pragma once

// File formats.
//
//   profile cache   binary, little-endian f64 arrays keyed by
//                   (family, k, m, omega, R, M, scheme)
//   profile CSV     columns x, v, u
//   sweep CSV       omega, Q, K, M, V, E, L, dQ_domega, defect_virial1,
//                   defect_virial2, defect_KL
//   spectrum CSV    re_lambda, im_lambda, parity, retained, near_band
//   jordan CSV      omega, residuals, vk_pairing, c11, energy, defect
//   operator dump   binary header + row-major dense matrix
//
// Every text file starts with '# ' metadata lines carrying the artifact
// version and the resolved configuration; identical inputs produce identical
// bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "nlds/jordan.hpp"
#include "nlds/spectrum.hpp"
#include "nlds/sweep.hpp"

namespace nlds {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace fs = std::filesystem;

/// "%.17g" — shortest exact decimal round trip for doubles.
std::string fmt(double v);

/// Cache file stem for a profile, e.g. "profile_GN_k1_m1_w0.5_R34.64..._M512_fourier".
std::string profile_cache_key(const ModelSpec& model, double omega, double R, int M,
                              Scheme scheme);

void write_profile_binary(const fs::path& path, const WaveProfile& p);
WaveProfile read_profile_binary(const fs::path& path);

void write_profile_csv(const fs::path& path, const WaveProfile& p,
                       const std::string& meta = {});

void write_sweep_csv(const fs::path& path, const std::vector<SweepEntry>& table,
                     const std::string& meta = {});

void write_spectrum_csv(const fs::path& path, const SpectrumSlice& slice,
                        const std::string& meta = {});

void write_trajectories_json(const fs::path& path,
                             const std::vector<EigenTrajectory>& trajectories,
                             const std::string& meta = {});

void write_events_json(const fs::path& path, const std::vector<CollisionEvent>& events,
                       const std::string& meta = {});

std::string jordan_report_json(const JordanReport& r);
void write_jordan_json(const fs::path& path, const JordanReport& r);
void write_jordan_csv(const fs::path& path, const std::vector<JordanReport>& rows,
                      const std::string& meta = {});

void write_operator_dump(const fs::path& path, const LinearizedOperator& op);

/// Plot-ready figure data: <stem>_functionals.csv (omega, E, Q),
/// <stem>_spectrum.csv (omega, im_lambda, parity for retained upper-half gap
/// eigenvalues) and <stem>_band_edges.csv.
void write_figure_data(const fs::path& dir, const std::string& stem,
                       const SweepResult& result, const std::string& meta = {});

}  // namespace nlds
