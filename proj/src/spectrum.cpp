#include "nlds/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

namespace nlds {

namespace {

// distance to the essential-spectrum rays +/- i [edge, inf)
double band_distance(Complex lam, double edge) {
    const double re = lam.real();
    const double im = std::abs(lam.imag());
    if (im >= edge) return std::abs(re);
    return std::hypot(re, im - edge);
}

// Numerical size of the zero modes.  Each parity block carries one size-2
// Jordan block at the origin, so its two smallest eigenvalues are the
// perturbed zero pair; taking the per-block second-smallest keeps genuine
// small eigenvalues (a branch dipping toward a collision) from inflating the
// estimate.
double zero_mode_scale(const std::vector<Complex>& ev, const std::vector<Parity>& parities) {
    double out = 0.0;
    for (const Parity p : {Parity::Even, Parity::Odd}) {
        std::vector<double> mags;
        for (std::size_t j = 0; j < ev.size(); ++j)
            if (parities[j] == p) mags.push_back(std::abs(ev[j]));
        if (mags.size() < 2) continue;
        std::nth_element(mags.begin(), mags.begin() + 1, mags.end());
        out = std::max(out, mags[1]);
    }
    if (out == 0.0 && !ev.empty()) {
        std::vector<double> mags(ev.size());
        std::transform(ev.begin(), ev.end(), mags.begin(),
                       [](Complex z) { return std::abs(z); });
        const std::size_t idx = std::min<std::size_t>(3, mags.size() - 1);
        std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
        out = mags[idx];
    }
    return out;
}

Complex fold_quadrant(Complex z) { return {std::abs(z.real()), std::abs(z.imag())}; }

enum class AxisType { RealPair, ImagPair, Complex };

AxisType axis_type(Complex folded) {
    const double re = folded.real(), im = folded.imag();
    const double mag = std::abs(folded);
    if (im <= 0.25 * mag) return AxisType::RealPair;
    if (re <= 0.25 * mag) return AxisType::ImagPair;
    return AxisType::Complex;
}

}  // namespace

std::vector<Complex> eig_dense(const MatrixXd& A, Eigen::MatrixXcd* vectors) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw std::invalid_argument("eig_dense: matrix must be square");
    MatrixXd work = A;  // dgeev overwrites
    std::vector<double> wr(n), wi(n);
    MatrixXd vr;
    if (vectors) vr.resize(n, n);
    const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n,
                                   work.data(), n, wr.data(), wi.data(), nullptr, n,
                                   vectors ? vr.data() : nullptr, n);
    if (info != 0)
        throw EigenSolverError("dgeev failed with info = " + std::to_string(info));

    std::vector<Complex> ev(n);
    for (int j = 0; j < n; ++j) ev[j] = {wr[j], wi[j]};
    if (vectors) {
        vectors->resize(n, n);
        for (int j = 0; j < n; ++j) {
            if (wi[j] > 0.0 && j + 1 < n) {
                vectors->col(j) = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
                vectors->col(j + 1) = vectors->col(j).conjugate();
                ++j;
            } else {
                vectors->col(j) = vr.col(j).cast<Complex>();
            }
        }
    }
    return ev;
}

void write_slice_binary(const std::string& path, const SpectrumSlice& s) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write slice cache: " + path);
    const char magic[8] = {'N', 'L', 'D', 'S', 'S', 'P', 'C', '1'};
    os.write(magic, 8);
    auto w = [&](const void* ptr, std::size_t n) { os.write(static_cast<const char*>(ptr), n); };
    w(&s.omega, 8);
    const std::uint32_t M = s.grid_M;
    w(&M, 4);
    w(s.band_edges.data(), 16);
    w(&s.eps_disc, 8);
    const std::uint8_t filt = s.filtered ? 1 : 0;
    w(&filt, 1);
    const std::uint64_t n = s.eigenvalues.size();
    w(&n, 8);
    for (std::uint64_t j = 0; j < n; ++j) {
        const double re = s.eigenvalues[j].real(), im = s.eigenvalues[j].imag();
        w(&re, 8);
        w(&im, 8);
        const std::uint8_t flags = (s.parities[j] == Parity::Odd ? 1 : 0) |
                                   (s.retained[j] ? 2 : 0) | (s.near_band[j] ? 4 : 0);
        w(&flags, 1);
    }
    const std::uint64_t nloc = s.localization.size();
    w(&nloc, 8);
    if (nloc) w(s.localization.data(), 8 * nloc);
}

SpectrumSlice read_slice_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read slice cache: " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::string_view(magic, 8) != "NLDSSPC1")
        throw std::runtime_error("not a slice cache file: " + path);
    auto r = [&](void* ptr, std::size_t n) { is.read(static_cast<char*>(ptr), n); };
    SpectrumSlice s;
    r(&s.omega, 8);
    std::uint32_t M = 0;
    r(&M, 4);
    s.grid_M = static_cast<int>(M);
    r(s.band_edges.data(), 16);
    r(&s.eps_disc, 8);
    std::uint8_t filt = 0;
    r(&filt, 1);
    s.filtered = filt != 0;
    std::uint64_t n = 0;
    r(&n, 8);
    s.eigenvalues.resize(n);
    s.parities.resize(n);
    s.retained.resize(n);
    s.near_band.resize(n);
    for (std::uint64_t j = 0; j < n; ++j) {
        double re = 0, im = 0;
        std::uint8_t flags = 0;
        r(&re, 8);
        r(&im, 8);
        r(&flags, 1);
        s.eigenvalues[j] = {re, im};
        s.parities[j] = (flags & 1) ? Parity::Odd : Parity::Even;
        s.retained[j] = (flags & 2) != 0;
        s.near_band[j] = (flags & 4) != 0;
    }
    std::uint64_t nloc = 0;
    r(&nloc, 8);
    s.localization.resize(nloc);
    if (nloc) r(s.localization.data(), 8 * nloc);
    if (!is) throw std::runtime_error("truncated slice cache: " + path);
    return s;
}

SpectrumSlice eigen_slice(const LinearizedOperator& op, const EigenOptions& opts) {
    SpectrumSlice slice;
    slice.omega = op.omega;
    slice.grid_M = op.grid.M;
    slice.band_edges = op.band_edges;

    try {
        if (opts.use_parity) {
            for (const Parity parity : {Parity::Even, Parity::Odd}) {
                const ParityBasis basis = parity_basis(op.grid, parity);
                const MatrixXd block = op.parity_block(basis);
                Eigen::MatrixXcd vecs;
                const auto ev = eig_dense(block, opts.with_vectors ? &vecs : nullptr);
                for (std::size_t j = 0; j < ev.size(); ++j) {
                    slice.eigenvalues.push_back(ev[j]);
                    slice.parities.push_back(parity);
                    if (opts.with_vectors) {
                        // tail-mass fraction of the lifted eigenvector
                        const Eigen::VectorXd re = basis.lift(vecs.col(j).real());
                        const Eigen::VectorXd im = basis.lift(vecs.col(j).imag());
                        const int M = op.grid.M;
                        double tail = 0.0, total = 0.0;
                        for (int c = 0; c < 4; ++c)
                            for (int i = 0; i < M; ++i) {
                                const double w = re[c * M + i] * re[c * M + i] +
                                                 im[c * M + i] * im[c * M + i];
                                total += w;
                                if (std::abs(op.grid.x(i)) > 0.5 * op.grid.R) tail += w;
                            }
                        slice.localization.push_back(total > 0 ? tail / total : 0.0);
                    }
                }
            }
        } else {
            const auto ev = eig_dense(op.dense_A(), nullptr);
            slice.eigenvalues = ev;
            slice.parities.assign(ev.size(), Parity::Even);
        }
    } catch (const EigenSolverError& e) {
        throw EigenSolverError(std::string(e.what()) + " at omega = " +
                               std::to_string(op.omega));
    }

    slice.retained.assign(slice.eigenvalues.size(), true);
    slice.near_band.resize(slice.eigenvalues.size());
    for (std::size_t j = 0; j < slice.eigenvalues.size(); ++j) {
        bool nb = band_distance(slice.eigenvalues[j], slice.band_edges[0]) <= opts.band_tol;
        // Domain truncation detaches continuum modes from the band edge by
        // O(1/R), far beyond the proximity tolerance; their eigenvectors stay
        // delocalized (about half the mass beyond |x| = R/2), unlike genuine
        // bound states, whose tail mass is exponentially small.
        if (!nb && opts.with_vectors && slice.localization[j] > 0.35) nb = true;
        slice.near_band[j] = nb;
    }
    slice.eps_disc = zero_mode_scale(slice.eigenvalues, slice.parities);
    return slice;
}

SpectrumSlice filter_resolved(const SpectrumSlice& coarse, const SpectrumSlice& fine,
                              double tol) {
    SpectrumSlice out = fine;
    out.filtered = true;
    for (int j = 0; j < out.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& c : coarse.eigenvalues)
            best = std::min(best, std::abs(out.eigenvalues[j] - c));
        // near an origin collision lambda ~ C sqrt(omega - omega*), so a tiny
        // resolution shift of omega* moves the eigenvalue by a sizeable
        // fraction of itself; the relative allowance keeps such branches
        out.retained[j] = best <= std::max(tol, 0.08 * std::abs(out.eigenvalues[j]));
    }
    return out;
}

RealPairs real_pairs(const SpectrumSlice& slice, double tol) {
    std::vector<double> pos, neg;
    for (int j = 0; j < slice.size(); ++j) {
        if (!slice.retained[j]) continue;
        const Complex z = slice.eigenvalues[j];
        if (std::abs(z.imag()) > tol || std::abs(z.real()) <= tol) continue;
        (z.real() > 0 ? pos : neg).push_back(std::abs(z.real()));
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    RealPairs out;
    std::vector<bool> used(neg.size(), false);
    for (const double p : pos) {
        bool matched = false;
        for (std::size_t i = 0; i < neg.size(); ++i) {
            if (!used[i] && std::abs(neg[i] - p) <= 1e-8 * std::max(1.0, p) + 1e-10) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if (matched)
            out.positive.push_back(p);
        else
            ++out.unpaired;
    }
    out.unpaired += static_cast<int>(std::count(used.begin(), used.end(), false));
    return out;
}

std::vector<EigenTrajectory> track(const std::vector<SpectrumSlice>& slices,
                                   double matching_radius) {
    std::vector<EigenTrajectory> trajectories;
    struct Active {
        int traj;
        int missed;  // a branch survives one skipped slice (e.g. the
                     // collision dip, where it falls below the zero floor)
    };
    std::vector<Active> active;

    for (std::size_t is = 0; is < slices.size(); ++is) {
        const SpectrumSlice& s = slices[is];
        if (is > 0 && s.omega <= slices[is - 1].omega)
            throw std::invalid_argument("track: slices must be sorted by omega");

        struct Cand {
            Complex lam;
            Parity parity;
        };
        std::vector<Cand> cands;
        const double floor = std::max(2.0 * s.eps_disc, 1e-9);
        for (int j = 0; j < s.size(); ++j) {
            if (!s.retained[j] || s.near_band[j]) continue;
            const Complex z = s.eigenvalues[j];
            if (std::abs(z) <= floor) continue;
            // branches are tracked inside the gap; continuum points drift
            // slightly off the rays at finite resolution and are not branches
            if (std::abs(z.imag()) >= s.band_edges[0] - 1e-3) continue;
            cands.push_back({fold_quadrant(z), s.parities[j]});
        }
        // the four mirror partners fold onto one representative; deduplicate
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return a.lam.real() != b.lam.real() ? a.lam.real() < b.lam.real()
                                                : a.lam.imag() < b.lam.imag();
        });
        cands.erase(std::unique(cands.begin(), cands.end(),
                                [](const Cand& a, const Cand& b) {
                                    return a.parity == b.parity &&
                                           std::abs(a.lam - b.lam) < 1e-7;
                                }),
                    cands.end());

        struct Pair {
            double dist;
            int traj, cand;
        };
        std::vector<Pair> pairs;
        for (std::size_t t = 0; t < active.size(); ++t) {
            const EigenTrajectory& tr = trajectories[active[t].traj];
            const TrajectorySample& last = tr.samples.back();
            int close = 0;
            for (std::size_t c = 0; c < cands.size(); ++c) {
                if (cands[c].parity != tr.parity) continue;
                const double d = std::abs(cands[c].lam - last.lambda);
                if (d <= matching_radius) {
                    pairs.push_back({d, static_cast<int>(t), static_cast<int>(c)});
                    ++close;
                }
            }
            if (close > 1) trajectories[active[t].traj].split_omegas.push_back(s.omega);
        }
        std::sort(pairs.begin(), pairs.end(),
                  [](const Pair& a, const Pair& b) { return a.dist < b.dist; });

        std::vector<bool> traj_used(active.size(), false), cand_used(cands.size(), false);
        std::vector<Active> next_active;
        for (const Pair& p : pairs) {
            if (traj_used[p.traj] || cand_used[p.cand]) continue;
            traj_used[p.traj] = true;
            cand_used[p.cand] = true;
            trajectories[active[p.traj].traj].samples.push_back({s.omega, cands[p.cand].lam});
            next_active.push_back({active[p.traj].traj, 0});
        }
        for (std::size_t t = 0; t < active.size(); ++t)
            if (!traj_used[t] && active[t].missed < 1)
                next_active.push_back({active[t].traj, active[t].missed + 1});
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (cand_used[c]) continue;
            EigenTrajectory tr;
            tr.id = static_cast<int>(trajectories.size());
            tr.parity = cands[c].parity;
            tr.samples.push_back({s.omega, cands[c].lam});
            trajectories.push_back(std::move(tr));
            next_active.push_back({trajectories.back().id, 0});
        }
        active = std::move(next_active);
    }
    return trajectories;
}

CriticalPoints table_critical_points(const std::vector<SweepEntry>& table) {
    CriticalPoints cp;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (!table[i].ok || !table[i + 1].ok) continue;
        const double e0 = table[i].report.E, e1 = table[i + 1].report.E;
        if (e0 * e1 < 0.0)
            cp.omega_E.push_back(table[i].omega -
                                 e0 * (table[i + 1].omega - table[i].omega) / (e1 - e0));
        if (table[i].report.dQ_domega && table[i + 1].report.dQ_domega) {
            const double d0 = *table[i].report.dQ_domega;
            const double d1 = *table[i + 1].report.dQ_domega;
            if (d0 * d1 < 0.0)
                cp.omega_VK.push_back(table[i].omega -
                                      d0 * (table[i + 1].omega - table[i].omega) / (d1 - d0));
        }
    }
    return cp;
}

namespace {

void attach_crossref(CollisionEvent& ev, const CriticalPoints& cp) {
    ev.crossref_distance = std::numeric_limits<double>::infinity();
    for (const double w : cp.omega_E) {
        const double d = std::abs(ev.omega_star - w);
        if (d < ev.crossref_distance) {
            ev.crossref_distance = d;
            ev.crossref_value = w;
            ev.crossref_type = "omega_E";
        }
    }
    for (const double w : cp.omega_VK) {
        const double d = std::abs(ev.omega_star - w);
        if (d < ev.crossref_distance) {
            ev.crossref_distance = d;
            ev.crossref_value = w;
            ev.crossref_type = "omega_VK";
        }
    }
    if (!std::isfinite(ev.crossref_distance)) {
        ev.crossref_distance = 0.0;
        ev.crossref_type = "";
    }
}

}  // namespace

std::vector<CollisionEvent> detect_origin_collisions(
    const std::vector<EigenTrajectory>& trajectories,
    const std::vector<SweepEntry>& functional_table) {
    const CriticalPoints cp = table_critical_points(functional_table);

    std::vector<CollisionEvent> events;
    for (const EigenTrajectory& tr : trajectories) {
        for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i) {
            const Complex a = tr.samples[i].lambda;
            const Complex b = tr.samples[i + 1].lambda;
            const AxisType ta = axis_type(a), tb = axis_type(b);
            const bool flip = (ta == AxisType::RealPair && tb == AxisType::ImagPair) ||
                              (ta == AxisType::ImagPair && tb == AxisType::RealPair);
            if (!flip) continue;
            // signed square: positive on the real axis, negative on the imaginary
            const double qa = a.real() * a.real() - a.imag() * a.imag();
            const double qb = b.real() * b.real() - b.imag() * b.imag();
            if (qa * qb >= 0.0) continue;
            CollisionEvent ev;
            ev.kind = CollisionEvent::Kind::OriginCollision;
            ev.omega_star = tr.samples[i].omega -
                            qa * (tr.samples[i + 1].omega - tr.samples[i].omega) / (qb - qa);
            ev.emerging = ta == AxisType::RealPair ? CollisionEvent::Emerging::RealPair
                                                   : CollisionEvent::Emerging::ImaginaryPair;
            ev.branch_id = tr.id;
            attach_crossref(ev, cp);
            events.push_back(ev);
        }
    }
    std::sort(events.begin(), events.end(),
              [](const CollisionEvent& a, const CollisionEvent& b) {
                  return a.omega_star < b.omega_star;
              });
    return events;
}

}  // namespace nlds
