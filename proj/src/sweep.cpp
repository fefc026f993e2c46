#include "nlds/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "nlds/parallel.hpp"

namespace nlds {

std::vector<double> interior_grid(double lo, double hi, int count) {
    if (!(hi > lo)) throw std::invalid_argument("sweep: omega_max must exceed omega_min");
    if (count < 1) throw std::invalid_argument("sweep: need at least one point");
    std::vector<double> ws(count);
    const double step = (hi - lo) / (count + 1);
    for (int i = 0; i < count; ++i) ws[i] = lo + (i + 1) * step;
    return ws;
}

SolveOptions solve_options(const NumericsConfig& n) {
    SolveOptions o;
    o.M = n.M;
    o.scheme = n.scheme;
    o.R = n.R;
    return o;
}

namespace {

// Resolution partner for the stability filter.  Three quarters of the fine
// grid: far enough to decorrelate discretization artifacts, close enough that
// genuine eigenvalues of sharply peaked profiles still match within the
// filter tolerance.
int coarse_points(int M, Scheme scheme) {
    int Mc = 3 * M / 4;
    if (scheme == Scheme::Fourier && Mc % 2 != 0) ++Mc;
    if (scheme == Scheme::FD4 && Mc % 2 != 1) ++Mc;
    return std::max(Mc, 64);
}

}  // namespace

SpectrumSlice compute_slice(const ModelSpec& model, double omega,
                            const NumericsConfig& numerics, const EigenOptions& eig_opts) {
    SolveOptions fine = solve_options(numerics);
    if (!fine.R) fine.R = default_domain_halfwidth(model, omega);
    SolveOptions coarse = fine;
    coarse.M = coarse_points(fine.M, fine.scheme);

    EigenOptions eo = eig_opts;
    eo.band_tol = numerics.band_tol;

    // filtered slices are cached per profile key + filter parameters
    std::string cache_path;
    if (!numerics.cache_dir.empty() && !eo.with_vectors) {
        char key[224];
        std::snprintf(key, sizeof(key),
                      "%s/spectrum_%s_k%.12g_m%.12g_w%.12g_R%.12g_M%d_Mc%d_%s_ft%.3g_bt%.3g.bin",
                      numerics.cache_dir.c_str(), to_string(model.family).c_str(), model.k,
                      model.m, omega, *fine.R, fine.M, coarse.M,
                      to_string(fine.scheme).c_str(), numerics.filter_tol, numerics.band_tol);
        cache_path = key;
        std::error_code ec;
        if (std::filesystem::exists(cache_path, ec)) return read_slice_binary(cache_path);
    }

    const WaveProfile pf = solve_profile(model, omega, fine);
    const LinearizedOperator opf = assemble_JL(model, pf, pf.grid);
    const SpectrumSlice sf = eigen_slice(opf, eo);

    const WaveProfile pc = solve_profile(model, omega, coarse);
    const LinearizedOperator opc = assemble_JL(model, pc, pc.grid);
    EigenOptions eoc = eo;
    eoc.with_vectors = false;
    const SpectrumSlice sc = eigen_slice(opc, eoc);

    SpectrumSlice out = filter_resolved(sc, sf, numerics.filter_tol);
    if (!cache_path.empty()) write_slice_binary(cache_path, out);
    return out;
}

namespace {

struct PointResult {
    SweepEntry entry;
    std::optional<SpectrumSlice> slice;
};

PointResult compute_point(const ModelSpec& model, double omega,
                          const NumericsConfig& numerics) {
    PointResult out;
    out.entry.omega = omega;
    try {
        SolveOptions so = solve_options(numerics);
        if (!so.R) so.R = default_domain_halfwidth(model, omega);
        const WaveProfile p = solve_profile(model, omega, so);
        out.entry.report = energy_terms(p);
        out.entry.ok = true;
        out.slice = compute_slice(model, omega, numerics);
    } catch (const std::exception& e) {
        out.entry.ok = false;
        out.entry.error = e.what();
        out.slice.reset();
    }
    return out;
}

}  // namespace

SweepResult run_sweep(const SweepRequest& req) {
    std::map<double, PointResult> points;

    auto compute_batch = [&](const std::vector<double>& ws) {
        std::vector<PointResult> results(ws.size());
        parallel_for(static_cast<int>(ws.size()), req.numerics.threads,
                     [&](int i) { results[i] = compute_point(req.model, ws[i], req.numerics); });
        for (std::size_t i = 0; i < ws.size(); ++i)
            points.emplace(ws[i], std::move(results[i]));
    };

    compute_batch(interior_grid(req.omega_min, req.omega_max, req.count));

    auto assemble_result = [&] {
        SweepResult r;
        for (auto& [w, pr] : points) {
            r.table.push_back(pr.entry);
            if (pr.slice) r.slices.push_back(*pr.slice);
        }
        fill_dq_domega(r.table);
        r.trajectories = track(r.slices, req.numerics.match_radius);
        r.events = detect_origin_collisions(r.trajectories, r.table);
        return r;
    };

    SweepResult result = assemble_result();

    if (req.adaptive && !result.events.empty()) {
        const double base_step = (req.omega_max - req.omega_min) / (req.count + 1);
        std::vector<double> extra;
        for (const CollisionEvent& ev : result.events) {
            for (double w = ev.omega_star - 0.05; w <= ev.omega_star + 0.05;
                 w += base_step / 3.0) {
                if (w <= req.omega_min || w >= req.omega_max) continue;
                bool present = false;
                for (const auto& [wk, _] : points)
                    if (std::abs(wk - w) < base_step / 8.0) {
                        present = true;
                        break;
                    }
                if (!present) extra.push_back(w);
            }
        }
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end(),
                                [&](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    extra.end());
        if (!extra.empty()) {
            compute_batch(extra);
            result = assemble_result();
        }
    }
    return result;
}

}  // namespace nlds
