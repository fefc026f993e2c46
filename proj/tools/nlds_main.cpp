// nlds — solitary waves of 1D self-interacting spinor models and the spectrum
// of their linearization.
//
// Subcommands:
//   profile    solve one wave, write profile + functional report
//   sweep      frequency sweep: functionals, spectra, branches, collisions
//   critical   locate omega_E (energy vanishing) and omega_VK (dQ/domega = 0)
//   jordan     kernel / Jordan-chain diagnostics at selected frequencies
//   reproduce  preset sweeps fig1..fig6
//
// Exit codes: 0 success, 2 invalid parameters/config, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "nlds/io.hpp"

using namespace nlds;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    ModelSpec model = make_model(ModelFamily::GN, 1.0);
    double omega_min = 0.0, omega_max = 0.0;  // 0/0 = pick per family
    int points = 200;
    bool adaptive = true;
    NumericsConfig numerics;
    fs::path out_dir = "out";
    bool want_csv = true, want_json = true;
};

void apply_config_file(RunConfig& cfg, const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot read config file: " + path.string());
    json j = json::parse(is);
    if (j.contains("model")) {
        const auto& m = j["model"];
        cfg.model = make_model(family_from_string(m.value("family", std::string("GN"))),
                               m.value("k", 1.0), m.value("m", 1.0));
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        cfg.omega_min = s.value("omega_min", cfg.omega_min);
        cfg.omega_max = s.value("omega_max", cfg.omega_max);
        cfg.points = s.value("count", cfg.points);
        cfg.adaptive = s.value("adaptive", cfg.adaptive);
    }
    if (j.contains("numerics")) {
        const auto& n = j["numerics"];
        cfg.numerics.M = n.value("M", cfg.numerics.M);
        if (n.contains("scheme")) cfg.numerics.scheme = scheme_from_string(n["scheme"]);
        if (n.contains("R") && !n["R"].is_null()) cfg.numerics.R = n["R"].get<double>();
        cfg.numerics.delta_omega = n.value("delta_omega", cfg.numerics.delta_omega);
        cfg.numerics.filter_tol = n.value("filter_tol", cfg.numerics.filter_tol);
        cfg.numerics.match_radius = n.value("match_radius", cfg.numerics.match_radius);
        cfg.numerics.band_tol = n.value("band_tol", cfg.numerics.band_tol);
        cfg.numerics.threads = n.value("threads", cfg.numerics.threads);
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
        if (o.contains("formats")) {
            cfg.want_csv = cfg.want_json = false;
            for (const auto& f : o["formats"]) {
                if (f == "csv") cfg.want_csv = true;
                if (f == "json") cfg.want_json = true;
            }
        }
    }
}

json config_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"family", to_string(cfg.model.family)}, {"k", cfg.model.k}, {"m", cfg.model.m}};
    j["sweep"] = {{"omega_min", cfg.omega_min},
                  {"omega_max", cfg.omega_max},
                  {"count", cfg.points},
                  {"adaptive", cfg.adaptive}};
    json num = {{"M", cfg.numerics.M},
                {"scheme", to_string(cfg.numerics.scheme)},
                {"delta_omega", cfg.numerics.delta_omega},
                {"filter_tol", cfg.numerics.filter_tol},
                {"match_radius", cfg.numerics.match_radius},
                {"band_tol", cfg.numerics.band_tol},
                {"threads", cfg.numerics.threads}};
    num["R"] = cfg.numerics.R ? json(*cfg.numerics.R) : json(nullptr);
    j["numerics"] = num;
    j["output"] = {{"dir", cfg.out_dir.string()},
                   {"formats", [&] {
                        json f = json::array();
                        if (cfg.want_csv) f.push_back("csv");
                        if (cfg.want_json) f.push_back("json");
                        return f;
                    }()}};
    return j;
}

std::string meta_line(const RunConfig& cfg) { return "config " + config_json(cfg).dump(); }

void default_range(RunConfig& cfg) {
    if (cfg.omega_min != 0.0 || cfg.omega_max != 0.0) return;
    // GN pure-power waves exist for omega in (0, m) only
    cfg.omega_min = cfg.model.family == ModelFamily::GN ? 0.0 : -cfg.model.m;
    cfg.omega_max = cfg.model.m;
}

std::pair<double, double> parse_range(const std::string& s, const char* what) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument(std::string(what) + " must be lo:hi, got " + s);
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

WaveProfile cached_profile(const RunConfig& cfg, double omega) {
    SolveOptions so = solve_options(cfg.numerics);
    const double R = so.R ? *so.R : default_domain_halfwidth(cfg.model, omega);
    so.R = R;
    const std::string key = profile_cache_key(cfg.model, omega, R, so.M, so.scheme);
    const fs::path cache = cfg.out_dir / "cache" / (key + ".bin");
    if (fs::exists(cache)) return read_profile_binary(cache);
    const WaveProfile p = solve_profile(cfg.model, omega, so);
    write_profile_binary(cache, p);
    return p;
}

int cmd_profile(const RunConfig& cfg, double omega, bool dump_operator) {
    const WaveProfile p = cached_profile(cfg, omega);
    const std::string key =
        profile_cache_key(cfg.model, omega, p.grid.R, p.grid.M, p.grid.scheme);

    if (cfg.want_csv) write_profile_csv(cfg.out_dir / (key + ".csv"), p, meta_line(cfg));
    if (dump_operator)
        write_operator_dump(cfg.out_dir / (key + "_operator.bin"),
                            assemble_JL(cfg.model, p, p.grid));

    FunctionalReport r = energy_terms(p);
    {
        SolveOptions so = solve_options(cfg.numerics);
        so.R = p.grid.R;
        const double dw = cfg.numerics.delta_omega;
        if (std::abs(omega) + dw < cfg.model.m) {
            auto q = [&](double w) { return charge(solve_profile(cfg.model, w, so)); };
            r.dQ_domega = (q(omega + dw) - q(omega - dw)) / (2.0 * dw);
        }
    }
    if (cfg.want_json) {
        json o;
        o["version"] = kArtifactVersion;
        o["config"] = config_json(cfg);
        o["omega"] = omega;
        o["Q"] = r.Q;
        o["K"] = r.K;
        o["M"] = r.M;
        o["V"] = r.V;
        o["E"] = r.E;
        o["L"] = r.L;
        o["dQ_domega"] = r.dQ_domega ? json(*r.dQ_domega) : json(nullptr);
        o["defect_virial1"] = r.defect_virial1;
        o["defect_virial2"] = r.defect_virial2;
        o["defect_KL"] = r.defect_KL;
        o["profile_residual"] = p.residual;
        o["first_integral_residual"] = first_integral_residual(p);
        o["s_sign_changes"] = p.s_sign_changes;
        std::ofstream os(cfg.out_dir / (key + "_functionals.json"));
        os << o.dump(2) << '\n';
    }
    std::cout << "omega = " << fmt(omega) << "  Q = " << fmt(r.Q) << "  E = " << fmt(r.E)
              << "\n"
              << "virial defects: |K+kV| = " << fmt(r.defect_virial1)
              << "  |wQ-M-V| = " << fmt(r.defect_virial2)
              << "  |K+L| = " << fmt(r.defect_KL) << "\n";
    return 0;
}

int cmd_sweep(RunConfig cfg) {
    default_range(cfg);
    SweepRequest req;
    req.model = cfg.model;
    req.omega_min = cfg.omega_min;
    req.omega_max = cfg.omega_max;
    req.count = cfg.points;
    req.adaptive = cfg.adaptive;
    req.numerics = cfg.numerics;
    req.numerics.cache_dir = (cfg.out_dir / "cache").string();
    const SweepResult res = run_sweep(req);

    const std::string meta = meta_line(cfg);
    if (cfg.want_csv) {
        write_sweep_csv(cfg.out_dir / "sweep.csv", res.table, meta);
        for (std::size_t i = 0; i < res.slices.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "spectra/slice_%04zu.csv", i);
            write_spectrum_csv(cfg.out_dir / name, res.slices[i], meta);
        }
        write_figure_data(cfg.out_dir, "figure", res, meta);
    }
    if (cfg.want_json) {
        write_trajectories_json(cfg.out_dir / "trajectories.json", res.trajectories, meta);
        write_events_json(cfg.out_dir / "events.json", res.events, meta);
    }

    int failures = 0;
    for (const auto& e : res.table)
        if (!e.ok) ++failures;
    std::cout << "sweep: " << res.table.size() << " points, " << res.slices.size()
              << " spectra, " << res.events.size() << " origin events";
    if (failures) std::cout << " (" << failures << " points failed)";
    std::cout << "\n";
    for (const auto& ev : res.events)
        std::cout << "  event at omega = " << fmt(ev.omega_star) << " ("
                  << (ev.emerging == CollisionEvent::Emerging::RealPair
                          ? "real pair"
                          : "imaginary pair")
                  << " on the lower side), nearest " << ev.crossref_type << " at "
                  << fmt(ev.crossref_value) << " (distance " << fmt(ev.crossref_distance)
                  << ")\n";
    return 0;
}

int cmd_critical(RunConfig cfg, std::string bracket_e, std::string bracket_vk,
                 const std::string& events_file) {
    default_range(cfg);
    CriticalSearchOptions opts;
    opts.solve = solve_options(cfg.numerics);
    opts.delta_omega = cfg.numerics.delta_omega;

    // auto-bracket from a coarse functional sweep when not given explicitly
    std::vector<SweepEntry> table;
    auto ensure_table = [&] {
        if (!table.empty()) return;
        table = sweep_functionals(cfg.model, interior_grid(cfg.omega_min, cfg.omega_max, 25),
                                  opts.solve);
    };

    json out;
    out["version"] = kArtifactVersion;
    out["config"] = config_json(cfg);

    auto run_one = [&](const char* name, const std::string& bracket, auto finder,
                       auto table_values) {
        json entry;
        try {
            double lo = 0, hi = 0;
            if (!bracket.empty()) {
                std::tie(lo, hi) = parse_range(bracket, name);
                entry["bracket"] = {lo, hi};
                entry["bracket_source"] = "user";
            } else {
                ensure_table();
                bool found = false;
                for (std::size_t i = 0; i + 1 < table.size() && !found; ++i) {
                    if (!table[i].ok || !table[i + 1].ok) continue;
                    const auto v0 = table_values(table[i]), v1 = table_values(table[i + 1]);
                    if (v0 && v1 && (*v0) * (*v1) < 0.0) {
                        lo = table[i].omega;
                        hi = table[i + 1].omega;
                        found = true;
                    }
                }
                if (!found) throw NoSignChange(std::string(name) + ": no sign change found");
                entry["bracket"] = {lo, hi};
                entry["bracket_source"] = "coarse sweep";
            }
            entry["value"] = finder(lo, hi);
        } catch (const NoSignChange& e) {
            entry["value"] = nullptr;
            entry["error"] = e.what();
        }
        return entry;
    };

    out["omega_E"] = run_one(
        "omega_E", bracket_e,
        [&](double lo, double hi) { return find_omega_E(cfg.model, lo, hi, opts); },
        [](const SweepEntry& e) { return std::optional<double>(e.report.E); });
    out["omega_VK"] = run_one(
        "omega_VK", bracket_vk,
        [&](double lo, double hi) { return find_omega_VK(cfg.model, lo, hi, opts); },
        [](const SweepEntry& e) { return e.report.dQ_domega; });

    // distance to origin collisions from a previous sweep, when provided
    if (!events_file.empty()) {
        std::ifstream is(events_file);
        if (!is) throw std::invalid_argument("cannot read events file: " + events_file);
        const json ev = json::parse(is);
        for (const char* name : {"omega_E", "omega_VK"}) {
            if (out[name]["value"].is_null()) continue;
            const double w = out[name]["value"].get<double>();
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : ev["events"])
                best = std::min(best, std::abs(e["omega_star"].get<double>() - w));
            if (std::isfinite(best)) out[name]["collision_distance"] = best;
        }
    }

    fs::create_directories(cfg.out_dir);
    std::ofstream os(cfg.out_dir / "critical.json");
    os << out.dump(2) << '\n';
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_jordan(const RunConfig& cfg, const std::vector<double>& omegas, bool with_lsq) {
    std::vector<JordanReport> reports;
    for (const double w : omegas) {
        SolveOptions so = solve_options(cfg.numerics);
        if (!so.R) so.R = default_domain_halfwidth(cfg.model, w);
        const WaveProfile p = solve_profile(cfg.model, w, so);
        const LinearizedOperator op = assemble_JL(cfg.model, p, p.grid);
        const OmegaDerivative d = d_omega_profile(cfg.model, w, cfg.numerics.delta_omega, so);
        const JordanReport r = jordan_report(op, p, d, with_lsq);
        reports.push_back(r);
        if (cfg.want_json) {
            char name[48];
            std::snprintf(name, sizeof(name), "jordan_w%.6f.json", w);
            write_jordan_json(cfg.out_dir / name, r);
        }
        std::cout << "omega = " << fmt(w) << "  c11 = " << fmt(r.c11)
                  << "  E = " << fmt(r.energy) << "  |c11-E| = " << fmt(r.c11_defect)
                  << "  vk_pairing = " << fmt(r.vk_pairing) << "\n";
    }
    if (cfg.want_csv) write_jordan_csv(cfg.out_dir / "jordan.csv", reports, meta_line(cfg));
    return 0;
}

int cmd_reproduce(RunConfig cfg, const std::string& fig) {
    struct Preset {
        ModelFamily family;
        std::vector<double> ks;
        double lo, hi;
    };
    Preset preset;
    if (fig == "fig1") preset = {ModelFamily::MTM, {0.5}, -1.0, 1.0};
    else if (fig == "fig2") preset = {ModelFamily::MTM, {1.0}, -1.0, 1.0};
    else if (fig == "fig3") preset = {ModelFamily::MTM, {2.0}, -1.0, 1.0};
    else if (fig == "fig4") preset = {ModelFamily::MTM, {3.0}, -1.0, 1.0};
    else if (fig == "fig5") preset = {ModelFamily::GN, {0.5, 1.0}, 0.0, 1.0};
    else if (fig == "fig6") preset = {ModelFamily::GN, {2.0, 3.0}, 0.0, 1.0};
    else throw std::invalid_argument("unknown figure preset: " + fig + " (use fig1..fig6)");

    const fs::path base = cfg.out_dir;
    for (const double k : preset.ks) {
        RunConfig sub = cfg;
        sub.model = make_model(preset.family, k, cfg.model.m);
        sub.omega_min = preset.lo;
        sub.omega_max = preset.hi;
        char dir[32];
        std::snprintf(dir, sizeof(dir), "%s_k%g", fig.c_str(), k);
        sub.out_dir = base / dir;
        std::cout << "== " << dir << " ==\n";
        cmd_sweep(sub);
    }
    return 0;
}

void emit_error(const RunConfig& cfg, const std::string& kind, const std::string& what) {
    json e;
    e["error"] = {{"kind", kind}, {"what", what}};
    std::cerr << e.dump() << "\n";
    try {
        fs::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "error.json");
        os << e.dump(2) << '\n';
    } catch (...) {
    }
}

}  // namespace

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);  // one eigensolve per worker thread

    RunConfig cfg;
    std::string config_file, family, scheme, range, formats, out_dir;
    double omega = 0.5;
    std::string bracket_e, bracket_vk, events_file, fig;
    std::vector<double> jordan_omegas;
    bool jordan_lsq = false;
    double k = 1.0, m = 1.0, domain_r = 0.0, delta_omega = 1e-4;
    int points = 200, grid_m = 512, threads = 0;
    bool adaptive = true;

    CLI::App app{"solitary waves and linear stability of 1D spinor field models"};
    app.require_subcommand(1);
    app.add_option("--config", config_file, "JSON config file (flags override)");
    auto* o_model = app.add_option("--model", family, "model family: MTM or GN");
    auto* o_k = app.add_option("--k", k, "nonlinearity exponent (> 0)");
    auto* o_m = app.add_option("--m", m, "mass (> 0)");
    auto* o_range = app.add_option("--omega-range", range, "sweep range lo:hi");
    auto* o_points = app.add_option("--points", points, "sweep point count");
    auto* o_gridm = app.add_option("--grid-m", grid_m, "grid points (Fourier: even)");
    auto* o_scheme = app.add_option("--scheme", scheme, "differentiation scheme: fourier or fd4");
    auto* o_domr = app.add_option("--domain-r", domain_r, "override the domain half-width R");
    auto* o_dw = app.add_option("--delta-omega", delta_omega, "omega-derivative step");
    auto* o_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* o_out = app.add_option("--out-dir", out_dir, "output directory");
    auto* o_fmt = app.add_option("--format", formats, "outputs: csv, json or csv,json");
    auto* o_adapt = app.add_flag("--adaptive,!--no-adaptive", adaptive, "refine sweep near events");

    auto* sp = app.add_subcommand("profile", "solve one solitary wave");
    sp->fallthrough();
    sp->add_option("--omega", omega, "frequency in (-m, m)")->required();
    bool dump_operator = false;
    sp->add_flag("--dump-operator", dump_operator,
                 "also write the dense linearization (binary)");

    auto* ssw = app.add_subcommand("sweep", "sweep frequencies: functionals + spectra");
    ssw->fallthrough();

    auto* scr = app.add_subcommand("critical", "locate omega_E and omega_VK");
    scr->fallthrough();
    scr->add_option("--bracket-e", bracket_e, "bracket lo:hi for the energy root");
    scr->add_option("--bracket-vk", bracket_vk, "bracket lo:hi for the charge-derivative root");
    scr->add_option("--events", events_file, "events.json from a sweep, for cross-reference");

    auto* sj = app.add_subcommand("jordan", "Jordan-chain diagnostics");
    sj->fallthrough();
    sj->add_option("--omegas", jordan_omegas, "frequencies (comma separated)")
        ->required()
        ->delimiter(',');
    sj->add_flag("--lsq", jordan_lsq, "include the gauge-chain solvability diagnostic");

    auto* sr = app.add_subcommand("reproduce", "preset figure sweeps");
    sr->fallthrough();
    sr->add_option("figure", fig, "fig1..fig6");
    sr->add_option("--reproduce", fig, "fig1..fig6 (same as the positional)");

    try {
        app.parse(argc, argv);
        if (!config_file.empty()) apply_config_file(cfg, config_file);
        // explicitly given flags override the config file
        if (o_model->count() || o_k->count() || o_m->count()) {
            cfg.model = make_model(
                o_model->count() ? family_from_string(family) : cfg.model.family,
                o_k->count() ? k : cfg.model.k, o_m->count() ? m : cfg.model.m);
        }
        if (o_points->count()) cfg.points = points;
        if (o_gridm->count()) cfg.numerics.M = grid_m;
        if (o_scheme->count()) cfg.numerics.scheme = scheme_from_string(scheme);
        if (o_domr->count() && domain_r > 0.0) cfg.numerics.R = domain_r;
        if (o_dw->count()) cfg.numerics.delta_omega = delta_omega;
        if (o_threads->count()) cfg.numerics.threads = threads;
        if (o_out->count()) cfg.out_dir = out_dir;
        if (o_adapt->count()) cfg.adaptive = adaptive;
        if (o_range->count())
            std::tie(cfg.omega_min, cfg.omega_max) = parse_range(range, "omega-range");
        if (o_fmt->count()) {
            cfg.want_csv = formats.find("csv") != std::string::npos;
            cfg.want_json = formats.find("json") != std::string::npos;
        }

        if (sp->parsed()) return cmd_profile(cfg, omega, dump_operator);
        if (ssw->parsed()) return cmd_sweep(cfg);
        if (scr->parsed()) return cmd_critical(cfg, bracket_e, bracket_vk, events_file);
        if (sj->parsed()) return cmd_jordan(cfg, jordan_omegas, jordan_lsq);
        if (sr->parsed()) {
            if (fig.empty()) throw std::invalid_argument("reproduce: missing figure (fig1..fig6)");
            return cmd_reproduce(cfg, fig);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        emit_error(cfg, "validation", e.what());
        return 2;
    } catch (const NumericalError& e) {
        emit_error(cfg, "numerical", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error(cfg, "internal", e.what());
        return 3;
    }
}
