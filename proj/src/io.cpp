#include "nlds/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace nlds {

using json = nlohmann::ordered_json;

namespace {

constexpr char kProfileMagic[8] = {'N', 'L', 'D', 'S', 'P', 'R', 'F', '1'};
constexpr char kOperatorMagic[8] = {'N', 'L', 'D', 'S', 'O', 'P', 'R', '1'};

void write_raw(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    write_raw(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

void write_meta(std::ofstream& os, const std::string& meta) {
    os << "# nlds " << kArtifactVersion << "\n";
    if (!meta.empty()) os << "# " << meta << "\n";
}

}  // namespace

std::string fmt(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string profile_cache_key(const ModelSpec& model, double omega, double R, int M,
                              Scheme scheme) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "profile_%s_k%.12g_m%.12g_w%.12g_R%.12g_M%d_%s",
                  to_string(model.family).c_str(), model.k, model.m, omega, R, M,
                  to_string(scheme).c_str());
    return buf;
}

void write_profile_binary(const fs::path& path, const WaveProfile& p) {
    auto os = open_out(path, true);
    write_raw(os, kProfileMagic, 8);
    write_pod<std::uint8_t>(os, p.model.family == ModelFamily::MTM ? 0 : 1);
    write_pod(os, p.model.k);
    write_pod(os, p.model.m);
    write_pod(os, p.omega);
    write_pod(os, p.grid.R);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(p.grid.M));
    write_pod<std::uint8_t>(os, p.grid.scheme == Scheme::Fourier ? 0 : 1);
    write_pod(os, p.kappa);
    write_pod(os, p.residual);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(p.s_sign_changes));
    write_raw(os, p.x.data(), sizeof(double) * p.grid.M);
    write_raw(os, p.v.data(), sizeof(double) * p.grid.M);
    write_raw(os, p.u.data(), sizeof(double) * p.grid.M);
}

WaveProfile read_profile_binary(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open profile file: " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kProfileMagic, 8) != 0)
        throw std::runtime_error("not a profile file: " + path.string());

    WaveProfile p;
    const auto fam = read_pod<std::uint8_t>(is);
    p.model.family = fam == 0 ? ModelFamily::MTM : ModelFamily::GN;
    p.model.k = read_pod<double>(is);
    p.model.m = read_pod<double>(is);
    p.omega = read_pod<double>(is);
    const double R = read_pod<double>(is);
    const auto M = read_pod<std::uint32_t>(is);
    const auto sch = read_pod<std::uint8_t>(is);
    p.grid = Grid(R, static_cast<int>(M), sch == 0 ? Scheme::Fourier : Scheme::FD4);
    p.kappa = read_pod<double>(is);
    p.residual = read_pod<double>(is);
    p.s_sign_changes = static_cast<int>(read_pod<std::uint32_t>(is));
    p.x.resize(M);
    p.v.resize(M);
    p.u.resize(M);
    is.read(reinterpret_cast<char*>(p.x.data()), sizeof(double) * M);
    is.read(reinterpret_cast<char*>(p.v.data()), sizeof(double) * M);
    is.read(reinterpret_cast<char*>(p.u.data()), sizeof(double) * M);
    if (!is) throw std::runtime_error("truncated profile file: " + path.string());
    return p;
}

void write_profile_csv(const fs::path& path, const WaveProfile& p, const std::string& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "x,v,u\n";
    for (int j = 0; j < p.grid.M; ++j)
        os << fmt(p.x[j]) << ',' << fmt(p.v[j]) << ',' << fmt(p.u[j]) << '\n';
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepEntry>& table,
                     const std::string& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "omega,Q,K,M,V,E,L,dQ_domega,defect_virial1,defect_virial2,defect_KL\n";
    for (const SweepEntry& e : table) {
        if (!e.ok) {
            os << fmt(e.omega) << ",,,,,,,,,,\n";
            continue;
        }
        const FunctionalReport& r = e.report;
        os << fmt(e.omega) << ',' << fmt(r.Q) << ',' << fmt(r.K) << ',' << fmt(r.M) << ','
           << fmt(r.V) << ',' << fmt(r.E) << ',' << fmt(r.L) << ','
           << (r.dQ_domega ? fmt(*r.dQ_domega) : std::string()) << ','
           << fmt(r.defect_virial1) << ',' << fmt(r.defect_virial2) << ','
           << fmt(r.defect_KL) << '\n';
    }
}

void write_spectrum_csv(const fs::path& path, const SpectrumSlice& slice,
                        const std::string& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "re_lambda,im_lambda,parity,retained,near_band\n";
    for (int j = 0; j < slice.size(); ++j)
        os << fmt(slice.eigenvalues[j].real()) << ',' << fmt(slice.eigenvalues[j].imag())
           << ',' << to_string(slice.parities[j]) << ',' << (slice.retained[j] ? 1 : 0)
           << ',' << (slice.near_band[j] ? 1 : 0) << '\n';
}

namespace {

json event_to_json(const CollisionEvent& ev) {
    json e;
    e["omega_star"] = ev.omega_star;
    e["kind"] = ev.kind == CollisionEvent::Kind::OriginCollision ? "origin_collision"
                                                                 : "origin_birth";
    e["emerging"] = ev.emerging == CollisionEvent::Emerging::RealPair ? "real_pair"
                                                                      : "imaginary_pair";
    e["branch_id"] = ev.branch_id;
    e["crossref"] = {{"type", ev.crossref_type},
                     {"value", ev.crossref_value},
                     {"distance", ev.crossref_distance}};
    return e;
}

}  // namespace

void write_trajectories_json(const fs::path& path,
                             const std::vector<EigenTrajectory>& trajectories,
                             const std::string& meta) {
    json root;
    root["version"] = kArtifactVersion;
    if (!meta.empty()) root["config"] = meta;
    root["branches"] = json::array();
    for (const EigenTrajectory& tr : trajectories) {
        json b;
        b["id"] = tr.id;
        b["parity"] = to_string(tr.parity);
        b["samples"] = json::array();
        for (const TrajectorySample& s : tr.samples)
            b["samples"].push_back({{"omega", s.omega},
                                    {"re", s.lambda.real()},
                                    {"im", s.lambda.imag()}});
        if (!tr.split_omegas.empty()) b["split_omegas"] = tr.split_omegas;
        root["branches"].push_back(std::move(b));
    }
    auto os = open_out(path);
    os << root.dump(2) << '\n';
}

void write_events_json(const fs::path& path, const std::vector<CollisionEvent>& events,
                       const std::string& meta) {
    json root;
    root["version"] = kArtifactVersion;
    if (!meta.empty()) root["config"] = meta;
    root["events"] = json::array();
    for (const CollisionEvent& ev : events) root["events"].push_back(event_to_json(ev));
    auto os = open_out(path);
    os << root.dump(2) << '\n';
}

std::string jordan_report_json(const JordanReport& r) {
    json j;
    j["version"] = kArtifactVersion;
    j["omega"] = r.omega;
    j["residual_kernel_U1"] = r.residual_kernel_U1;
    j["residual_kernel_tr"] = r.residual_kernel_tr;
    j["residual_chain_U1"] = r.residual_chain_U1;
    j["residual_chain_tr"] = r.residual_chain_tr;
    j["vk_pairing"] = r.vk_pairing;
    j["cross_orthogonality"] = r.cross_orthogonality;
    j["c11"] = r.c11;
    j["energy"] = r.energy;
    j["c11_defect"] = r.c11_defect;
    j["u1_lsq_residual"] = r.u1_lsq_residual;
    return j.dump(2);
}

void write_jordan_json(const fs::path& path, const JordanReport& r) {
    auto os = open_out(path);
    os << jordan_report_json(r) << '\n';
}

void write_jordan_csv(const fs::path& path, const std::vector<JordanReport>& rows,
                      const std::string& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "omega,residual_kernel_U1,residual_kernel_tr,residual_chain_U1,"
          "residual_chain_tr,vk_pairing,cross_orthogonality,c11,energy,defect,"
          "u1_lsq_residual\n";
    for (const JordanReport& r : rows)
        os << fmt(r.omega) << ',' << fmt(r.residual_kernel_U1) << ','
           << fmt(r.residual_kernel_tr) << ',' << fmt(r.residual_chain_U1) << ','
           << fmt(r.residual_chain_tr) << ',' << fmt(r.vk_pairing) << ','
           << fmt(r.cross_orthogonality) << ',' << fmt(r.c11) << ',' << fmt(r.energy)
           << ',' << fmt(r.c11_defect) << ',' << fmt(r.u1_lsq_residual) << '\n';
}

void write_operator_dump(const fs::path& path, const LinearizedOperator& op) {
    auto os = open_out(path, true);
    write_raw(os, kOperatorMagic, 8);
    write_pod<std::uint8_t>(os, op.model.family == ModelFamily::MTM ? 0 : 1);
    write_pod(os, op.model.k);
    write_pod(os, op.model.m);
    write_pod(os, op.omega);
    write_pod(os, op.grid.R);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(op.grid.M));
    write_pod<std::uint8_t>(os, op.grid.scheme == Scheme::Fourier ? 0 : 1);
    const MatrixXd A = op.dense_A();
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) write_pod(os, A(i, j));
}

void write_figure_data(const fs::path& dir, const std::string& stem,
                       const SweepResult& result, const std::string& meta) {
    {
        auto os = open_out(dir / (stem + "_functionals.csv"));
        write_meta(os, meta);
        os << "omega,E,Q\n";
        for (const SweepEntry& e : result.table)
            if (e.ok)
                os << fmt(e.omega) << ',' << fmt(e.report.E) << ',' << fmt(e.report.Q) << '\n';
    }
    {
        auto os = open_out(dir / (stem + "_spectrum.csv"));
        write_meta(os, meta);
        os << "omega,im_lambda,parity,near_band\n";
        for (const SpectrumSlice& s : result.slices)
            for (int j = 0; j < s.size(); ++j) {
                if (!s.retained[j]) continue;
                const Complex z = s.eigenvalues[j];
                if (z.imag() <= 0.0 || std::abs(z.real()) > 1e-6) continue;
                os << fmt(s.omega) << ',' << fmt(z.imag()) << ','
                   << to_string(s.parities[j]) << ',' << (s.near_band[j] ? 1 : 0) << '\n';
            }
    }
    {
        auto os = open_out(dir / (stem + "_band_edges.csv"));
        write_meta(os, meta);
        os << "omega,edge_lower,edge_upper\n";
        for (const SpectrumSlice& s : result.slices)
            os << fmt(s.omega) << ',' << fmt(s.band_edges[0]) << ',' << fmt(s.band_edges[1])
               << '\n';
    }
}

}  // namespace nlds
