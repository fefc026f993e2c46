#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlds/io.hpp"

using namespace nlds;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "nlds_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("profile binary round trip is exact and deterministic") {
    TempDir tmp;
    const auto model = make_model(ModelFamily::MTM, 0.5);
    const WaveProfile p = solve_profile(model, -0.6, {.M = 128});

    const fs::path f1 = tmp.path / "a.bin";
    const fs::path f2 = tmp.path / "b.bin";
    write_profile_binary(f1, p);
    write_profile_binary(f2, p);
    CHECK(slurp(f1) == slurp(f2));

    const WaveProfile q = read_profile_binary(f1);
    CHECK(q.model.family == p.model.family);
    CHECK(q.model.k == p.model.k);
    CHECK(q.omega == p.omega);
    CHECK(q.grid.M == p.grid.M);
    CHECK(q.grid.R == p.grid.R);
    CHECK((q.v - p.v).norm() == 0.0);
    CHECK((q.u - p.u).norm() == 0.0);
    CHECK((q.x - p.x).norm() == 0.0);

    CHECK_THROWS(read_profile_binary(tmp.path / "missing.bin"));
}

TEST_CASE("cache key encodes the profile identity") {
    const auto model = make_model(ModelFamily::GN, 0.5);
    const std::string key = profile_cache_key(model, 0.25, 30.0, 512, Scheme::Fourier);
    CHECK(key == "profile_GN_k0.5_m1_w0.25_R30_M512_fourier");
    CHECK(profile_cache_key(model, 0.25, 30.0, 512, Scheme::FD4) != key);
}

TEST_CASE("profile CSV carries metadata header and data rows") {
    TempDir tmp;
    const auto model = make_model(ModelFamily::GN, 1.0);
    const WaveProfile p = solve_profile(model, 0.5, {.M = 128});
    const fs::path f = tmp.path / "p.csv";
    write_profile_csv(f, p, "model=GN k=1 omega=0.5");
    const std::string text = slurp(f);
    CHECK(text.starts_with("# nlds "));
    CHECK(text.find("x,v,u\n") != std::string::npos);
    // one row per node plus two comment lines and the column header
    CHECK(std::count(text.begin(), text.end(), '\n') == 128 + 3);
}

TEST_CASE("sweep and jordan CSV shapes") {
    TempDir tmp;
    std::vector<SweepEntry> table(2);
    table[0].omega = -0.5;
    table[0].ok = true;
    table[0].report.Q = 1.5;
    table[0].report.dQ_domega = -0.25;
    table[1].omega = -0.4;
    table[1].ok = false;
    table[1].error = "diverged";
    const fs::path f = tmp.path / "sweep.csv";
    write_sweep_csv(f, table);
    const std::string text = slurp(f);
    CHECK(text.find("omega,Q,K,M,V,E,L,dQ_domega,defect_virial1,defect_virial2,defect_KL") !=
          std::string::npos);
    CHECK(text.find("-0.5,1.5,0,0,0,0,0,-0.25,0,0,0") != std::string::npos);
    CHECK(text.find("-0.4,,,,,,,,,,") != std::string::npos);

    JordanReport r;
    r.omega = 0.5;
    r.c11 = 1.25;
    write_jordan_csv(tmp.path / "j.csv", {r});
    CHECK(slurp(tmp.path / "j.csv").find("0.5,0,0,0,0,0,0,1.25,0,0,0") != std::string::npos);

    const std::string js = jordan_report_json(r);
    CHECK(js.find("\"c11\": 1.25") != std::string::npos);
}

TEST_CASE("spectrum CSV and trajectory/event JSON") {
    TempDir tmp;
    SpectrumSlice s;
    s.omega = 0.5;
    s.eigenvalues = {{0.0, 1.0}, {0.1, -0.2}};
    s.parities = {Parity::Odd, Parity::Even};
    s.retained = {true, false};
    s.near_band = {false, true};
    write_spectrum_csv(tmp.path / "s.csv", s);
    const std::string text = slurp(tmp.path / "s.csv");
    CHECK(text.find("re_lambda,im_lambda,parity,retained,near_band") != std::string::npos);
    CHECK(text.find("0,1,odd,1,0") != std::string::npos);
    CHECK(text.find("0.1,-0.2,even,0,1") != std::string::npos);

    EigenTrajectory tr;
    tr.id = 0;
    tr.parity = Parity::Odd;
    tr.samples = {{-0.8, {0.3, 0.0}}, {-0.7, {0.1, 0.0}}};
    write_trajectories_json(tmp.path / "t.json", {tr});
    CHECK(slurp(tmp.path / "t.json").find("\"parity\": \"odd\"") != std::string::npos);

    CollisionEvent ev;
    ev.omega_star = -0.63;
    ev.crossref_type = "omega_E";
    ev.crossref_value = -0.6276;
    ev.crossref_distance = 0.002;
    write_events_json(tmp.path / "e.json", {ev});
    const std::string etext = slurp(tmp.path / "e.json");
    CHECK(etext.find("\"kind\": \"origin_collision\"") != std::string::npos);
    CHECK(etext.find("\"omega_E\"") != std::string::npos);
}

TEST_CASE("slice cache round trip") {
    TempDir tmp;
    SpectrumSlice s;
    s.omega = -0.63;
    s.grid_M = 128;
    s.band_edges = {0.37, 1.63};
    s.eps_disc = 3.2e-5;
    s.filtered = true;
    s.eigenvalues = {{0.42, 0.0}, {0.0, 0.8}, {1e-3, -2e-3}};
    s.parities = {Parity::Odd, Parity::Even, Parity::Odd};
    s.retained = {true, true, false};
    s.near_band = {false, true, false};
    const std::string path = (tmp.path / "s.bin").string();
    write_slice_binary(path, s);
    const SpectrumSlice q = read_slice_binary(path);
    CHECK(q.omega == s.omega);
    CHECK(q.grid_M == s.grid_M);
    CHECK(q.eps_disc == s.eps_disc);
    CHECK(q.filtered == s.filtered);
    REQUIRE(q.size() == s.size());
    for (int j = 0; j < s.size(); ++j) {
        CHECK(q.eigenvalues[j] == s.eigenvalues[j]);
        CHECK(q.parities[j] == s.parities[j]);
        CHECK(q.retained[j] == s.retained[j]);
        CHECK(q.near_band[j] == s.near_band[j]);
    }
}

TEST_CASE("operator dump header and size") {
    TempDir tmp;
    const auto model = make_model(ModelFamily::GN, 1.0);
    const Grid g(30.0, 64, Scheme::Fourier);
    const LinearizedOperator op = assemble_JL_zero(model, 0.2, g);
    const fs::path f = tmp.path / "op.bin";
    write_operator_dump(f, op);
    const auto bytes = fs::file_size(f);
    const std::size_t header = 8 + 1 + 8 * 4 + 4 + 1;
    CHECK(bytes == header + sizeof(double) * 256 * 256);
}
