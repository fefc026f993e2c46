#include <doctest.h>

#include <cmath>

#include "nlds/functionals.hpp"
#include "nlds/sweep.hpp"
#include "support/closed_form.hpp"

using namespace nlds;

namespace {

WaveProfile zero_profile(const ModelSpec& model, double omega) {
    WaveProfile p;
    p.model = model;
    p.omega = omega;
    p.grid = Grid(30.0, 128, Scheme::Fourier);
    p.x = p.grid.points();
    p.v = Eigen::VectorXd::Zero(128);
    p.u = Eigen::VectorXd::Zero(128);
    p.kappa = std::sqrt(model.m * model.m - omega * omega);
    return p;
}

}  // namespace

TEST_CASE("charge basics") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    CHECK(charge(zero_profile(model, 0.5)) == 0.0);
    CHECK(charge(solve_profile(model, 0.5, {.M = 256})) > 0.0);
}

TEST_CASE("charge agrees with quadrature of the closed-form profile") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    const double w = 0.9;
    // independent trapezoid quadrature of the separable-quadrature density
    const double R = 75.0;
    const int N = 300001;
    const double h = 2.0 * R / (N - 1);
    double q_oracle = 0.0;
    for (int i = 0; i < N; ++i) {
        const double x = -R + i * h;
        const double s = testing::gn_s_exact(model, w, x);
        const double rho = s * (model.m - std::pow(s, model.k) / (model.k + 1.0)) / w;
        q_oracle += ((i == 0 || i == N - 1) ? 0.5 : 1.0) * h * rho;
    }
    const double q = charge(solve_profile(model, w, {.M = 512}));
    CHECK(std::abs(q - q_oracle) <= 1e-6 * q_oracle);
}

TEST_CASE("energy terms: zero profile and positivity") {
    const auto gn = make_model(ModelFamily::GN, 2.0);
    const FunctionalReport z = energy_terms(zero_profile(gn, 0.3));
    CHECK(z.Q == 0.0);
    CHECK(z.K == 0.0);
    CHECK(z.M == 0.0);
    CHECK(z.V == 0.0);
    CHECK(z.E == 0.0);

    for (const double k : {0.5, 1.0, 2.0, 3.0}) {
        const auto model = make_model(ModelFamily::GN, k);
        const FunctionalReport r = energy_terms(solve_profile(model, 0.5, {.M = 256}));
        CHECK(r.E > 0.0);  // positive energy for omega > 0
        CHECK(r.E == doctest::Approx(r.K + r.M + r.V));
        CHECK(r.L == doctest::Approx(-r.E + 0.5 * r.Q));
    }
}

TEST_CASE("virial identities on converged profiles") {
    // the k = 2 profile has the narrowest analyticity strip of the four; it
    // needs the doubled grid before differentiation truncation reaches 1e-6
    for (const auto& [family, k, w, M] :
         {std::tuple{ModelFamily::GN, 1.0, 0.5, 512}, {ModelFamily::MTM, 2.0, -0.5, 1024},
          {ModelFamily::MTM, 0.5, -0.6, 512}, {ModelFamily::GN, 3.0, 0.8, 512}}) {
        const auto model = make_model(family, k);
        const FunctionalReport r = energy_terms(solve_profile(model, w, {.M = M}));
        CHECK(r.defect_virial1 <= 1e-6 * std::max(std::abs(r.K), 1.0));
        CHECK(r.defect_virial2 <= 1e-6 * std::max(std::abs(w * r.Q), 1.0));
        CHECK(r.defect_KL <= 1e-6 * std::max(std::abs(r.K), 1.0));
    }
    const FunctionalReport z =
        virial_report(zero_profile(make_model(ModelFamily::GN, 1.0), 0.4));
    CHECK(z.defect_virial1 == 0.0);
    CHECK(z.defect_virial2 == 0.0);
    CHECK(z.defect_KL == 0.0);
}

TEST_CASE("virial defects shrink under grid refinement") {
    // |K + kV| mixes the differentiation and quadrature routes and converges
    // at the scheme's rate; |omega Q - M - V| is the integral of the pointwise
    // first integral and sits at the solver floor at any resolution
    const auto model = make_model(ModelFamily::MTM, 2.0);
    const double w = -0.5;
    SolveOptions lo{.M = 128}, mid{.M = 256}, hi{.M = 512};
    lo.R = mid.R = hi.R = default_domain_halfwidth(model, w);
    const FunctionalReport a = energy_terms(solve_profile(model, w, lo));
    const FunctionalReport b = energy_terms(solve_profile(model, w, mid));
    const FunctionalReport c = energy_terms(solve_profile(model, w, hi));
    REQUIRE(a.defect_virial1 > 1e-3);
    CHECK(b.defect_virial1 < 0.25 * a.defect_virial1);
    CHECK(c.defect_virial1 < 0.25 * b.defect_virial1);
    CHECK(a.defect_virial2 < 1e-8);
    CHECK(c.defect_virial2 < 1e-8);
}

TEST_CASE("functional sweep: sign structure and dQ column") {
    const auto mtm = make_model(ModelFamily::MTM, 0.5);
    const auto table = sweep_functionals(mtm, interior_grid(-0.98, 0.98, 25), {.M = 256});

    int sign_changes = 0;
    double change_at = 0.0;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (!table[i].ok || !table[i + 1].ok) continue;
        if (table[i].report.E * table[i + 1].report.E < 0.0) {
            ++sign_changes;
            change_at = table[i].omega;
        }
    }
    CHECK(sign_changes == 1);
    CHECK(change_at > -1.0);
    CHECK(change_at < 0.0);

    const auto gn = make_model(ModelFamily::GN, 1.0);
    const auto gtable = sweep_functionals(gn, interior_grid(0.0, 1.0, 15), {.M = 256});
    for (const auto& e : gtable) {
        REQUIRE(e.ok);
        CHECK(e.report.E > 0.0);
    }
    // interior points carry centered dQ/domega
    CHECK(gtable[5].report.dQ_domega.has_value());

    const auto single = sweep_functionals(gn, {0.5}, {.M = 128});
    CHECK(single.size() == 1);
    CHECK_FALSE(single[0].report.dQ_domega.has_value());
}

TEST_CASE("find_omega_E") {
    const auto mtm_half = make_model(ModelFamily::MTM, 0.5);
    const double wE = find_omega_E(mtm_half, -0.9, -0.3, {.solve = {.M = 384}});
    CHECK(std::abs(wE + 0.6276) <= 0.005);

    const auto gn3 = make_model(ModelFamily::GN, 3.0);
    CHECK_THROWS_AS(find_omega_E(gn3, 0.1, 0.9, {.solve = {.M = 128}}), NoSignChange);

    const auto mtm2 = make_model(ModelFamily::MTM, 2.0);
    const double wE2 = find_omega_E(mtm2, -0.995, -0.1, {.solve = {.M = 384}});
    CHECK(wE2 > -1.0);
    CHECK(wE2 < 0.0);
}

TEST_CASE("find_omega_VK") {
    const auto gn3 = make_model(ModelFamily::GN, 3.0);
    const double wVK = find_omega_VK(gn3, 0.3, 0.99, {.solve = {.M = 256}});
    CHECK(wVK > 0.0);
    CHECK(wVK < 1.0);

    const auto mtm3 = make_model(ModelFamily::MTM, 3.0);
    const double wVKm = find_omega_VK(mtm3, 0.1, 0.9, {.solve = {.M = 256}});
    CHECK(wVKm > 0.0);
    CHECK(wVKm < 1.0);

    const auto gn1 = make_model(ModelFamily::GN, 1.0);
    CHECK_THROWS_AS(find_omega_VK(gn1, 0.1, 0.9, {.solve = {.M = 128}}), NoSignChange);
}

TEST_CASE("sweep dQ/domega is consistent with the pairing derivative") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    const double w = 0.5, dw = 1e-3;
    SolveOptions opts{.M = 256};
    opts.R = default_domain_halfwidth(model, w);

    auto Q = [&](double omega) { return charge(solve_profile(model, omega, opts)); };
    const double dQ_fd = (Q(w + dw) - Q(w - dw)) / (2.0 * dw);

    const OmegaDerivative d = d_omega_profile(model, w, dw, opts);
    const WaveProfile p = solve_profile(model, w, opts);
    const Eigen::VectorXd qw = p.grid.quad_weights();
    const double pairing =
        (qw.array() * (d.dv.array() * p.v.array() + d.du.array() * p.u.array())).sum();
    CHECK(2.0 * pairing == doctest::Approx(dQ_fd).epsilon(1e-5));
}
