#include <doctest.h>

#include <cmath>

#include "nlds/functionals.hpp"
#include "nlds/profile.hpp"
#include "support/closed_form.hpp"

using namespace nlds;

TEST_CASE("stationary system hand values") {
    const auto gn = make_model(ModelFamily::GN, 1.0);
    const auto mtm = make_model(ModelFamily::MTM, 1.0);

    // GN k=1, omega=0.5 at (v,u) = (1,0): s = 1, f = 1
    const auto rhs_gn = stationary_system(gn, 0.5);
    const Eigen::Vector2d d1 = rhs_gn({1.0, 0.0});
    CHECK(d1[0] == doctest::Approx(0.0));       // v'
    CHECK(d1[1] == doctest::Approx(0.5));       // u' = (w - m + f) v

    // fixed point at the origin
    CHECK(rhs_gn({0.0, 0.0}).norm() == 0.0);
    CHECK(stationary_system(mtm, 0.3)(Eigen::Vector2d{0.0, 0.0}).norm() == 0.0);

    // MTM k=1, omega=0 at (1,0): u' = (0 - 1 + 1) v = 0
    const auto rhs_mtm = stationary_system(mtm, 0.0);
    const Eigen::Vector2d d2 = rhs_mtm({1.0, 0.0});
    CHECK(d2[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(stationary_system(gn, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(stationary_system(gn, -1.5), std::invalid_argument);
}

TEST_CASE("initial amplitude formula") {
    const auto gn = make_model(ModelFamily::GN, 1.0);
    CHECK(initial_amplitude(gn, 0.5) == doctest::Approx(1.0));
    CHECK(initial_amplitude(gn, 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(initial_amplitude(gn, 0.9) == doctest::Approx(std::sqrt(0.2)));  // ~0.4472
    CHECK(initial_amplitude(gn, 0.999) < 0.05);  // vanishes toward the gap edge
    CHECK_THROWS_AS(initial_amplitude(gn, 1.0), std::invalid_argument);
}

TEST_CASE("profile parity, tails and first integral") {
    for (const auto& [family, k, w] :
         {std::tuple{ModelFamily::GN, 1.0, 0.5}, {ModelFamily::GN, 3.0, 0.7},
          {ModelFamily::MTM, 0.5, -0.6}, {ModelFamily::MTM, 2.0, 0.3}}) {
        const auto model = make_model(family, k);
        const WaveProfile p = solve_profile(model, w, {.M = 256});
        const double vmax = p.max_abs_v();

        double parity_defect = 0.0;
        for (int j = 0; j < p.grid.M; ++j) {
            const int r = p.grid.reflect(j);
            parity_defect = std::max(parity_defect, std::abs(p.v[j] - p.v[r]));
            parity_defect = std::max(parity_defect, std::abs(p.u[j] + p.u[r]));
        }
        CHECK(parity_defect <= 1e-10 * vmax);

        CHECK(std::abs(p.v[0]) + std::abs(p.u[0]) <= 1e-10 * vmax);
        CHECK(first_integral_residual(p) <= 1e-9);
        CHECK(p.residual <= 1e-8);
        CHECK(p.v[p.grid.M / 2] == doctest::Approx(initial_amplitude(model, w)));
    }
}

TEST_CASE("first integral residual reacts to perturbations") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    WaveProfile p = solve_profile(model, 0.5, {.M = 256});
    CHECK(first_integral_residual(p) <= 1e-9);
    p.v[p.grid.M / 2 + 10] += 1e-3;  // interior node
    CHECK(first_integral_residual(p) >= 1e-4);
}

TEST_CASE("tail decay rate matches sqrt(m^2 - omega^2)") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    const WaveProfile p = solve_profile(model, 0.5, {.M = 512});
    // fit |v| ~ C exp(-kappa x) on R/2 <= x <= 3R/4 by least squares in log space
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int j = 0; j < p.grid.M; ++j) {
        const double x = p.x[j];
        if (x < 0.5 * p.grid.R || x > 0.75 * p.grid.R) continue;
        if (std::abs(p.v[j]) < 1e-200) continue;
        const double ly = std::log(std::abs(p.v[j]));
        sx += x; sy += ly; sxx += x * x; sxy += x * ly;
        ++n;
    }
    REQUIRE(n > 10);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(-slope - p.kappa) <= 0.02 * p.kappa);
}

TEST_CASE("MTM density matches the separable-quadrature solution") {
    for (const auto& [k, w] : {std::pair{1.0, 0.5}, {0.5, -0.6}, {2.0, -0.3}}) {
        const auto model = make_model(ModelFamily::MTM, k);
        const WaveProfile p = solve_profile(model, w, {.M = 512});
        double err = 0.0;
        for (int j = 0; j < p.grid.M; ++j) {
            const double rho = p.v[j] * p.v[j] + p.u[j] * p.u[j];
            err = std::max(err, std::abs(rho - testing::mtm_rho_exact(model, w, p.x[j])));
        }
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("GN components match the closed form") {
    for (const auto& [k, w] : {std::pair{1.0, 0.5}, {3.0, 0.7}, {0.5, 0.2}}) {
        const auto model = make_model(ModelFamily::GN, k);
        const WaveProfile p = solve_profile(model, w, {.M = 512});
        double err = 0.0;
        for (int j = 0; j < p.grid.M; ++j) {
            const auto vu = testing::gn_vu_exact(model, w, p.x[j]);
            err = std::max({err, std::abs(p.v[j] - vu.v), std::abs(p.u[j] - vu.u)});
        }
        CHECK(err <= 1e-6);
        CHECK(p.s_sign_changes == 0);  // s stays positive for pure powers
    }
}

TEST_CASE("integrated transverse current vanishes") {
    const auto model = make_model(ModelFamily::MTM, 1.0);
    const WaveProfile p = solve_profile(model, 0.4, {.M = 256});
    const Eigen::VectorXd w = p.grid.quad_weights();
    double j1 = 0.0;
    for (int j = 0; j < p.grid.M; ++j)
        j1 += w[j] * current_j1(Vector4d{p.v[j], 0.0, 0.0, p.u[j]});
    CHECK(std::abs(j1) <= 1e-12);
}

TEST_CASE("gap-edge and divergence failures") {
    const auto gn = make_model(ModelFamily::GN, 1.0);
    CHECK_THROWS_AS(solve_profile(gn, 1.0), std::invalid_argument);
    // no decaying GN wave at omega <= 0 for pure powers: the orbit escapes
    CHECK_THROWS_AS(solve_profile(gn, -0.5), IntegrationDiverged);
    // domain too small to hold the tail below the floor
    CHECK_THROWS_AS(solve_profile(gn, 0.99, {.M = 128, .R = 5.0}), IntegrationDiverged);
}

TEST_CASE("omega derivative: VK pairing consistency and Richardson order") {
    const auto model = make_model(ModelFamily::GN, 1.0);
    const double w = 0.5, dw = 1e-3;
    SolveOptions opts{.M = 256};
    opts.R = default_domain_halfwidth(model, w);

    const OmegaDerivative d = d_omega_profile(model, w, dw, opts);
    const WaveProfile p = solve_profile(model, w, opts);
    const Eigen::VectorXd qw = p.grid.quad_weights();
    const double pairing =
        (qw.array() * (d.dv.array() * p.v.array() + d.du.array() * p.u.array())).sum();

    auto Q = [&](double omega) { return charge(solve_profile(model, omega, opts)); };
    const double dQ = (Q(w + dw) - Q(w - dw)) / (2.0 * dw);
    CHECK(pairing == doctest::Approx(0.5 * dQ).epsilon(1e-5));

    // centered differences are second order: quarter the defect when dw halves
    const OmegaDerivative ref = d_omega_profile(model, w, 1e-5, opts);
    const OmegaDerivative d2 = d_omega_profile(model, w, dw / 2, opts);
    const double e1 = (d.dv - ref.dv).cwiseAbs().maxCoeff();
    const double e2 = (d2.dv - ref.dv).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));

    // Richardson extrapolation beats both
    const OmegaDerivative dr = d_omega_profile(model, w, dw, opts, true);
    CHECK((dr.dv - ref.dv).cwiseAbs().maxCoeff() < 0.05 * e2);
}

TEST_CASE("sign-flip companion system") {
    // A solitary wave of the pure-power GN model at omega maps to a solitary
    // wave of the companion model (alpha, beta, f) -> (-alpha, -beta, f(-s))
    // at -omega; on (v, u) profiles this is the swap (v, u, omega) ->
    // (u, v, -omega) with the flipped-sign nonlinearity.
    const auto model = make_model(ModelFamily::GN, 2.0);
    const double w = 0.6, m = model.m, k = model.k;
    const auto rhs = stationary_system(model, w);

    auto rhs_flipped = [&](double v, double u, double omega) {
        const double s = v * v - u * u;
        const double fhat = -std::copysign(std::pow(std::abs(s), k), s);  // f(-s)
        return Eigen::Vector2d{-(omega + m - fhat) * u, (omega - m + fhat) * v};
    };

    for (const auto& [v, u] : {std::pair{0.9, 0.3}, {0.4, -0.2}, {1.2, 0.7}}) {
        const Eigen::Vector2d orig = rhs({v, u});          // (v', u')
        const Eigen::Vector2d flip = rhs_flipped(u, v, -w);
        // swapped solution: tilde v = u, tilde u = v, so tilde v' = u', tilde u' = v'
        CHECK(flip[0] == doctest::Approx(orig[1]).epsilon(1e-12));
        CHECK(flip[1] == doctest::Approx(orig[0]).epsilon(1e-12));
    }
}
