#include "nlds/profile.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nlds {

namespace {

using Eigen::Vector2d;

// Gradient of the first integral H(v, u); the stationary flow is the
// Hamiltonian flow (v', u') = (-H_u, H_v)/2.
Vector2d grad_H(const ModelSpec& model, double omega, double v, double u) {
    const double m = model.m;
    if (model.family == ModelFamily::MTM) {
        const double rho = v * v + u * u;
        const double rk = rho > 0.0 ? std::pow(rho, model.k) : 0.0;
        return {2.0 * v * (omega + rk - m), 2.0 * u * (omega + rk + m)};
    }
    const double s = v * v - u * u;
    const double fs = s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), model.k), s);
    return {2.0 * v * (omega - m + fs), 2.0 * u * (omega + m - fs)};
}

void check_gap(const ModelSpec& model, double omega) {
    if (!(std::abs(omega) < model.m))
        throw std::invalid_argument("omega = " + std::to_string(omega) +
                                    " is outside the spectral gap (-m, m)");
}

struct DenseStep {
    double x0, x1;
    Vector2d y0, y1, f0, f1;

    Vector2d eval(double x) const {
        const double d = x1 - x0;
        const double t = (x - x0) / d;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d * f0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d * f1;
    }
    Vector2d eval_deriv(double x) const {
        const double d = x1 - x0;
        const double t = (x - x0) / d;
        return (6 * t * t - 6 * t) / d * (y0 - y1) + (3 * t * t - 4 * t + 1) * f0 +
               (3 * t * t - 2 * t) * f1;
    }
};

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

struct HalfOrbit {
    std::vector<DenseStep> steps;
    double x_end = 0.0;        // where integration stopped (state ~ 0 beyond)
    double residual = 0.0;     // max mid-step equation defect
};

// Integrate from (v0, 0) at x = 0 up to x = R with projection onto H = 0.
HalfOrbit integrate_half(const ModelSpec& model, double omega, double R,
                         double rel_tol) {
    const StationaryRhs rhs{model, omega};
    const double v0 = initial_amplitude(model, omega);
    const double rho0 = v0 * v0;

    HalfOrbit orbit;
    Vector2d y{v0, 0.0};
    Vector2d f = rhs(y);
    double x = 0.0;
    double h = 1e-4;
    const double atol = 1e-280;
    long attempts = 0;

    while (x < R) {
        if (++attempts > 4'000'000)
            throw IntegrationDiverged("profile integration exceeded step budget");
        h = std::min(h, R - x);

        const Vector2d k1 = f;
        const Vector2d k2 = rhs(y + h * (A21 * k1));
        const Vector2d k3 = rhs(y + h * (A31 * k1 + A32 * k2));
        const Vector2d k4 = rhs(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        const Vector2d k5 = rhs(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        const Vector2d k6 =
            rhs(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        Vector2d ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const Vector2d k7 = rhs(ynew);
        const Vector2d err =
            h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double en = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = atol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            en = std::max(en, std::abs(err[i]) / sc);
        }

        if (en <= 1.0) {
            // project the accepted state back onto the H = 0 level set
            for (int it = 0; it < 2; ++it) {
                const double H = first_integral(model, omega, ynew[0], ynew[1]);
                const Vector2d g = grad_H(model, omega, ynew[0], ynew[1]);
                const double g2 = g.squaredNorm();
                if (g2 < 1e-280) break;
                ynew -= (H / g2) * g;
            }
            const Vector2d fnew = rhs(ynew);
            orbit.steps.push_back({x, x + h, y, ynew, f, fnew});
            x += h;
            y = ynew;
            f = fnew;

            const double rho = y.squaredNorm();
            if (rho > 10.0 * rho0)
                throw IntegrationDiverged("stationary orbit escapes; no decaying wave here");
            if (std::abs(y[0]) + std::abs(y[1]) < 1e-14) {
                orbit.x_end = x;
                break;
            }
        }
        const double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-13)
            throw IntegrationDiverged("step size underflow in profile integration");
    }
    if (orbit.x_end == 0.0) orbit.x_end = x;

    for (const auto& st : orbit.steps) {
        const double mid = 0.5 * (st.x0 + st.x1);
        const Vector2d defect = st.eval_deriv(mid) - rhs(st.eval(mid));
        orbit.residual = std::max(orbit.residual, defect.cwiseAbs().maxCoeff());
    }
    orbit.residual /= v0;
    return orbit;
}

Vector2d sample_half(const HalfOrbit& orbit, double xq) {
    if (xq >= orbit.x_end || orbit.steps.empty()) return Vector2d::Zero();
    // steps are ordered; binary search for the covering interval
    auto it = std::lower_bound(orbit.steps.begin(), orbit.steps.end(), xq,
                               [](const DenseStep& s, double v) { return s.x1 < v; });
    if (it == orbit.steps.end()) return Vector2d::Zero();
    return it->eval(xq);
}

}  // namespace

Eigen::Vector2d StationaryRhs::operator()(const Eigen::Vector2d& vu) const {
    const Vector2d g = grad_H(model, omega, vu[0], vu[1]);
    return {-0.5 * g[1], 0.5 * g[0]};
}

StationaryRhs stationary_system(const ModelSpec& model, double omega) {
    check_gap(model, omega);
    return StationaryRhs{model, omega};
}

double initial_amplitude(const ModelSpec& model, double omega) {
    check_gap(model, omega);
    return std::pow((model.k + 1.0) * (model.m - omega), 1.0 / (2.0 * model.k));
}

double first_integral(const ModelSpec& model, double omega, double v, double u) {
    const double rho = v * v + u * u;
    const double s = v * v - u * u;
    if (model.family == ModelFamily::MTM)
        return omega * rho + std::pow(rho, model.k + 1.0) / (model.k + 1.0) - model.m * s;
    const double F = std::pow(std::abs(s), model.k + 1.0) / (model.k + 1.0);
    return omega * rho - model.m * s + F;
}

double default_domain_halfwidth(const ModelSpec& model, double omega) {
    const double kappa = std::sqrt(model.m * model.m - omega * omega);
    return std::max(30.0, 30.0 / kappa);
}

WaveProfile solve_profile(const ModelSpec& model, double omega, const SolveOptions& opts) {
    check_gap(model, omega);
    const double R = opts.R.value_or(default_domain_halfwidth(model, omega));
    Grid grid(R, opts.M, opts.scheme);

    const HalfOrbit orbit = integrate_half(model, omega, R, opts.rel_tol);

    WaveProfile p;
    p.model = model;
    p.omega = omega;
    p.grid = grid;
    p.x = grid.points();
    p.v.resize(grid.M);
    p.u.resize(grid.M);
    p.kappa = std::sqrt(model.m * model.m - omega * omega);
    p.residual = orbit.residual;

    for (int j = 0; j < grid.M; ++j) {
        const double xj = p.x[j];
        const Vector2d vu = sample_half(orbit, std::abs(xj));
        p.v[j] = vu[0];
        p.u[j] = xj < 0.0 ? -vu[1] : vu[1];
    }

    const double vmax = p.max_abs_v();
    const double tail = std::abs(p.v[0]) + std::abs(p.u[0]) +
                        std::abs(p.v[grid.M - 1]) + std::abs(p.u[grid.M - 1]);
    if (tail > 1e-10 * vmax)
        throw IntegrationDiverged(
            "profile tail above floor at |x| = R; omega too close to the gap edge "
            "for this domain (R = " + std::to_string(R) + ")");

    int changes = 0;
    double prev = 0.0;
    const double floor = 1e-14 * vmax * vmax;
    for (int j = 0; j < grid.M; ++j) {
        const double s = p.v[j] * p.v[j] - p.u[j] * p.u[j];
        if (std::abs(s) < floor) continue;
        if (prev != 0.0 && s * prev < 0.0) ++changes;
        prev = s;
    }
    p.s_sign_changes = changes;
    return p;
}

std::pair<VectorXd, VectorXd> sample_orbit(const ModelSpec& model, double omega,
                                           const Grid& grid, double rel_tol) {
    check_gap(model, omega);
    const HalfOrbit orbit = integrate_half(model, omega, grid.R, rel_tol);
    VectorXd v(grid.M), u(grid.M);
    for (int j = 0; j < grid.M; ++j) {
        const double xj = grid.x(j);
        const Vector2d vu = sample_half(orbit, std::abs(xj));
        v[j] = vu[0];
        u[j] = xj < 0.0 ? -vu[1] : vu[1];
    }
    return {std::move(v), std::move(u)};
}

double first_integral_residual(const WaveProfile& profile) {
    double r = 0.0;
    for (int j = 0; j < profile.grid.M; ++j)
        r = std::max(r, std::abs(first_integral(profile.model, profile.omega,
                                                profile.v[j], profile.u[j])));
    return r;
}

OmegaDerivative d_omega_profile(const ModelSpec& model, double omega,
                                double delta_omega, const SolveOptions& opts,
                                bool richardson) {
    check_gap(model, omega);
    if (!(delta_omega > 0.0)) throw std::invalid_argument("delta_omega must be positive");
    if (std::abs(omega) + delta_omega >= model.m)
        throw std::invalid_argument("omega +/- delta_omega leaves the spectral gap");

    SolveOptions o = opts;
    if (!o.R) o.R = default_domain_halfwidth(model, omega);

    auto centered = [&](double dw) {
        const WaveProfile plus = solve_profile(model, omega + dw, o);
        const WaveProfile minus = solve_profile(model, omega - dw, o);
        OmegaDerivative d;
        d.omega = omega;
        d.delta_omega = dw;
        d.grid = plus.grid;
        d.dv = (plus.v - minus.v) / (2.0 * dw);
        d.du = (plus.u - minus.u) / (2.0 * dw);
        return d;
    };

    OmegaDerivative d = centered(delta_omega);
    if (richardson) {
        const OmegaDerivative dhalf = centered(0.5 * delta_omega);
        d.dv = (4.0 * dhalf.dv - d.dv) / 3.0;
        d.du = (4.0 * dhalf.du - d.du) / 3.0;
    }
    return d;
}

}  // namespace nlds
