#pragma once

// Reference profiles obtained by separating the first-integral relation.
//
// Along the orbit H = 0, the squared-density obeys
//   MTM:  rho'^2 = 4 m^2 rho^2 - 4 (omega rho + rho^{k+1}/(k+1))^2
//   GN :  s'^2   = 4 s^2 ((m - s^k/(k+1))^2 - omega^2)
// and the substitution w = rho^k (resp. w = s^k) reduces each to a quadrature
// with the explicit decaying solution
//   MTM:  rho^k = (k+1) kappa^2 / (omega + m cosh(2 k kappa x))
//   GN :  s^k   = (k+1) kappa^2 / (m + omega cosh(2 k kappa x)),  omega > 0,
// kappa = sqrt(m^2 - omega^2).  The components follow from rho, s and H = 0.
// These are used as oracles only; the library integrates the ODE system.

#include <cmath>

#include "nlds/model.hpp"

namespace nlds::testing {

inline double mtm_rho_exact(const ModelSpec& model, double omega, double x) {
    const double k = model.k, m = model.m;
    const double kap2 = m * m - omega * omega;
    const double z = 2.0 * k * std::sqrt(kap2) * x;
    if (std::abs(z) > 700.0) return 0.0;
    return std::pow((k + 1.0) * kap2 / (omega + m * std::cosh(z)), 1.0 / k);
}

inline double gn_s_exact(const ModelSpec& model, double omega, double x) {
    const double k = model.k, m = model.m;
    const double kap2 = m * m - omega * omega;
    const double z = 2.0 * k * std::sqrt(kap2) * x;
    if (std::abs(z) > 700.0) return 0.0;
    return std::pow((k + 1.0) * kap2 / (m + omega * std::cosh(z)), 1.0 / k);
}

struct VU {
    double v, u;
};

inline VU mtm_vu_exact(const ModelSpec& model, double omega, double x) {
    const double k = model.k, m = model.m;
    const double rho = mtm_rho_exact(model, omega, x);
    const double s = (omega * rho + std::pow(rho, k + 1.0) / (k + 1.0)) / m;
    const double v = std::sqrt(std::max(0.5 * (rho + s), 0.0));
    const double u = std::sqrt(std::max(0.5 * (rho - s), 0.0));
    return {v, x < 0 ? -u : u};
}

inline VU gn_vu_exact(const ModelSpec& model, double omega, double x) {
    const double k = model.k, m = model.m;
    const double s = gn_s_exact(model, omega, x);
    const double rho = s * (m - std::pow(s, k) / (k + 1.0)) / omega;
    const double v = std::sqrt(std::max(0.5 * (rho + s), 0.0));
    const double u = std::sqrt(std::max(0.5 * (rho - s), 0.0));
    return {v, x < 0 ? -u : u};
}

}  // namespace nlds::testing
