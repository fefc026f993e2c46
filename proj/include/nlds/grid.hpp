#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace nlds {

enum class Scheme { Fourier, FD4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Uniform grid on [-R, R].  The Fourier scheme works on the periodized
// interval and omits the right endpoint (h = 2R/M, M even); FD4 keeps both
// endpoints (h = 2R/(M-1), M odd so that x = 0 is a node).
struct Grid {
    double R = 30.0;
    int M = 512;
    Scheme scheme = Scheme::Fourier;

    Grid() = default;
    Grid(double R_, int M_, Scheme scheme_);

    double h() const {
        return scheme == Scheme::Fourier ? 2.0 * R / M : 2.0 * R / (M - 1);
    }
    double x(int j) const { return -R + j * h(); }
    Eigen::VectorXd points() const;

    /// Index of the mirror node of j under x -> -x.
    int reflect(int j) const {
        return scheme == Scheme::Fourier ? (M - j) % M : M - 1 - j;
    }

    /// Trapezoidal quadrature weights (uniform for the periodic grid).
    Eigen::VectorXd quad_weights() const;

    bool operator==(const Grid& o) const {
        return R == o.R && M == o.M && scheme == o.scheme;
    }
};

}  // namespace nlds
