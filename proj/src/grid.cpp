#include "nlds/grid.hpp"

namespace nlds {

std::string to_string(Scheme s) {
    return s == Scheme::Fourier ? "fourier" : "fd4";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "fourier" || s == "Fourier") return Scheme::Fourier;
    if (s == "fd4" || s == "FD4") return Scheme::FD4;
    throw std::invalid_argument("unknown scheme: " + s);
}

Grid::Grid(double R_, int M_, Scheme scheme_) : R(R_), M(M_), scheme(scheme_) {
    if (!(R > 0.0)) throw std::invalid_argument("grid: R must be positive");
    if (M < 64) throw std::invalid_argument("grid: M must be at least 64");
    if (scheme == Scheme::Fourier && M % 2 != 0)
        throw std::invalid_argument("grid: Fourier scheme needs even M");
    if (scheme == Scheme::FD4 && M % 2 != 1)
        throw std::invalid_argument("grid: FD4 scheme needs odd M (so that x=0 is a node)");
}

Eigen::VectorXd Grid::points() const {
    Eigen::VectorXd xs(M);
    for (int j = 0; j < M; ++j) xs[j] = x(j);
    return xs;
}

Eigen::VectorXd Grid::quad_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(M, h());
    if (scheme == Scheme::FD4) {
        w[0] *= 0.5;
        w[M - 1] *= 0.5;
    }
    return w;
}

}  // namespace nlds
