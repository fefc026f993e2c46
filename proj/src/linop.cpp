#include "nlds/linop.hpp"

#include <cmath>
#include <numbers>

namespace nlds {

namespace {

// J alpha1 in the real 4x4 algebra (antisymmetric).
const Matrix4d& mat_JA1() {
    static const Matrix4d JA = mat_J() * mat_alpha1();
    return JA;
}

// A = J S is a signed row-block permutation of S: row block a of A is
// row block sigma(a) of S with sign jsgn(a).
constexpr int kSigma[4] = {2, 3, 0, 1};
constexpr double kJsgn[4] = {1.0, 1.0, -1.0, -1.0};

void check_profile_grid(const WaveProfile& profile, const Grid& grid) {
    if (!(profile.grid == grid))
        throw GridMismatch("profile grid does not match operator grid");
}

}  // namespace

std::string to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

MatrixXd differentiation_matrix(const Grid& grid) {
    const int M = grid.M;
    MatrixXd D = MatrixXd::Zero(M, M);
    if (grid.scheme == Scheme::Fourier) {
        const double scale = std::numbers::pi / grid.R;
        std::vector<double> col(M, 0.0);
        for (int j = 1; j < M; ++j)
            col[j] = 0.5 * scale * ((j % 2) ? -1.0 : 1.0) /
                     std::tan(std::numbers::pi * j / M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                if (i != j) D(i, j) = col[((i - j) % M + M) % M];
        return D;
    }
    const double h = grid.h();
    for (int i = 2; i < M - 2; ++i) {
        D(i, i - 2) = 1.0 / (12 * h);
        D(i, i - 1) = -8.0 / (12 * h);
        D(i, i + 1) = 8.0 / (12 * h);
        D(i, i + 2) = -1.0 / (12 * h);
    }
    // one-sided fourth-order closures, mirrored so D anticommutes with the
    // grid reflection
    const double c0[5] = {-25, 48, -36, 16, -3};
    const double c1[5] = {-3, -10, 18, -6, 1};
    for (int j = 0; j < 5; ++j) {
        D(0, j) = c0[j] / (12 * h);
        D(1, j) = c1[j] / (12 * h);
        D(M - 1, M - 1 - j) = -c0[j] / (12 * h);
        D(M - 2, M - 1 - j) = -c1[j] / (12 * h);
    }
    return D;
}

Eigen::VectorXd ParityBasis::project(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(dim());
    for (int p = 0; p < dim(); ++p) {
        double v = w0[p] * full[idx0[p]];
        if (idx1[p] >= 0) v += w1[p] * full[idx1[p]];
        out[p] = v;
    }
    return out;
}

Eigen::VectorXd ParityBasis::lift(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(full_dim);
    for (int p = 0; p < dim(); ++p) {
        out[idx0[p]] += w0[p] * reduced[p];
        if (idx1[p] >= 0) out[idx1[p]] += w1[p] * reduced[p];
    }
    return out;
}

ParityBasis parity_basis(const Grid& grid, Parity parity) {
    const int M = grid.M;
    ParityBasis b;
    b.parity = parity;
    b.full_dim = 4 * M;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (int c = 0; c < 4; ++c) {
        // components Re psi1, Im psi1 are even in the even class; Re psi2,
        // Im psi2 are odd there (and vice versa in the odd class)
        const double pc_even = (c == 0 || c == 2) ? 1.0 : -1.0;
        const double pc = parity == Parity::Even ? pc_even : -pc_even;
        for (int j = 0; j < M; ++j) {
            const int r = grid.reflect(j);
            if (r == j) {
                if (pc > 0) {
                    b.idx0.push_back(c * M + j);
                    b.w0.push_back(1.0);
                    b.idx1.push_back(-1);
                    b.w1.push_back(0.0);
                }
            } else if (j < r) {
                b.idx0.push_back(c * M + j);
                b.w0.push_back(inv_sqrt2);
                b.idx1.push_back(c * M + r);
                b.w1.push_back(pc * inv_sqrt2);
            }
        }
    }
    return b;
}

Eigen::VectorXd LinearizedOperator::apply_S(const Eigen::VectorXd& y) const {
    const int M = grid.M;
    Eigen::VectorXd out(4 * M);
    // derivative part: (J alpha1) applied pointwise to D y
    Eigen::VectorXd t0 = (*D) * y.segment(0, M);
    Eigen::VectorXd t1 = (*D) * y.segment(M, M);
    Eigen::VectorXd t2 = (*D) * y.segment(2 * M, M);
    Eigen::VectorXd t3 = (*D) * y.segment(3 * M, M);
    out.segment(0, M) = t3;
    out.segment(M, M) = t2;
    out.segment(2 * M, M) = -t1;
    out.segment(3 * M, M) = -t0;
    // mass, frequency shift, potential
    const double m = model.m;
    for (int j = 0; j < M; ++j) {
        Vector4d yj{y[j], y[M + j], y[2 * M + j], y[3 * M + j]};
        Vector4d r{(m - omega) * yj[0], (-m - omega) * yj[1], (m - omega) * yj[2],
                   (-m - omega) * yj[3]};
        r -= V[j] * yj;
        out[j] += r[0];
        out[M + j] += r[1];
        out[2 * M + j] += r[2];
        out[3 * M + j] += r[3];
    }
    return out;
}

Eigen::VectorXd LinearizedOperator::apply_A(const Eigen::VectorXd& y) const {
    const int M = grid.M;
    Eigen::VectorXd s = apply_S(y);
    Eigen::VectorXd out(4 * M);
    out.segment(0, M) = s.segment(2 * M, M);
    out.segment(M, M) = s.segment(3 * M, M);
    out.segment(2 * M, M) = -s.segment(0, M);
    out.segment(3 * M, M) = -s.segment(M, M);
    return out;
}

MatrixXd LinearizedOperator::dense_S() const {
    const int M = grid.M;
    MatrixXd S = MatrixXd::Zero(4 * M, 4 * M);
    const Matrix4d& JA = mat_JA1();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (JA(a, b) != 0.0) S.block(a * M, b * M, M, M) = JA(a, b) * (*D);
    const double m = model.m;
    for (int j = 0; j < M; ++j) {
        const double diag[4] = {m - omega, -m - omega, m - omega, -m - omega};
        for (int a = 0; a < 4; ++a) {
            S(a * M + j, a * M + j) += diag[a];
            for (int b = 0; b < 4; ++b) S(a * M + j, b * M + j) -= V[j](a, b);
        }
    }
    return S;
}

MatrixXd LinearizedOperator::dense_A() const {
    const int M = grid.M;
    MatrixXd S = dense_S();
    MatrixXd A(4 * M, 4 * M);
    A.middleRows(0, M) = S.middleRows(2 * M, M);
    A.middleRows(M, M) = S.middleRows(3 * M, M);
    A.middleRows(2 * M, M) = -S.middleRows(0, M);
    A.middleRows(3 * M, M) = -S.middleRows(M, M);
    return A;
}

MatrixXd LinearizedOperator::parity_block(const ParityBasis& basis) const {
    const int M = grid.M;
    const Matrix4d& JA = mat_JA1();
    const double m = model.m;
    const double diag[4] = {m - omega, -m - omega, m - omega, -m - omega};
    const MatrixXd& Dm = *D;

    // S entry on the fly (component-major indexing)
    auto s_entry = [&](int a, int i, int b, int j) -> double {
        double val = JA(a, b) != 0.0 ? JA(a, b) * Dm(i, j) : 0.0;
        if (i == j) {
            if (a == b) val += diag[a];
            val -= V[i](a, b);
        }
        return val;
    };
    auto a_entry = [&](int I, int Jc) -> double {
        const int a = I / M, i = I % M;
        const int b = Jc / M, j = Jc % M;
        return kJsgn[a] * s_entry(kSigma[a], i, b, j);
    };

    const int n = basis.dim();
    MatrixXd B(n, n);
    for (int q = 0; q < n; ++q) {
        for (int p = 0; p < n; ++p) {
            double val = basis.w0[p] * basis.w0[q] * a_entry(basis.idx0[p], basis.idx0[q]);
            if (basis.idx1[q] >= 0)
                val += basis.w0[p] * basis.w1[q] * a_entry(basis.idx0[p], basis.idx1[q]);
            if (basis.idx1[p] >= 0) {
                val += basis.w1[p] * basis.w0[q] * a_entry(basis.idx1[p], basis.idx0[q]);
                if (basis.idx1[q] >= 0)
                    val += basis.w1[p] * basis.w1[q] * a_entry(basis.idx1[p], basis.idx1[q]);
            }
            B(p, q) = val;
        }
    }
    return B;
}

namespace {

LinearizedOperator make_operator(const ModelSpec& model, double omega, const Grid& grid,
                                 std::vector<Matrix4d> V) {
    LinearizedOperator op;
    op.model = model;
    op.omega = omega;
    op.grid = grid;
    op.D = std::make_shared<MatrixXd>(differentiation_matrix(grid));
    op.V = std::move(V);
    op.band_edges = {model.m - std::abs(omega), model.m + std::abs(omega)};
    return op;
}

}  // namespace

MatrixXd assemble_L(const ModelSpec& model, const WaveProfile& profile, const Grid& grid) {
    return assemble_JL(model, profile, grid).dense_S();
}

LinearizedOperator assemble_JL(const ModelSpec& model, const WaveProfile& profile,
                               const Grid& grid) {
    check_profile_grid(profile, grid);
    std::vector<Matrix4d> V(grid.M);
    for (int j = 0; j < grid.M; ++j)
        V[j] = nonlinear_jacobian(model, Vector4d{profile.v[j], 0.0, 0.0, profile.u[j]});
    return make_operator(model, profile.omega, grid, std::move(V));
}

LinearizedOperator assemble_JL_zero(const ModelSpec& model, double omega, const Grid& grid) {
    return make_operator(model, omega, grid,
                         std::vector<Matrix4d>(grid.M, Matrix4d::Zero()));
}

LinearizedOperator assemble_JL_subdomain(const ModelSpec& model, double omega,
                                         const Grid& grid) {
    const auto [v, u] = sample_orbit(model, omega, grid);
    std::vector<Matrix4d> V(grid.M);
    for (int j = 0; j < grid.M; ++j)
        V[j] = nonlinear_jacobian(model, Vector4d{v[j], 0.0, 0.0, u[j]});
    return make_operator(model, omega, grid, std::move(V));
}

ParityBlocks parity_decompose(const LinearizedOperator& op, const WaveProfile& profile) {
    const Grid& g = op.grid;
    double defect = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const int r = g.reflect(j);
        defect = std::max(defect, std::abs(profile.v[j] - profile.v[r]));
        defect = std::max(defect, std::abs(profile.u[j] + profile.u[r]));
    }
    if (defect > 1e-10 * profile.max_abs_v())
        throw NumericalError("profile parity defect too large for symmetry reduction");
    return parity_decompose(op);
}

ParityBlocks parity_decompose(const LinearizedOperator& op) {
    ParityBlocks pb;
    pb.even_basis = parity_basis(op.grid, Parity::Even);
    pb.odd_basis = parity_basis(op.grid, Parity::Odd);
    pb.even = op.parity_block(pb.even_basis);
    pb.odd = op.parity_block(pb.odd_basis);
    return pb;
}

Eigen::VectorXd flatten_profile(const WaveProfile& p) {
    const int M = p.grid.M;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(4 * M);
    y.segment(0, M) = p.v;
    y.segment(3 * M, M) = p.u;
    return y;
}

Eigen::VectorXd flatten_derivative(const OmegaDerivative& d) {
    const int M = d.grid.M;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(4 * M);
    y.segment(0, M) = d.dv;
    y.segment(3 * M, M) = d.du;
    return y;
}

Eigen::VectorXd apply_pointwise(const Matrix4d& m4, const Eigen::VectorXd& y) {
    const int M = static_cast<int>(y.size()) / 4;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * M);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (m4(a, b) != 0.0)
                out.segment(a * M, M) += m4(a, b) * y.segment(b * M, M);
    return out;
}

Eigen::VectorXd apply_componentwise(const MatrixXd& D, const Eigen::VectorXd& y) {
    const int M = static_cast<int>(D.rows());
    Eigen::VectorXd out(4 * M);
    for (int c = 0; c < 4; ++c) out.segment(c * M, M) = D * y.segment(c * M, M);
    return out;
}

}  // namespace nlds
