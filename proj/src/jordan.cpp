#include "nlds/jordan.hpp"

#include <cmath>

namespace nlds {

namespace {

void check_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw GridMismatch("operands live on different grids");
}

// weighted L2 inner product on the grid, summed over the four components
double inner(const Grid& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd w = g.quad_weights();
    const int M = g.M;
    double acc = 0.0;
    for (int c = 0; c < 4; ++c)
        acc += (w.array() * a.segment(c * M, M).array() * b.segment(c * M, M).array()).sum();
    return acc;
}

double weighted_norm(const Grid& g, const Eigen::VectorXd& a) {
    return std::sqrt(inner(g, a, a));
}

// relative residual, zero when the reference itself vanishes (zero profile)
double rel(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Eigen::VectorXd build_xi(const WaveProfile& p) {
    const int M = p.grid.M;
    const Eigen::VectorXd phi = flatten_profile(p);
    Eigen::VectorXd xi = apply_J_field(phi);
    for (int c = 0; c < 4; ++c)
        xi.segment(c * M, M).array() *= p.omega * p.x.array();
    xi -= 0.5 * apply_pointwise(mat_alpha1(), phi);
    return xi;
}

JordanReport chain_residuals(const LinearizedOperator& op, const WaveProfile& p,
                             const OmegaDerivative& d) {
    check_same_grid(op.grid, p.grid);
    check_same_grid(op.grid, d.grid);
    const Grid& g = op.grid;

    const Eigen::VectorXd phi = flatten_profile(p);
    const Eigen::VectorXd jphi = apply_J_field(phi);
    const Eigen::VectorXd dxphi = apply_componentwise(*op.D, phi);
    const Eigen::VectorXd dwphi = flatten_derivative(d);
    const Eigen::VectorXd xi = build_xi(p);

    const double njphi = weighted_norm(g, jphi);
    const double ndxphi = weighted_norm(g, dxphi);

    JordanReport r;
    r.omega = p.omega;
    r.residual_kernel_U1 = rel(weighted_norm(g, op.apply_A(jphi)), njphi);
    r.residual_kernel_tr = rel(weighted_norm(g, op.apply_A(dxphi)), ndxphi);
    r.residual_chain_U1 = rel(weighted_norm(g, op.apply_A(dwphi) - jphi), njphi);
    r.residual_chain_tr = rel(weighted_norm(g, op.apply_A(xi) - dxphi), ndxphi);
    r.vk_pairing = inner(g, dwphi, phi);
    r.cross_orthogonality = inner(g, dwphi, apply_J_field(dxphi));
    return r;
}

double vk_pairing(const WaveProfile& p, const OmegaDerivative& d) {
    check_same_grid(p.grid, d.grid);
    const Eigen::VectorXd w = p.grid.quad_weights();
    return (w.array() * (d.dv.array() * p.v.array() + d.du.array() * p.u.array())).sum();
}

CMatrixResult c_matrix(const WaveProfile& p) {
    const Grid& g = p.grid;
    const MatrixXd D = differentiation_matrix(g);
    const Eigen::VectorXd phi = flatten_profile(p);
    const Eigen::VectorXd jdxphi = apply_J_field(apply_componentwise(D, phi));
    const Eigen::VectorXd a1phi = apply_pointwise(mat_alpha1(), phi);

    const FunctionalReport f = energy_terms(p);
    CMatrixResult r;
    r.c11 = inner(g, a1phi, jdxphi) + p.omega * f.Q;
    r.energy = f.E;
    r.defect = std::abs(r.c11 - r.energy);
    return r;
}

JordanReport jordan_report(const LinearizedOperator& op, const WaveProfile& p,
                           const OmegaDerivative& d, bool with_lsq) {
    JordanReport r = chain_residuals(op, p, d);
    const CMatrixResult c = c_matrix(p);
    r.c11 = c.c11;
    r.energy = c.energy;
    r.c11_defect = c.defect;

    if (with_lsq) {
        // next gauge-chain vector: JL u = d_omega phi is solvable only at the
        // VK point.  The even block carries the gauge kernel, so the plain
        // square solve is always consistent; dropping the smallest singular
        // direction exposes the Fredholm obstruction as a residual.
        const ParityBasis basis = parity_basis(op.grid, Parity::Even);
        const MatrixXd block = op.parity_block(basis);
        const Eigen::VectorXd rhs = basis.project(flatten_derivative(d));
        Eigen::BDCSVD<MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int n = static_cast<int>(svd.singularValues().size());
        Eigen::VectorXd inv = svd.singularValues().cwiseInverse();
        inv[n - 1] = 0.0;
        const Eigen::VectorXd sol =
            svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * rhs);
        const double nrhs = rhs.norm();
        r.u1_lsq_residual = nrhs > 0 ? (block * sol - rhs).norm() / nrhs : 0.0;
    }
    return r;
}

}  // namespace nlds
