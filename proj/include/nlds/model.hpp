#pragma once

// Model definitions for 1D self-interacting spinor fields.
//
// Two families of pure-power nonlinearities are supported:
//   GN  (Soler / massive Gross-Neveu):  F(s) = |s|^{k+1}/(k+1),  s = psi* beta psi
//   MTM (generalized massive Thirring): scalar density ||J||_g^{1+k}/(1+k) built
//       from the two-current J^0 = psi*psi, J^1 = psi* alpha1 psi
//
// Representation: gamma^0 = sigma3, gamma^1 = i sigma2, so alpha1 = sigma1 and
// beta = sigma3.  With this choice the standing wave phi = (v, iu) has real v, u,
// v even and u odd.
//
// All spinor-valued quantities are handled in real coordinates
//   y = (Re psi1, Re psi2, Im psi1, Im psi2),
// where multiplication by -i becomes the skew matrix J defined below.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace nlds {

using Eigen::Matrix4d;
using Eigen::Vector4d;

enum class ModelFamily { MTM, GN };

std::string to_string(ModelFamily f);
ModelFamily family_from_string(const std::string& s);

struct ModelSpec {
    ModelFamily family = ModelFamily::GN;
    double k = 1.0;  // nonlinearity exponent, > 0
    double m = 1.0;  // mass, > 0
};

/// Validates k > 0, m > 0; throws std::invalid_argument otherwise.
ModelSpec make_model(ModelFamily family, double k, double m = 1.0);

// Real 4x4 forms of the algebra, component order (Re1, Re2, Im1, Im2).
const Matrix4d& mat_J();       // multiplication by -i
const Matrix4d& mat_alpha1();  // blockdiag(sigma1, sigma1)
const Matrix4d& mat_beta();    // diag(1, -1, 1, -1)

/// Rotation exp(theta*J): real form of multiplication by e^{-i theta}.
Matrix4d rotation(double theta);

/// psi* beta psi = v^2 - u^2 type scalar.
inline double scalar_s(const Vector4d& y) {
    return y[0] * y[0] - y[1] * y[1] + y[2] * y[2] - y[3] * y[3];
}
/// psi* psi.
inline double current_j0(const Vector4d& y) { return y.squaredNorm(); }
/// psi* alpha1 psi.
inline double current_j1(const Vector4d& y) {
    return 2.0 * (y[0] * y[1] + y[2] * y[3]);
}

/// Interaction scalar density at a point (the F or ||J||-power term).
double scalar_density(const ModelSpec& model, const Vector4d& y);

/// Pointwise nonlinear term of the equation in real coordinates.
/// Equals one half of the y-gradient of scalar_density.
Vector4d nonlinear_map(const ModelSpec& model, const Vector4d& y);

/// Derivative of nonlinear_map at y.  Symmetric (it is half the Hessian of the
/// scalar density).  For k < 1 the power f'(s) = k|s|^{k-1} diverges as s -> 0;
/// the singular rank-one parts are dropped once the argument is below 1e-300,
/// which only affects exactly padded zeros on soliton tails.
Matrix4d nonlinear_jacobian(const ModelSpec& model, const Vector4d& y);

}  // namespace nlds
