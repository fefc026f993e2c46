#include "nlds/model.hpp"

#include <cmath>

namespace nlds {

namespace {
constexpr double kPowerFloor = 1e-300;

// sign-preserving power |s|^{k-1} s, with f(0) = 0 for every k > 0
double spower(double s, double k) {
    if (s == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(s), k), s);
}
}  // namespace

std::string to_string(ModelFamily f) {
    return f == ModelFamily::MTM ? "MTM" : "GN";
}

ModelFamily family_from_string(const std::string& s) {
    if (s == "MTM" || s == "mtm") return ModelFamily::MTM;
    if (s == "GN" || s == "gn") return ModelFamily::GN;
    throw std::invalid_argument("unknown model family: " + s);
}

ModelSpec make_model(ModelFamily family, double k, double m) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("model: exponent k must be positive, got " + std::to_string(k));
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("model: mass m must be positive, got " + std::to_string(m));
    return ModelSpec{family, k, m};
}

const Matrix4d& mat_J() {
    static const Matrix4d J = [] {
        Matrix4d a = Matrix4d::Zero();
        a(0, 2) = 1;
        a(1, 3) = 1;
        a(2, 0) = -1;
        a(3, 1) = -1;
        return a;
    }();
    return J;
}

const Matrix4d& mat_alpha1() {
    static const Matrix4d A = [] {
        Matrix4d a = Matrix4d::Zero();
        a(0, 1) = 1;
        a(1, 0) = 1;
        a(2, 3) = 1;
        a(3, 2) = 1;
        return a;
    }();
    return A;
}

const Matrix4d& mat_beta() {
    static const Matrix4d B = [] {
        Matrix4d b = Matrix4d::Zero();
        b.diagonal() << 1, -1, 1, -1;
        return b;
    }();
    return B;
}

Matrix4d rotation(double theta) {
    return std::cos(theta) * Matrix4d::Identity() + std::sin(theta) * mat_J();
}

double scalar_density(const ModelSpec& model, const Vector4d& y) {
    if (model.family == ModelFamily::GN) {
        const double s = scalar_s(y);
        return std::pow(std::abs(s), model.k + 1.0) / (model.k + 1.0);
    }
    const double j0 = current_j0(y);
    const double j1 = current_j1(y);
    const double p = j0 * j0 - j1 * j1;  // >= 0 (Minkowski length squared)
    return std::pow(std::max(p, 0.0), 0.5 * (model.k + 1.0)) / (model.k + 1.0);
}

Vector4d nonlinear_map(const ModelSpec& model, const Vector4d& y) {
    if (model.family == ModelFamily::GN) {
        const double s = scalar_s(y);
        return spower(s, model.k) * (mat_beta() * y);
    }
    const double j0 = current_j0(y);
    const double j1 = current_j1(y);
    const double p = j0 * j0 - j1 * j1;
    if (p < kPowerFloor) return Vector4d::Zero();
    const Vector4d w = j0 * y - j1 * (mat_alpha1() * y);
    return std::pow(p, 0.5 * (model.k - 1.0)) * w;
}

Matrix4d nonlinear_jacobian(const ModelSpec& model, const Vector4d& y) {
    const double k = model.k;
    if (model.family == ModelFamily::GN) {
        const double s = scalar_s(y);
        const Vector4d by = mat_beta() * y;
        Matrix4d out = spower(s, k) * mat_beta();
        if (std::abs(s) >= kPowerFloor)
            out += (2.0 * k * std::pow(std::abs(s), k - 1.0)) * (by * by.transpose());
        return out;
    }
    const double j0 = current_j0(y);
    const double j1 = current_j1(y);
    const double p = j0 * j0 - j1 * j1;
    if (p < kPowerFloor) return Matrix4d::Zero();
    const Vector4d ay = mat_alpha1() * y;
    const Vector4d w = j0 * y - j1 * ay;
    Matrix4d out = (2.0 * (k - 1.0) * std::pow(p, 0.5 * (k - 3.0))) * (w * w.transpose());
    out += std::pow(p, 0.5 * (k - 1.0)) *
           (2.0 * (y * y.transpose()) + j0 * Matrix4d::Identity() -
            2.0 * (ay * ay.transpose()) - j1 * mat_alpha1());
    return out;
}

}  // namespace nlds
