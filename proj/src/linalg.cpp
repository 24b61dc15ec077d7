#include "qbench/linalg.hpp"

#include <cmath>

namespace qbench {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double unitarity_error(const Matrix& u) {
    Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

bool is_unitary(const Matrix& u, double tol) {
    return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

double process_fidelity(const Matrix& u, const Matrix& v) {
    const double d = static_cast<double>(u.rows());
    const double t = std::abs((u.adjoint() * v).trace());
    return t * t / (d * d);
}

double average_gate_fidelity(const Matrix& u, const Matrix& v) {
    const double d = static_cast<double>(u.rows());
    const double t = std::abs((u.adjoint() * v).trace());
    return (t * t + d) / (d * d + d);
}

Matrix random_unitary(int dim, RngStream& rng) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            // Box-Muller from two uniforms
            double u1 = std::max(rng.uniform(), 1e-300);
            double u2 = rng.uniform();
            double r = std::sqrt(-2.0 * std::log(u1));
            a(i, j) = Complex(r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2));
        }
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i) {
        Complex ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

Matrix2 random_su2(RngStream& rng) {
    Matrix u = random_unitary(2, rng);
    Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    return Matrix2(u / std::sqrt(det));
}

namespace gates {

Matrix2 identity2() { return Matrix2::Identity(); }

Matrix2 h() {
    Matrix2 m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Matrix2 x() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return m;
}

Matrix2 y() {
    Matrix2 m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Matrix2 z() {
    Matrix2 m;
    m << 1, 0, 0, -1;
    return m;
}

Matrix2 s() {
    Matrix2 m;
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

Matrix2 sdg() {
    Matrix2 m;
    m << 1, 0, 0, Complex(0, -1);
    return m;
}

Matrix2 rx(double theta) {
    double c = std::cos(theta / 2), s_ = std::sin(theta / 2);
    Matrix2 m;
    m << c, Complex(0, -s_), Complex(0, -s_), c;
    return m;
}

Matrix2 ry(double theta) {
    double c = std::cos(theta / 2), s_ = std::sin(theta / 2);
    Matrix2 m;
    m << c, -s_, s_, c;
    return m;
}

Matrix2 rz(double theta) {
    Matrix2 m;
    m << std::exp(Complex(0, -theta / 2)), 0, 0, std::exp(Complex(0, theta / 2));
    return m;
}

Matrix2 xrot(double phi) {
    double c = std::cos(phi), s_ = std::sin(phi);
    Matrix2 m;
    m << c, Complex(0, s_), Complex(0, s_), c;
    return m;
}

Matrix4 zz(double theta) {
    Matrix4 m = Matrix4::Zero();
    Complex em = std::exp(Complex(0, -theta / 2));
    Complex ep = std::exp(Complex(0, theta / 2));
    m(0, 0) = em;
    m(1, 1) = ep;
    m(2, 2) = ep;
    m(3, 3) = em;
    return m;
}

Matrix4 cx() {
    // local bit 0 = control, bit 1 = target; basis index = 2*b1 + b0
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = 1;
    m(3, 1) = 1;
    m(2, 2) = 1;
    m(1, 3) = 1;
    return m;
}

Matrix4 cz() {
    Matrix4 m = Matrix4::Identity();
    m(3, 3) = -1;
    return m;
}

Matrix4 swap() {
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = 1;
    m(2, 1) = 1;
    m(1, 2) = 1;
    m(3, 3) = 1;
    return m;
}

}  // namespace gates
}  // namespace qbench
