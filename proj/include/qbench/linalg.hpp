#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qbench/rng.hpp"

namespace qbench {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector = Eigen::VectorXcd;

Matrix kron(const Matrix& a, const Matrix& b);

/// max |(U^dag U - I)_ij|
double unitarity_error(const Matrix& u);
bool is_unitary(const Matrix& u, double tol = 1e-10);

/// |tr(U^dag V)|^2 / d^2, invariant under global phase of either argument.
double process_fidelity(const Matrix& u, const Matrix& v);

/// (|tr(U^dag V)|^2 + d) / (d^2 + d)
double average_gate_fidelity(const Matrix& u, const Matrix& v);

Matrix random_unitary(int dim, RngStream& rng);
Matrix2 random_su2(RngStream& rng);

namespace gates {
Matrix2 identity2();
Matrix2 h();
Matrix2 x();
Matrix2 y();
Matrix2 z();
Matrix2 s();
Matrix2 sdg();
Matrix2 rx(double theta);
Matrix2 ry(double theta);
Matrix2 rz(double theta);
/// exp(+i phi X)
Matrix2 xrot(double phi);
/// exp(-i (theta/2) Z (x) Z), qubit order irrelevant (symmetric)
Matrix4 zz(double theta);
Matrix4 cx();    // control = local bit 0, target = local bit 1
Matrix4 cz();
Matrix4 swap();
}  // namespace gates

}  // namespace qbench
