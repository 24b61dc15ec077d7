#pragma once

#include "qbench/circuit.hpp"

namespace qbench {

/// ZYZ Euler angles: u = exp(i alpha) RZ(beta) RY(gamma) RZ(delta).
struct EulerZYZ {
    double alpha, beta, gamma, delta;
};
EulerZYZ euler_zyz(const Matrix2& u);

/// Lower every gate to the RX/RY/RZ/CX basis. 1q gates go through ZYZ Euler
/// angles, two-qubit primitives through standard CX identities, and unitary
/// blocks through KAK (2 qubits) or a cosine-sine based Shannon decomposition
/// (3 qubits). The output matches the input up to global phase.
Circuit decompose_to_basis(const Circuit& c);

/// Light peephole pass: merge adjacent same-axis rotations, cancel adjacent
/// identical CX pairs, drop rotations with |theta| <= 1e-10 (mod 2*pi).
/// Barriers block all merging.
Circuit optimize_level1(const Circuit& c);

/// algorithmic_depth(optimize_level1(decompose_to_basis(c)))
int normalized_depth(const Circuit& c);

/// Synthesize a k-qubit unitary (k <= 3) onto the given qubits.
Circuit unitary_to_circuit(const Matrix& u, const std::vector<int>& qubits, int width);

}  // namespace qbench
