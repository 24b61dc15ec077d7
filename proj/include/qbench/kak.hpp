#pragma once

#include "qbench/circuit.hpp"

namespace qbench {

/// Canonical two-qubit invariants in the chamber pi/4 >= c1 >= c2 >= |c3|,
/// for the canonical gate N(c) = exp(i (c1 XX + c2 YY + c3 ZZ)).
struct WeylCoordinates {
    double c1 = 0, c2 = 0, c3 = 0;
};

/// U = exp(i phase) * k1 * N(c) * k2, with k1 and k2 single-qubit products.
struct WeylDecomposition {
    WeylCoordinates c;
    Matrix4 k1, k2;
    double phase = 0;
};

Matrix4 canonical_gate(const WeylCoordinates& c);

/// Cartan decomposition via the magic basis. Throws on non-unitary input.
WeylDecomposition weyl_decompose(const Matrix4& u, double tol = 1e-10);

/// Split a 4x4 product unitary into (a on local bit 1, b on local bit 0)
/// with kron(a, b) equal to the input up to 1e-8.
std::pair<Matrix2, Matrix2> factor_local(const Matrix4& k);

/// Closed-form best average-gate fidelity between N(c) and the k-CX reachable
/// set under free local dressings.
double resynthesis_fidelity(const WeylCoordinates& c, int k);

/// Nearest point of the k-CX reachable set.
WeylCoordinates project_to_cx_class(const WeylCoordinates& c, int k);

/// Minimal CX count whose reachable set contains c (within tol).
int exact_cx_count(const WeylCoordinates& c, double tol = 1e-8);

/// Exact synthesis of an arbitrary two-qubit unitary into 1q gates + at most
/// 3 CX, acting on local bits (qubit_lo = bit 0, qubit_hi = bit 1).
Circuit synthesize_two_qubit(const Matrix4& u, int qubit_lo = 0, int qubit_hi = 1,
                             int width = 2);

struct ResynthesisConfig {
    double e2 = 0.005;  // assumed per-CX error
    enum class Mode { exact, approximate } mode = Mode::approximate;
    // barriers are always respected

    static ResynthesisConfig exact_mode() {
        return ResynthesisConfig{0.0, Mode::exact};
    }
};

/// Merge maximal barrier-free runs local to one qubit pair and resynthesize
/// each merged unitary, trading synthesis infidelity against k * e2 per the
/// additive score (1 - F_k) + k*e2. The chosen CX count never exceeds the
/// count of an exact resynthesis of the merged run.
Circuit kak_resynthesize(const Circuit& c, const ResynthesisConfig& cfg = {});

}  // namespace qbench
