#pragma once

#include "qbench/circuit.hpp"

namespace qbench {

/// Standard QFT on n qubits (H + controlled-phase ladder + final swaps),
/// |x> -> 1/sqrt(N) sum_y exp(2*pi*i*x*y/N) |y> with qubit j carrying bit j.
Circuit qft(int n, bool inverse = false);

/// Block-diagonal multiplexed RY: applies RY(angles[j]) to `target` when the
/// control register (controls[i] = bit i of j) is in state |j>. Emitted as
/// RY + CX only; 2^k rotations and 2^k CX gates.
Circuit uniformly_controlled_ry(const std::vector<double>& angles,
                                const std::vector<int>& controls, int target, int width);

/// Same construction with RZ rotations.
Circuit uniformly_controlled_rz(const std::vector<double>& angles,
                                const std::vector<int>& controls, int target, int width);

/// Diagonal unitary diag(exp(i*phases[x])) over the listed qubits (qubits[i] =
/// bit i of x), synthesized exactly as parity-RZ terms via the Walsh-Hadamard
/// transform of the phase vector. Global phase is dropped.
Circuit diagonal_phases(const std::vector<double>& phases,
                        const std::vector<int>& qubits, int width);

Circuit ghz(int n);  // H + CX ladder + measure all

}  // namespace qbench
