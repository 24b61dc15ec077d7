#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qbench/circuit.hpp"

namespace qbench {

/// Probability map over measured bitstrings. Key position i holds classical
/// bit i ('0'/'1'), so key[0] is classical bit 0.
using Distribution = std::map<std::string, double>;
using Counts = std::map<std::string, std::uint64_t>;

struct NoiseModel {
    double p1 = 0.0;  // 1-qubit depolarizing probability
    double p2 = 0.0;  // 2-qubit depolarizing probability
    /// Per-qubit confusion matrices, readout[q](t, o) = P(observed o | true t).
    /// Empty vector = ideal readout.
    std::vector<Eigen::Matrix2d> readout;

    bool has_gate_noise() const { return p1 > 0.0 || p2 > 0.0; }
    bool has_readout() const { return !readout.empty(); }
    void validate() const;

    static NoiseModel ideal() { return {}; }
    static NoiseModel depolarizing(double p1, double p2) { return {p1, p2, {}}; }
    /// Symmetric bit-flip readout with the given flip probability on n qubits.
    NoiseModel& with_symmetric_readout(double flip, int num_qubits);
};

struct ExecutionResult {
    Counts counts;              // empty when exact probabilities were requested
    Distribution probabilities; // normalized outcome distribution
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    double t_quantum = 0.0;     // wall seconds of the simulation phase
    bool exact = false;
};

struct SimulatorOptions {
    int width_cap = 16;
    int threads = 0;  // 0 = hardware concurrency
};

class StateVector {
public:
    explicit StateVector(int width);

    int width() const { return width_; }
    std::size_t dim() const { return amp_.size(); }
    const std::vector<Complex>& amplitudes() const { return amp_; }
    std::vector<Complex>& amplitudes() { return amp_; }

    void apply(const Gate& g);
    void apply_matrix1(int q, const Matrix2& m);
    void apply_matrix(const std::vector<int>& qubits, const Matrix& m);
    void apply_cx(int control, int target);
    /// pauli: 1 = X, 2 = Y, 3 = Z
    void apply_pauli(int pauli, int q);

    double norm_sq() const;

private:
    int width_;
    std::vector<Complex> amp_;
};

/// Exact Born-rule probabilities over the measured classical bits,
/// marginalized over unmeasured qubits.
Distribution run_ideal(const Circuit& c, const SimulatorOptions& opt = {});

/// Monte-Carlo Pauli-trajectory sampling. After each 1q gate a uniformly
/// random Pauli is inserted with probability p1; after each 2q gate one of
/// the 15 non-identity two-qubit Paulis with probability p2. Readout
/// confusion is applied per measured bit. Deterministic given the seed,
/// independent of thread count.
ExecutionResult run_noisy(const Circuit& c, const NoiseModel& noise, std::uint64_t shots,
                          std::uint64_t seed, const SimulatorOptions& opt = {});

/// Renormalized conditional distribution given classical bit `bit` == value,
/// with the selected bit removed from the keys; also returns the selection
/// probability. Throws if the branch has zero probability.
std::pair<Distribution, double> post_select(const Distribution& d, int bit, int value);

/// Marginal over the listed key positions (in the given order).
Distribution marginalize(const Distribution& d, const std::vector<int>& keep_bits);

/// Expectation of the +/-1 parity over the listed bit positions
/// (bit '0' contributes +1).
double z_parity_expectation(const Distribution& d, const std::vector<int>& bits);

Distribution counts_to_distribution(const Counts& counts);

}  // namespace qbench
