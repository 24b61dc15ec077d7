#pragma once

#include "qbench/statevector.hpp"

namespace qbench {

/// Per-qubit 2x2 row-stochastic confusion matrices, mat(t, o) = P(observed o | true t).
struct ConfusionMatrixSet {
    std::map<int, Eigen::Matrix2d> matrices;  // keyed by qubit index

    bool covers(const std::vector<int>& qubits) const;
    void validate() const;
};

/// Estimate per-qubit confusion matrices by preparing |0> and |1> on each
/// qubit and measuring under the noise model's readout channel.
ConfusionMatrixSet calibrate_confusion(const NoiseModel& noise, const std::vector<int>& qubits,
                                       std::uint64_t shots, std::uint64_t seed);

struct MitigationResult {
    Distribution distribution;  // clipped and renormalized
    double clipped_mass = 0.0;  // negative quasi-probability mass removed
    double t_mitigate = 0.0;    // wall seconds
};

/// Apply per-qubit inverse confusion matrices to an empirical distribution,
/// bit by bit without forming the 2^n matrix. Negative entries of the
/// resulting quasi-distribution are clipped to zero and the rest renormalized.
/// cbit_to_qubit[i] names the qubit measured into key position i.
MitigationResult mitigate_counts(const Counts& counts, const ConfusionMatrixSet& cal,
                                 const std::vector<int>& cbit_to_qubit);

MitigationResult mitigate_distribution(const Distribution& d, const ConfusionMatrixSet& cal,
                                       const std::vector<int>& cbit_to_qubit);

/// Forward readout channel (test oracle for round trips).
Distribution apply_confusion(const Distribution& d, const ConfusionMatrixSet& cal,
                             const std::vector<int>& cbit_to_qubit);

}  // namespace qbench
