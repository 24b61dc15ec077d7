#pragma once

#include "qbench/metrics.hpp"
#include "qbench/pipeline.hpp"

namespace qbench {

/// Linear-system instance from the paired family: A acts on each index pair
/// {2i, 2i+1} as [[(l1+l2)/2, (l1-l2)/2], [(l1-l2)/2, (l1+l2)/2]], so the
/// eigenvectors are (|2i> +- |2i+1>)/sqrt(2) and every eigenvalue sits exactly
/// on the n_p-bit grid m/2^{n_p}.
struct HHLInstance {
    int n_b = 1;  // input register qubits
    int n_p = 1;  // phase register qubits
    /// grid numerators, eig_num[2i] for (|2i>+|2i+1>)/sqrt2, eig_num[2i+1] for
    /// the minus combination; eigenvalue = eig_num[j] / 2^{n_p}
    std::vector<int> eig_num;
    int b = 0;       // basis-state index of |b>
    double c = 0.0;  // rotation constant, 0 < c <= lambda_min

    int width() const { return 2 * n_b + n_p + 1; }
    double eigenvalue(int j) const { return double(eig_num[j]) / double(1 << n_p); }
    double lambda_min() const;
    double lambda_max() const;
    double condition_number() const { return lambda_max() / lambda_min(); }
    Eigen::MatrixXd matrix() const;
    void validate() const;

    std::string to_json() const;
    static HHLInstance from_json(const std::string& text);
};

/// All (n_b, n_p) with 2*n_b + n_p + 1 = width, ascending n_b. width >= 4.
std::vector<std::pair<int, int>> enumerate_register_splits(int width);

HHLInstance generate_instance(int n_b, int n_p, std::uint64_t seed);

enum HHLStage : unsigned {
    kPrepareB = 1u << 0,
    kForwardQPE = 1u << 1,
    kAncillaRotation = 1u << 2,
    kInverseQPE = 1u << 3,
    kMeasure = 1u << 4,
    kFullCircuit = kPrepareB | kForwardQPE | kAncillaRotation | kInverseQPE | kMeasure,
};

/// Registers: input [0, n_b), walk ancilla [n_b, 2 n_b) (idle, carried for the
/// width accounting), phase [2 n_b, 2 n_b + n_p), rotation ancilla last.
Circuit build_hhl_circuit(const HHLInstance& inst, unsigned stages = kFullCircuit);

/// Normalized |A^{-1} b|^2 over input basis states (classical solution).
std::vector<double> classical_solution_profile(const HHLInstance& inst);

/// c^2 * sum_j |beta_j / lambda_j|^2 from the eigen-expansion of |b>.
double success_probability(const HHLInstance& inst);

/// Ideal distribution over the full measured register; asserts that the
/// post-selected input marginal matches the classical solution.
Distribution expected_distribution(const HHLInstance& inst, const SimulatorOptions& opt = {});

/// Post-select ancilla = 1 and marginalize to the input register.
std::pair<Distribution, double> post_selected_input(const Distribution& full,
                                                    const HHLInstance& inst);

struct HHLBenchConfig {
    BenchmarkConfig base;
    int instances_per_split = 1;
};

MetricStore run_hhl_benchmark(const HHLBenchConfig& cfg);

}  // namespace qbench
