#pragma once

#include <array>
#include <optional>

#include "qbench/metrics.hpp"
#include "qbench/optimizers.hpp"
#include "qbench/pipeline.hpp"

namespace qbench {

/// Seniority-zero (paired) Hamiltonian over n qubits, one qubit per spatial
/// orbital: H = e0 + sum g_j Z_j + sum w_jk Z_j Z_k + sum v_jk (X_j X_k + Y_j Y_k).
struct PairedHamiltonian {
    int n = 2;
    double e0 = 0.0;
    std::vector<double> g;
    std::map<std::pair<int, int>, double> w;
    std::map<std::pair<int, int>, double> v;
    double radius = 0.0;  // Angstrom label
    std::string label;

    void validate() const;
    /// Diagonal (Z-basis) energy of the bitstring with the given occupation mask.
    double diagonal_energy(std::uint64_t occupation_mask) const;
};

struct ReferenceEnergies {
    std::optional<double> fci;
    double doci = 0.0;
    double hf = 0.0;
    double random_energy = 0.0;

    /// E_FCI when available, otherwise E_DOCI stands in.
    double target() const { return fci ? *fci : doci; }
};

/// Hard-core-pair coupled-cluster ansatz: X on the first n/2 qubits, then one
/// pair-exchange rotation per (occupied, virtual) pair in row-major order.
struct UpccdAnsatz {
    explicit UpccdAnsatz(int n);
    int n;
    std::vector<std::pair<int, int>> exchanges;  // (occupied, virtual)
    int parameter_count() const { return static_cast<int>(exchanges.size()); }
    Circuit circuit(const std::vector<double>& alpha) const;  // no measurements
};

/// Basis-change + measurement suffixes for the three qubit-wise commuting
/// groups: computational (Z/ZZ), all-qubit H (XX), all-qubit Sdg then H (YY).
std::array<Circuit, 3> measurement_groups(int n);

double energy_from_counts(const Distribution& z_group, const Distribution& x_group,
                          const Distribution& y_group, const PairedHamiltonian& h);

/// Exact <psi(alpha)| H |psi(alpha)> through the three ideal group distributions.
double exact_energy(const PairedHamiltonian& h, const UpccdAnsatz& ansatz,
                    const std::vector<double>& alpha, const SimulatorOptions& opt = {});

double accuracy_ratio(double e_solution, const ReferenceEnergies& refs);
double solution_quality(double e_solution, const ReferenceEnergies& refs, double precision = 5.0);
/// Accuracy-ratio value of the chemical-accuracy (1.6e-3 Hartree) band edge.
double chemical_accuracy_band(const ReferenceEnergies& refs);

/// Minimum eigenvalue of H restricted to the Hamming-weight-n/2 sector.
double doci_energy(const PairedHamiltonian& h);
/// Diagonal energy of the ansatz reference state (first n/2 qubits occupied).
double hf_energy(const PairedHamiltonian& h);

std::pair<PairedHamiltonian, ReferenceEnergies> generate_synthetic_instance(int n,
                                                                            std::uint64_t seed);

std::pair<PairedHamiltonian, ReferenceEnergies> parse_paired_hamiltonian(const std::string& json);
std::string paired_hamiltonian_to_json(const PairedHamiltonian& h, const ReferenceEnergies& refs,
                                       const std::string& provenance);
std::pair<PairedHamiltonian, ReferenceEnergies> load_paired_hamiltonian(const std::string& path);
/// dir + "/h2_<radius>.json" with '.' spelled 'p' (0.75 -> h2_0p75.json)
std::string shipped_instance_path(const std::string& dir, double radius);

struct VqeConfig {
    BenchmarkConfig base;
    enum class Optimizer { automatic, spsa, nelder_mead } optimizer = Optimizer::automatic;
    SpsaConfig spsa;
    NelderMeadOptions nelder_mead;
    int max_iterations = 60;
    double radius = 0.75;
    std::string instance_dir;  // shipped 2-qubit instances; wider ones are synthetic
    double sq_precision = 5.0;
    // stop when the recorded energy changes by < rel_tol over `window` iterations
    int stop_window = 10;
    double stop_rel_tol = 1e-6;
};

/// Instance for a sweep width: shipped file at n = 2, synthetic above.
std::pair<PairedHamiltonian, ReferenceEnergies> instance_for_width(const VqeConfig& cfg, int n);

/// Method 1: ansatz-execution fidelity at seeded random parameters per width.
MetricStore run_method1(const VqeConfig& cfg);

/// Method 2: the full VQE loop; per-iteration energy, AR, SQ and cumulative
/// quantum time per restart, every even width in the sweep.
MetricStore run_method2(const VqeConfig& cfg);

/// Final-iteration accuracy-ratio errors (1 - AR), one entry per restart.
std::vector<double> final_ar_errors(const MetricStore& store, int group);

}  // namespace qbench
