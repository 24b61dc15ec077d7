#pragma once

#include <functional>
#include <optional>

#include "qbench/circuit.hpp"
#include "qbench/metrics.hpp"
#include "qbench/mitigation.hpp"
#include "qbench/statevector.hpp"

namespace qbench {

using Transformer = std::function<Circuit(const Circuit&)>;
using Executor = std::function<ExecutionResult(const Circuit&, std::uint64_t shots,
                                               std::uint64_t seed)>;
using Mitigator = std::function<MitigationResult(const Distribution&,
                                                 const std::vector<int>& cbit_to_qubit)>;

/// Hook points of the execution pipeline:
///   transformers -> decompose/optimize -> (executor | built-in simulator) -> mitigator
struct PipelineHooks {
    std::vector<Transformer> transformers;
    Executor executor;    // optional; replaces the built-in simulator
    Mitigator mitigator;  // optional post-processing of the outcome distribution

    void register_transformer(Transformer f) { transformers.push_back(std::move(f)); }
};

struct BenchmarkConfig {
    int min_qubits = 2;
    int max_qubits = 8;
    int skip = 1;  // width stride
    std::uint64_t shots = 1000;
    int restarts = 1;
    std::uint64_t seed = 12345;
    NoiseModel noise;
    bool exact_probabilities = false;  // expectation-level execution, no sampling
    bool deterministic_timing = false; // virtual clock for reproducible metric files
    SimulatorOptions sim;
    PipelineHooks hooks;

    void validate() const;
    std::vector<int> widths() const;
};

struct ExecutionOutcome {
    ExecutionResult result;    // post-mitigation probabilities when a mitigator ran
    Distribution ideal;        // run_ideal of the pre-transformer circuit
    MetricRecord record;
};

/// Run one circuit through the full pipeline, recording Eq.-style timing
/// (elapsed = compile + queue + load + quantum + mitigate with queue = load = 0
/// on the built-in simulator) and fidelities against the ideal distribution of
/// the unmodified circuit. Hook or simulator errors mark the record failed.
ExecutionOutcome execute_circuit(const Circuit& c, const BenchmarkConfig& cfg,
                                 std::uint64_t circuit_seed, int group,
                                 const std::string& circuit_id, double create_time = 0.0);

/// Deterministic per-shot duration model used when deterministic_timing is on:
/// 50 ns per 1q gate, 300 ns per 2q+ gate, 1 us per measurement.
double virtual_circuit_duration(const Circuit& c);

}  // namespace qbench
