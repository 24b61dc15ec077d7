#pragma once

#include "qbench/kak.hpp"
#include "qbench/metrics.hpp"
#include "qbench/pipeline.hpp"

namespace qbench {

/// Trotterized transverse-field chain with deliberately small ZZ angles: the
/// per-gate interaction sits far below typical two-qubit error rates, which is
/// exactly the regime approximate resynthesis exploits.
struct HamSimSpec {
    int n = 4;                   // qubits
    int steps = 2;               // Trotter steps
    double zz_theta = M_PI / 150;  // ZZ(theta) carries a half-angle of theta/2
    double x_beta = 0.3;         // RX field angle

    void validate() const;
};

/// Per step: RX(beta) on every qubit, then ZZ(theta) on the nearest-neighbor
/// chain (0,1), (1,2), ...; measure all.
Circuit build_hamsim_circuit(const HamSimSpec& spec);

struct HamSimBenchConfig {
    BenchmarkConfig base;
    HamSimSpec spec;  // n is overridden by the sweep width
    bool with_resynthesis = false;
    double resynthesis_e2 = 0.005;
};

MetricStore run_hamsim_benchmark(const HamSimBenchConfig& cfg);

}  // namespace qbench
