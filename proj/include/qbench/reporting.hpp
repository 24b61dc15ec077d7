#pragma once

#include <string>

#include "qbench/metrics.hpp"

namespace qbench {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Everything needed to reproduce a run bit-for-bit. Serialized into the run
/// manifest; `replay` rebuilds the config from it.
struct RunSpec {
    std::string benchmark;  // hhl | hydrogen-lattice | image-recognition | hamsim
    int method = 2;         // 1 = ansatz fidelity where applicable
    int min_qubits = -1;    // -1 = benchmark default
    int max_qubits = -1;
    int skip = 1;
    std::uint64_t shots = 1000;
    int restarts = 1;
    std::uint64_t seed = 12345;
    double noise_p1 = 0.0;
    double noise_p2 = 0.0;
    double readout_flip = 0.0;
    bool resynthesis = false;
    double resynthesis_e2 = 0.005;
    bool mitigation = false;
    bool exact_probabilities = false;
    bool deterministic = false;  // virtual timing, no timestamps
    int iterations = -1;         // -1 = benchmark default
    int batch_size = 50;
    std::string optimizer = "auto";  // spsa | nelder-mead | auto
    std::string instance_dir = "data/instances";
    std::string mnist_images;
    std::string mnist_labels;
    int synthetic_images = 0;  // >0: synthesize the image dataset instead
    int train_images = 200;
    int test_images = 50;
    int qv = 2048;
    int instances_per_split = 1;
    int hamsim_steps = 2;
    double hamsim_zz_theta = M_PI / 150;

    std::string to_json() const;
    static RunSpec from_json(const std::string& text);
};

struct RunResult {
    MetricStore store;
    std::string metrics_path;
    std::string csv_path;
    std::string manifest_path;
    std::vector<std::string> chart_paths;
};

/// Run the named benchmark and persist manifest + metrics + CSV + charts under
/// output_dir. In deterministic mode the outputs are byte-reproducible.
RunResult execute_run(const RunSpec& spec, const std::string& output_dir);

/// Regenerate charts from a persisted metrics file, no simulation involved.
std::vector<std::string> generate_charts(const MetricStore& store, const std::string& out_dir,
                                         int qv);

std::string metrics_to_json(const MetricStore& store);
MetricStore metrics_from_json(const std::string& text);
std::string metrics_to_csv(const MetricStore& store);

void write_metrics_file(const MetricStore& store, const std::string& path);
MetricStore read_metrics_file(const std::string& path);

std::string manifest_to_json(const RunSpec& spec, const RunResult& result);
RunSpec run_spec_from_manifest(const std::string& manifest_text);

}  // namespace qbench
