#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "qbench/statevector.hpp"

namespace qbench {

/// (sum_i sqrt(p_i q_i))^2
double hellinger_fidelity(const Distribution& p, const Distribution& q);

/// Hellinger fidelity rescaled so that a uniform distribution over the
/// outcome space scores 0, clamped to [0,1]. When the ideal distribution is
/// itself uniform the plain Hellinger fidelity is returned.
double normalized_fidelity(const Distribution& p_out, const Distribution& p_ideal,
                           std::uint64_t outcome_space_size);

Distribution uniform_distribution(int num_bits);

struct MetricRecord {
    int group = 0;             // qubit width
    std::string circuit_id;
    int iteration = 0;
    double create_time = 0.0;  // circuit construction, seconds
    double elapsed = 0.0;      // compile + load + queue + quantum + mitigate
    double compile_time = 0.0;
    double quantum_time = 0.0;
    double mitigate_time = 0.0;
    double fidelity = 0.0;             // Hellinger
    double normalized_fidelity = 0.0;
    int algorithmic_depth = 0;
    int normalized_depth = 0;
    std::map<std::string, double> app;  // application metrics (energy, AR, ...)
    bool failed = false;
    std::string error;
};

struct GroupStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

/// Hierarchical record sink (benchmark -> width group -> circuit/iteration).
/// Appends are thread safe; aggregates are computed on demand so append order
/// never affects them.
class MetricStore {
public:
    MetricStore() = default;
    explicit MetricStore(std::string benchmark_name) : benchmark_(std::move(benchmark_name)) {}
    MetricStore(const MetricStore& other);
    MetricStore& operator=(const MetricStore& other);

    void append(MetricRecord rec);
    const std::vector<MetricRecord>& records() const { return records_; }
    std::vector<int> groups() const;
    std::vector<const MetricRecord*> group_records(int group) const;

    GroupStats group_stats(int group,
                           const std::function<double(const MetricRecord&)>& field) const;
    double group_mean(int group, const std::function<double(const MetricRecord&)>& field) const;

    const std::string& benchmark() const { return benchmark_; }
    std::map<std::string, std::string> header;  // config snapshot for persistence

private:
    std::string benchmark_;
    mutable std::mutex mutex_;
    std::vector<MetricRecord> records_;
};

}  // namespace qbench
