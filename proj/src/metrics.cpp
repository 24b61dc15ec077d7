#include "qbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qbench {

double hellinger_fidelity(const Distribution& p, const Distribution& q) {
    double bc = 0.0;
    for (const auto& [key, pv] : p) {
        auto it = q.find(key);
        if (it != q.end()) bc += std::sqrt(pv * it->second);
    }
    return bc * bc;
}

Distribution uniform_distribution(int num_bits) {
    const std::size_t n = std::size_t{1} << num_bits;
    Distribution d;
    for (std::size_t i = 0; i < n; ++i) {
        std::string key(num_bits, '0');
        for (int b = 0; b < num_bits; ++b)
            if (i & (std::size_t{1} << b)) key[b] = '1';
        d[key] = 1.0 / static_cast<double>(n);
    }
    return d;
}

double normalized_fidelity(const Distribution& p_out, const Distribution& p_ideal,
                           std::uint64_t outcome_space_size) {
    if (outcome_space_size < 1) throw std::invalid_argument("outcome space must be nonempty");
    const double n = static_cast<double>(outcome_space_size);
    // F_H(uniform, ideal) = (sum_i sqrt(p_i / N))^2
    double s = 0.0;
    for (const auto& [key, pv] : p_ideal) s += std::sqrt(pv / n);
    const double f_uniform = s * s;
    const double f = hellinger_fidelity(p_out, p_ideal);
    if (std::abs(1.0 - f_uniform) < 1e-12) return f;  // ideal is uniform
    const double scaled = (f - f_uniform) / (1.0 - f_uniform);
    return std::clamp(scaled, 0.0, 1.0);
}

MetricStore::MetricStore(const MetricStore& other) {
    std::lock_guard<std::mutex> lock(other.mutex_);
    benchmark_ = other.benchmark_;
    records_ = other.records_;
    header = other.header;
}

MetricStore& MetricStore::operator=(const MetricStore& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    benchmark_ = other.benchmark_;
    records_ = other.records_;
    header = other.header;
    return *this;
}

void MetricStore::append(MetricRecord rec) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_.push_back(std::move(rec));
}

std::vector<int> MetricStore::groups() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::set<int> g;
    for (const auto& r : records_) g.insert(r.group);
    return {g.begin(), g.end()};
}

std::vector<const MetricRecord*> MetricStore::group_records(int group) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<const MetricRecord*> out;
    for (const auto& r : records_)
        if (r.group == group) out.push_back(&r);
    return out;
}

GroupStats MetricStore::group_stats(
    int group, const std::function<double(const MetricRecord&)>& field) const {
    std::vector<double> vals;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& r : records_)
            if (r.group == group && !r.failed) vals.push_back(field(r));
    }
    GroupStats s;
    s.count = vals.size();
    if (vals.empty()) return s;
    for (double v : vals) s.mean += v;
    s.mean /= static_cast<double>(vals.size());
    for (double v : vals) s.stddev += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(vals.size()));
    return s;
}

double MetricStore::group_mean(int group,
                               const std::function<double(const MetricRecord&)>& field) const {
    return group_stats(group, field).mean;
}

}  // namespace qbench
