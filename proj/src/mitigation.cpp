#include "qbench/mitigation.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace qbench {

bool ConfusionMatrixSet::covers(const std::vector<int>& qubits) const {
    for (int q : qubits)
        if (!matrices.count(q)) return false;
    return true;
}

void ConfusionMatrixSet::validate() const {
    for (const auto& [q, m] : matrices) {
        for (int r = 0; r < 2; ++r) {
            if (m(r, 0) < 0 || m(r, 1) < 0)
                throw std::invalid_argument("confusion entries must be >= 0");
            if (std::abs(m(r, 0) + m(r, 1) - 1.0) > 1e-12)
                throw std::invalid_argument("confusion rows must sum to 1");
        }
    }
}

ConfusionMatrixSet calibrate_confusion(const NoiseModel& noise, const std::vector<int>& qubits,
                                       std::uint64_t shots, std::uint64_t seed) {
    ConfusionMatrixSet out;
    NoiseModel readout_only;
    readout_only.readout = noise.readout;
    for (int q : qubits) {
        Eigen::Matrix2d m;
        for (int prep = 0; prep < 2; ++prep) {
            Circuit c(q + 1);
            if (prep == 1) c.x(q);
            c.measure(q, 0);
            ExecutionResult res =
                run_noisy(c, readout_only, shots, derive_stream(seed, 2 * q + prep));
            double ones = 0;
            auto it = res.probabilities.find("1");
            if (it != res.probabilities.end()) ones = it->second;
            m(prep, 0) = 1.0 - ones;
            m(prep, 1) = ones;
        }
        out.matrices[q] = m;
    }
    return out;
}

namespace {

MitigationResult mitigate_impl(const Distribution& input,
                               const ConfusionMatrixSet& cal,
                               const std::vector<int>& cbit_to_qubit) {
    const auto t0 = std::chrono::steady_clock::now();
    cal.validate();
    const int bits = static_cast<int>(cbit_to_qubit.size());
    if (bits > 24) throw std::invalid_argument("mitigation register too wide");
    const std::size_t dim = std::size_t{1} << bits;
    std::vector<double> p(dim, 0.0);
    for (const auto& [key, pr] : input) {
        std::size_t idx = 0;
        for (int b = 0; b < bits; ++b)
            if (key.at(static_cast<std::size_t>(b)) == '1') idx |= std::size_t{1} << b;
        p[idx] += pr;
    }
    // apply (M_q^T)^-1 on each bit axis
    for (int b = 0; b < bits; ++b) {
        const int q = cbit_to_qubit[b];
        auto it = cal.matrices.find(q);
        if (it == cal.matrices.end())
            throw std::invalid_argument("calibration does not cover qubit " + std::to_string(q));
        const Eigen::Matrix2d& m = it->second;
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (std::abs(det) < 1e-12)
            throw std::invalid_argument("singular confusion matrix for qubit " + std::to_string(q));
        // forward: p_obs = M^T p_true (per bit); inverse of M^T
        const double i00 = m(1, 1) / det, i01 = -m(1, 0) / det;
        const double i10 = -m(0, 1) / det, i11 = m(0, 0) / det;
        const std::size_t stride = std::size_t{1} << b;
        for (std::size_t base = 0; base < dim; base += stride << 1)
            for (std::size_t i = base; i < base + stride; ++i) {
                const double a0 = p[i], a1 = p[i + stride];
                p[i] = i00 * a0 + i01 * a1;
                p[i + stride] = i10 * a0 + i11 * a1;
            }
    }
    MitigationResult res;
    double pos = 0.0, neg = 0.0;
    for (double v : p) (v >= 0 ? pos : neg) += v;
    res.clipped_mass = -neg;
    if (pos <= 0) throw std::runtime_error("mitigation clipped all probability mass");
    for (std::size_t i = 0; i < dim; ++i) {
        if (p[i] <= 0) continue;
        std::string key(bits, '0');
        for (int b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) key[b] = '1';
        res.distribution[key] = p[i] / pos;
    }
    res.t_mitigate =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace

MitigationResult mitigate_counts(const Counts& counts, const ConfusionMatrixSet& cal,
                                 const std::vector<int>& cbit_to_qubit) {
    return mitigate_impl(counts_to_distribution(counts), cal, cbit_to_qubit);
}

MitigationResult mitigate_distribution(const Distribution& d, const ConfusionMatrixSet& cal,
                                       const std::vector<int>& cbit_to_qubit) {
    return mitigate_impl(d, cal, cbit_to_qubit);
}

Distribution apply_confusion(const Distribution& d, const ConfusionMatrixSet& cal,
                             const std::vector<int>& cbit_to_qubit) {
    Distribution out;
    const int bits = static_cast<int>(cbit_to_qubit.size());
    for (const auto& [key, pr] : d) {
        // expand over all observed strings with product weights
        std::vector<std::pair<std::string, double>> frontier{{std::string(), pr}};
        for (int b = 0; b < bits; ++b) {
            const Eigen::Matrix2d& m = cal.matrices.at(cbit_to_qubit[b]);
            const int t = key.at(static_cast<std::size_t>(b)) == '1' ? 1 : 0;
            std::vector<std::pair<std::string, double>> next;
            for (auto& [prefix, w] : frontier)
                for (int o = 0; o < 2; ++o) {
                    if (m(t, o) == 0) continue;
                    next.emplace_back(prefix + static_cast<char>('0' + o), w * m(t, o));
                }
            frontier = std::move(next);
        }
        for (auto& [k, w] : frontier) out[k] += w;
    }
    return out;
}

}  // namespace qbench
