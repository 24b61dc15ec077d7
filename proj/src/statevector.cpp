#include "qbench/statevector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qbench/rng.hpp"

namespace qbench {

void NoiseModel::validate() const {
    if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1)
        throw std::invalid_argument("depolarizing probabilities must lie in [0,1]");
    for (const auto& m : readout) {
        for (int r = 0; r < 2; ++r) {
            if (m(r, 0) < 0 || m(r, 1) < 0)
                throw std::invalid_argument("confusion matrix entries must be >= 0");
            if (std::abs(m(r, 0) + m(r, 1) - 1.0) > 1e-12)
                throw std::invalid_argument("confusion matrix rows must sum to 1");
        }
    }
}

NoiseModel& NoiseModel::with_symmetric_readout(double flip, int num_qubits) {
    Eigen::Matrix2d m;
    m << 1 - flip, flip, flip, 1 - flip;
    readout.assign(num_qubits, m);
    return *this;
}

StateVector::StateVector(int width) : width_(width), amp_(std::size_t{1} << width) {
    amp_[0] = 1.0;
}

void StateVector::apply_matrix1(int q, const Matrix2& m) {
    const std::size_t stride = std::size_t{1} << q;
    const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    const std::size_t n = amp_.size();
    for (std::size_t base = 0; base < n; base += stride << 1) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a = amp_[i], b = amp_[i + stride];
            amp_[i] = m00 * a + m01 * b;
            amp_[i + stride] = m10 * a + m11 * b;
        }
    }
}

void StateVector::apply_cx(int control, int target) {
    const std::size_t sc = std::size_t{1} << control;
    const std::size_t st = std::size_t{1} << target;
    const std::size_t n = amp_.size();
    for (std::size_t i = 0; i < n; ++i)
        if ((i & sc) && !(i & st)) std::swap(amp_[i], amp_[i | st]);
}

void StateVector::apply_pauli(int pauli, int q) {
    const std::size_t s = std::size_t{1} << q;
    const std::size_t n = amp_.size();
    switch (pauli) {
        case 1:
            for (std::size_t i = 0; i < n; ++i)
                if (!(i & s)) std::swap(amp_[i], amp_[i | s]);
            break;
        case 2:
            for (std::size_t i = 0; i < n; ++i)
                if (!(i & s)) {
                    const Complex a = amp_[i];
                    amp_[i] = Complex(0, -1) * amp_[i | s];
                    amp_[i | s] = Complex(0, 1) * a;
                }
            break;
        case 3:
            for (std::size_t i = 0; i < n; ++i)
                if (i & s) amp_[i] = -amp_[i];
            break;
        default:
            throw std::logic_error("bad pauli index");
    }
}

void StateVector::apply_matrix(const std::vector<int>& qubits, const Matrix& m) {
    const int k = static_cast<int>(qubits.size());
    if (k == 1) {
        apply_matrix1(qubits[0], Matrix2(m));
        return;
    }
    const std::size_t sub = std::size_t{1} << k;
    std::size_t joint = 0;
    std::vector<std::size_t> offsets(sub, 0);
    for (int b = 0; b < k; ++b) joint |= std::size_t{1} << qubits[b];
    for (std::size_t p = 0; p < sub; ++p)
        for (int b = 0; b < k; ++b)
            if (p & (std::size_t{1} << b)) offsets[p] |= std::size_t{1} << qubits[b];
    std::vector<Complex> buf(sub);
    const std::size_t n = amp_.size();
    for (std::size_t base = 0; base < n; ++base) {
        if (base & joint) continue;
        for (std::size_t p = 0; p < sub; ++p) buf[p] = amp_[base + offsets[p]];
        for (std::size_t r = 0; r < sub; ++r) {
            Complex acc = 0;
            for (std::size_t p = 0; p < sub; ++p) acc += m(r, p) * buf[p];
            amp_[base + offsets[r]] = acc;
        }
    }
}

void StateVector::apply(const Gate& g) {
    switch (g.kind) {
        case GateKind::CX:
            apply_cx(g.qubits[0], g.qubits[1]);
            break;
        case GateKind::Unitary:
            apply_matrix(g.qubits, *g.matrix);
            break;
        default:
            if (g.qubits.size() == 1)
                apply_matrix1(g.qubits[0], Matrix2(g.dense()));
            else
                apply_matrix(g.qubits, g.dense());
    }
}

double StateVector::norm_sq() const {
    double s = 0;
    for (const Complex& a : amp_) s += std::norm(a);
    return s;
}

namespace {

struct Program {
    std::vector<Gate> gates;
    std::vector<std::pair<int, int>> measures;  // (cbit, qubit), sorted by cbit
    int width = 0;
    int num_cbits = 0;
};

Program flatten(const Circuit& c) {
    Program p;
    p.width = c.width();
    p.num_cbits = c.num_cbits();
    for (const auto& inst : c.instructions()) {
        if (const Gate* g = std::get_if<Gate>(&inst)) p.gates.push_back(*g);
        else if (const Measure* m = std::get_if<Measure>(&inst))
            p.measures.emplace_back(m->cbit, m->qubit);
    }
    std::sort(p.measures.begin(), p.measures.end());
    if (p.measures.empty())
        throw std::invalid_argument("circuit has no measurements");
    return p;
}

std::string key_from_mask(std::uint64_t mask, int num_cbits) {
    std::string key(num_cbits, '0');
    for (int b = 0; b < num_cbits; ++b)
        if (mask & (std::uint64_t{1} << b)) key[b] = '1';
    return key;
}

std::uint64_t sample_index(const std::vector<Complex>& amp, double u) {
    const double target = u * [&] {
        double s = 0;
        for (const Complex& a : amp) s += std::norm(a);
        return s;
    }();
    double cum = 0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
        cum += std::norm(amp[i]);
        if (cum > target) return i;
    }
    return amp.size() - 1;
}

}  // namespace

Distribution run_ideal(const Circuit& c, const SimulatorOptions& opt) {
    if (c.width() > opt.width_cap)
        throw std::invalid_argument("circuit width exceeds simulator cap");
    Program p = flatten(c);
    StateVector sv(p.width);
    for (const Gate& g : p.gates) sv.apply(g);
    std::vector<double> probs(std::size_t{1} << p.num_cbits, 0.0);
    const auto& amp = sv.amplitudes();
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double pr = std::norm(amp[i]);
        if (pr == 0.0) continue;
        std::uint64_t mask = 0;
        for (const auto& [cbit, qubit] : p.measures)
            if (i & (std::size_t{1} << qubit)) mask |= std::uint64_t{1} << cbit;
        probs[mask] += pr;
    }
    Distribution out;
    for (std::size_t m = 0; m < probs.size(); ++m)
        if (probs[m] > 1e-16) out[key_from_mask(m, p.num_cbits)] = probs[m];
    return out;
}

ExecutionResult run_noisy(const Circuit& c, const NoiseModel& noise, std::uint64_t shots,
                          std::uint64_t seed, const SimulatorOptions& opt) {
    if (c.width() > opt.width_cap)
        throw std::invalid_argument("circuit width exceeds simulator cap");
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    noise.validate();

    const auto t0 = std::chrono::steady_clock::now();
    Program p = flatten(c);
    const std::size_t n_gates = p.gates.size();

    // Ideal prefix snapshots shared by all shots: a trajectory replays from the
    // last snapshot before its first fault. Snapshot spacing is widened when
    // the memory footprint would grow past ~64 MB.
    std::size_t snap_every = 8;
    {
        const std::size_t dim = std::size_t{1} << p.width;
        const std::size_t budget = 64ull << 20;
        while (snap_every < n_gates &&
               (n_gates / snap_every + 2) * dim * sizeof(Complex) > budget)
            snap_every *= 2;
    }
    std::vector<StateVector> snapshots;  // snapshots[s] = state after s*snap_every gates
    {
        StateVector sv(p.width);
        snapshots.push_back(sv);
        for (std::size_t g = 0; g < n_gates; ++g) {
            sv.apply(p.gates[g]);
            if ((g + 1) % snap_every == 0) snapshots.push_back(sv);
        }
        if (n_gates % snap_every != 0) snapshots.push_back(sv);
    }
    const StateVector& final_ideal = snapshots.back();

    struct Fault {
        std::size_t gate;
        int pauli_a, pauli_b;  // pauli_b < 0 for 1q faults
    };

    auto run_shot = [&](std::uint64_t shot, StateVector& scratch) -> std::uint64_t {
        RngStream rng(derive_stream(seed, shot));
        std::vector<Fault> faults;
        for (std::size_t g = 0; g < n_gates; ++g) {
            const std::size_t nq = p.gates[g].qubits.size();
            if (nq == 1 && noise.p1 > 0.0) {
                if (rng.uniform() < noise.p1)
                    faults.push_back({g, 1 + static_cast<int>(rng.uniform_int(3)), -1});
            } else if (nq == 2 && noise.p2 > 0.0) {
                if (rng.uniform() < noise.p2) {
                    const int code = static_cast<int>(rng.uniform_int(15)) + 1;
                    faults.push_back({g, code / 4, code % 4});
                }
            }
        }
        const StateVector* state = &final_ideal;
        if (!faults.empty()) {
            // replay from the last snapshot at or before the first faulted gate
            const std::size_t first = faults.front().gate;
            const std::size_t snap = std::min(first / snap_every, snapshots.size() - 1);
            scratch = snapshots[snap];
            std::size_t fi = 0;
            for (std::size_t g = snap * snap_every; g < n_gates; ++g) {
                scratch.apply(p.gates[g]);
                while (fi < faults.size() && faults[fi].gate == g) {
                    const Fault& f = faults[fi];
                    if (f.pauli_b < 0) {
                        scratch.apply_pauli(f.pauli_a, p.gates[g].qubits[0]);
                    } else {
                        if (f.pauli_a > 0) scratch.apply_pauli(f.pauli_a, p.gates[g].qubits[0]);
                        if (f.pauli_b > 0) scratch.apply_pauli(f.pauli_b, p.gates[g].qubits[1]);
                    }
                    ++fi;
                }
            }
            state = &scratch;
        }
        const std::uint64_t idx = sample_index(state->amplitudes(), rng.uniform());
        std::uint64_t mask = 0;
        for (const auto& [cbit, qubit] : p.measures) {
            int bit = (idx >> qubit) & 1;
            if (noise.has_readout() && qubit < static_cast<int>(noise.readout.size())) {
                const double flip = noise.readout[qubit](bit, 1 - bit);
                if (rng.uniform() < flip) bit = 1 - bit;
            }
            if (bit) mask |= std::uint64_t{1} << cbit;
        }
        return mask;
    };

    std::vector<std::uint64_t> outcomes(shots);
    int threads = opt.threads > 0 ? opt.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (static_cast<std::uint64_t>(threads) > shots) threads = static_cast<int>(shots);
    if (threads == 1 || !noise.has_gate_noise()) {
        StateVector scratch(p.width);
        for (std::uint64_t s = 0; s < shots; ++s) outcomes[s] = run_shot(s, scratch);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                StateVector scratch(p.width);
                for (std::uint64_t s = t; s < shots; s += threads)
                    outcomes[s] = run_shot(s, scratch);
            });
        }
        for (auto& th : pool) th.join();
    }

    ExecutionResult res;
    res.shots = shots;
    res.seed = seed;
    for (std::uint64_t s = 0; s < shots; ++s)
        ++res.counts[key_from_mask(outcomes[s], p.num_cbits)];
    for (const auto& [k, v] : res.counts)
        res.probabilities[k] = static_cast<double>(v) / static_cast<double>(shots);
    res.t_quantum =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::pair<Distribution, double> post_select(const Distribution& d, int bit, int value) {
    Distribution out;
    double success = 0.0;
    const char want = static_cast<char>('0' + value);
    for (const auto& [key, pr] : d) {
        if (bit < 0 || bit >= static_cast<int>(key.size()))
            throw std::invalid_argument("post_select: bit out of range");
        if (key[bit] != want) continue;
        success += pr;
        std::string rest = key;
        rest.erase(static_cast<std::size_t>(bit), 1);
        out[rest] += pr;
    }
    if (success <= 0.0)
        throw std::runtime_error("post_select: selected branch has zero probability");
    for (auto& [k, v] : out) v /= success;
    return {out, success};
}

Distribution marginalize(const Distribution& d, const std::vector<int>& keep_bits) {
    Distribution out;
    for (const auto& [key, pr] : d) {
        std::string sub;
        sub.reserve(keep_bits.size());
        for (int b : keep_bits) sub.push_back(key.at(static_cast<std::size_t>(b)));
        out[sub] += pr;
    }
    return out;
}

double z_parity_expectation(const Distribution& d, const std::vector<int>& bits) {
    double e = 0.0, total = 0.0;
    for (const auto& [key, pr] : d) {
        int parity = 0;
        for (int b : bits) parity ^= (key.at(static_cast<std::size_t>(b)) == '1');
        e += parity ? -pr : pr;
        total += pr;
    }
    return total > 0 ? e / total : 0.0;
}

Distribution counts_to_distribution(const Counts& counts) {
    std::uint64_t total = 0;
    for (const auto& [k, v] : counts) total += v;
    Distribution d;
    if (total == 0) return d;
    for (const auto& [k, v] : counts)
        d[k] = static_cast<double>(v) / static_cast<double>(total);
    return d;
}

}  // namespace qbench
