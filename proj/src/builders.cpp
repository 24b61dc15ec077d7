#include "qbench/builders.hpp"

#include <cmath>
#include <stdexcept>

namespace qbench {

Circuit qft(int n, bool inverse) {
    if (n < 1) throw std::invalid_argument("qft requires n >= 1");
    Circuit c(n);
    auto cphase = [&](double phi, int a, int b) {
        // diag(1,1,1,e^{i phi}) up to global phase
        c.rz(phi / 2, a);
        c.rz(phi / 2, b);
        c.zz(-phi / 2, a, b);
    };
    for (int i = n - 1; i >= 0; --i) {
        c.h(i);
        for (int j = i - 1; j >= 0; --j) cphase(M_PI / double(1 << (i - j)), j, i);
    }
    for (int i = 0; i < n / 2; ++i) c.swap_gate(i, n - 1 - i);
    return inverse ? c.adjoint() : c;
}

namespace {

std::vector<double> walsh_coefficients(std::vector<double> v) {
    const std::size_t dim = v.size();
    for (std::size_t step = 1; step < dim; step <<= 1)
        for (std::size_t i = 0; i < dim; i += step << 1)
            for (std::size_t j = i; j < i + step; ++j) {
                double a = v[j], b = v[j + step];
                v[j] = (a + b) / 2;
                v[j + step] = (a - b) / 2;
            }
    return v;
}

Circuit uc_rotation(GateKind axis, const std::vector<double>& angles,
                    const std::vector<int>& controls, int target, int width) {
    const std::size_t k = controls.size();
    if (angles.size() != (std::size_t{1} << k))
        throw std::invalid_argument("uniformly controlled rotation: need 2^k angles");
    Circuit c(width);
    if (k == 0) {
        c.gate(axis, {target}, angles[0]);
        return c;
    }
    // Gray-code walk: rotation i carries the Walsh coefficient at gray(i); the
    // CX after it flips the parity bit where gray(i) and gray(i+1) differ.
    // X-conjugation negates RY/RZ angles, so the accumulated parities realize
    // exactly RY(angles[j]) for every control state j.
    const std::vector<double> coef = walsh_coefficients(angles);
    const std::size_t m = std::size_t{1} << k;
    auto gray = [](std::size_t i) { return i ^ (i >> 1); };
    for (std::size_t i = 0; i < m; ++i) {
        c.gate(axis, {target}, coef[gray(i)]);
        std::size_t change = gray(i) ^ gray((i + 1) % m);
        int bit = 0;
        while (!(change & 1)) {
            change >>= 1;
            ++bit;
        }
        c.cx(controls[bit], target);
    }
    return c;
}

}  // namespace

Circuit uniformly_controlled_ry(const std::vector<double>& angles,
                                const std::vector<int>& controls, int target, int width) {
    return uc_rotation(GateKind::RY, angles, controls, target, width);
}

Circuit uniformly_controlled_rz(const std::vector<double>& angles,
                                const std::vector<int>& controls, int target, int width) {
    return uc_rotation(GateKind::RZ, angles, controls, target, width);
}

Circuit diagonal_phases(const std::vector<double>& phases,
                        const std::vector<int>& qubits, int width) {
    const std::size_t dim = std::size_t{1} << qubits.size();
    if (phases.size() != dim)
        throw std::invalid_argument("diagonal_phases: need 2^k phases");
    // phases(x) = sum_S coef[S] * (-1)^<S,x>
    const std::vector<double> coef = walsh_coefficients(phases);
    Circuit c(width);
    for (std::size_t s = 1; s < dim; ++s) {
        if (std::abs(coef[s]) < 1e-15) continue;
        std::vector<int> bits;
        for (std::size_t b = 0; b < qubits.size(); ++b)
            if (s & (std::size_t{1} << b)) bits.push_back(qubits[b]);
        const int anchor = bits.back();
        for (std::size_t i = 0; i + 1 < bits.size(); ++i) c.cx(bits[i], anchor);
        // exp(i*coef * Z_S) = RZ(-2*coef) on the accumulated parity
        c.rz(-2 * coef[s], anchor);
        for (std::size_t i = bits.size() - 1; i-- > 0;) c.cx(bits[i], anchor);
    }
    return c;
}

Circuit ghz(int n) {
    Circuit c(n);
    c.h(0);
    for (int q = 1; q < n; ++q) c.cx(q - 1, q);
    c.measure_all();
    return c;
}

}  // namespace qbench
