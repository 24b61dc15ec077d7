#include "qbench/transpiler.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qbench/builders.hpp"
#include "qbench/kak.hpp"

namespace qbench {

namespace {
constexpr double kPi = M_PI;

double wrap_angle(double t) {
    t = std::remainder(t, 2 * kPi);
    if (t <= -kPi) t += 2 * kPi;
    return t;
}
}  // namespace

EulerZYZ euler_zyz(const Matrix2& u) {
    Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const double alpha = std::arg(det) / 2;
    Matrix2 v = u * std::exp(Complex(0, -alpha));
    const double a00 = std::abs(v(0, 0)), a10 = std::abs(v(1, 0));
    const double gamma = 2 * std::atan2(a10, a00);
    double beta, delta;
    if (a10 < 1e-12) {
        delta = 0;
        beta = -2 * std::arg(v(0, 0));
    } else if (a00 < 1e-12) {
        delta = 0;
        beta = 2 * std::arg(v(1, 0));
    } else {
        beta = std::arg(v(1, 0)) - std::arg(v(0, 0));
        delta = -std::arg(v(0, 0)) - std::arg(v(1, 0));
    }
    return {alpha, beta, gamma, delta};
}

namespace {

void emit_zyz(Circuit& out, const Matrix2& u, int q) {
    EulerZYZ e = euler_zyz(u);
    if (std::abs(wrap_angle(e.delta)) > 1e-12) out.rz(e.delta, q);
    if (std::abs(wrap_angle(e.gamma)) > 1e-12) out.ry(e.gamma, q);
    if (std::abs(wrap_angle(e.beta)) > 1e-12) out.rz(e.beta, q);
}

// ---- cosine-sine decomposition for the 3-qubit Shannon decomposition ----

struct Csd {
    Matrix l0, l1, r0, r1;
    std::vector<double> theta;  // mid block angles, ascending
};

Csd cosine_sine(const Matrix& u) {
    const Eigen::Index n = u.rows() / 2;
    Matrix u00 = u.topLeftCorner(n, n);
    Matrix u01 = u.topRightCorner(n, n);
    Matrix u10 = u.bottomLeftCorner(n, n);
    Matrix u11 = u.bottomRightCorner(n, n);

    Eigen::JacobiSVD<Matrix> svd(u00, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix l0 = svd.matrixU();
    Matrix r0 = svd.matrixV();
    Eigen::VectorXd cvals = svd.singularValues();  // descending cos

    Matrix t = u10 * r0;
    Eigen::HouseholderQR<Matrix> qr(t);
    Matrix l1 = qr.householderQ() * Matrix::Identity(n, n);
    Matrix rm = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::VectorXd svals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = rm(i, i);
        const double a = std::abs(d);
        if (a > 1e-12) l1.col(i) *= d / a;
        svals(i) = a;
    }

    Matrix cm = Matrix::Zero(n, n), sm = Matrix::Zero(n, n);
    Csd out;
    out.theta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cv = std::clamp(cvals(i), 0.0, 1.0);
        const double sv = std::clamp(svals(i), 0.0, 1.0);
        out.theta[i] = std::atan2(sv, cv);
        cm(i, i) = std::cos(out.theta[i]);
        sm(i, i) = std::sin(out.theta[i]);
    }

    Matrix x = l0.adjoint() * u01;
    Matrix y = l1.adjoint() * u11;
    Matrix r1h = cm * y - sm * x;  // = R1^dagger up to roundoff
    Eigen::JacobiSVD<Matrix> pol(r1h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r1h = pol.matrixU() * pol.matrixV().adjoint();

    out.l0 = l0;
    out.l1 = l1;
    out.r0 = r0;
    out.r1 = r1h.adjoint();

    Matrix rec(u.rows(), u.cols());
    rec.topLeftCorner(n, n) = l0 * cm * r0.adjoint();
    rec.topRightCorner(n, n) = -l0 * sm * out.r1.adjoint();
    rec.bottomLeftCorner(n, n) = l1 * sm * r0.adjoint();
    rec.bottomRightCorner(n, n) = l1 * cm * out.r1.adjoint();
    if ((rec - u).cwiseAbs().maxCoeff() > 1e-9)
        throw std::logic_error("cosine-sine decomposition failed");
    return out;
}

// diag(V, W) selected on `sel`, acting on two lower qubits: demultiplex as
// (I (x) L) (D + D^dag) (I (x) R) with V W^dag = L D^2 L^dag (Schur).
void emit_multiplexor2(Circuit& out, const Matrix& v, const Matrix& w,
                       const std::vector<int>& lower, int sel) {
    Matrix prod = v * w.adjoint();
    Eigen::ComplexSchur<Matrix> schur(prod);
    Matrix q = schur.matrixU();
    Vector d2 = schur.matrixT().diagonal();
    std::vector<double> phi(d2.size()), neg_phi(d2.size());
    Matrix dh = Matrix::Zero(d2.size(), d2.size());
    for (Eigen::Index i = 0; i < d2.size(); ++i) {
        phi[i] = std::arg(d2(i));
        neg_phi[i] = -phi[i];
        dh(i, i) = std::exp(Complex(0, phi[i] / 2));
    }
    Matrix r = dh.adjoint() * q.adjoint() * v;
    Circuit rc = synthesize_two_qubit(Matrix4(r), lower[0], lower[1], out.width());
    for (const auto& inst : rc.instructions()) out.add(inst);
    Circuit ucz = uniformly_controlled_rz(neg_phi, lower, sel, out.width());
    for (const auto& inst : ucz.instructions()) out.add(inst);
    Circuit lc = synthesize_two_qubit(Matrix4(q), lower[0], lower[1], out.width());
    for (const auto& inst : lc.instructions()) out.add(inst);
}

void emit_qsd3(Circuit& out, const Matrix& u, const std::vector<int>& qubits) {
    Csd csd = cosine_sine(u);
    const std::vector<int> lower{qubits[0], qubits[1]};
    const int sel = qubits[2];
    // right multiplexor diag(R0^dag, R1^dag)
    emit_multiplexor2(out, csd.r0.adjoint(), csd.r1.adjoint(), lower, sel);
    // middle: uniformly controlled RY(2 theta_j) on sel
    std::vector<double> angles(csd.theta.size());
    for (std::size_t i = 0; i < angles.size(); ++i) angles[i] = 2 * csd.theta[i];
    Circuit mid = uniformly_controlled_ry(angles, lower, sel, out.width());
    for (const auto& inst : mid.instructions()) out.add(inst);
    // left multiplexor diag(L0, L1)
    emit_multiplexor2(out, csd.l0, csd.l1, lower, sel);
}

}  // namespace

Circuit unitary_to_circuit(const Matrix& u, const std::vector<int>& qubits, int width) {
    Circuit out(width);
    switch (qubits.size()) {
        case 1:
            emit_zyz(out, Matrix2(u), qubits[0]);
            return out;
        case 2: {
            Circuit c = synthesize_two_qubit(Matrix4(u), qubits[0], qubits[1], width);
            for (const auto& inst : c.instructions()) out.add(inst);
            return out;
        }
        case 3:
            emit_qsd3(out, u, qubits);
            return out;
        default:
            throw std::invalid_argument("unitary_to_circuit supports 1..3 qubits");
    }
}

Circuit decompose_to_basis(const Circuit& c) {
    Circuit out(c.width());
    out.metadata = c.metadata;
    for (const auto& [name, span] : c.registers()) out.set_register(name, span.start, span.count);
    for (const auto& inst : c.instructions()) {
        const Gate* g = std::get_if<Gate>(&inst);
        if (!g) {
            out.add(inst);
            continue;
        }
        switch (g->kind) {
            case GateKind::RX:
            case GateKind::RY:
            case GateKind::RZ:
            case GateKind::CX:
                out.add(*g);
                break;
            case GateKind::H:
                out.rz(kPi / 2, g->qubits[0]);
                out.rx(kPi / 2, g->qubits[0]);
                out.rz(kPi / 2, g->qubits[0]);
                break;
            case GateKind::X: out.rx(kPi, g->qubits[0]); break;
            case GateKind::Y: out.ry(kPi, g->qubits[0]); break;
            case GateKind::Z: out.rz(kPi, g->qubits[0]); break;
            case GateKind::S: out.rz(kPi / 2, g->qubits[0]); break;
            case GateKind::Sdg: out.rz(-kPi / 2, g->qubits[0]); break;
            case GateKind::XRot: out.rx(-2 * g->theta, g->qubits[0]); break;
            case GateKind::ZZ:
                out.cx(g->qubits[0], g->qubits[1]);
                out.rz(g->theta, g->qubits[1]);
                out.cx(g->qubits[0], g->qubits[1]);
                break;
            case GateKind::CZ:
                out.rz(kPi / 2, g->qubits[0]);
                out.rz(kPi / 2, g->qubits[1]);
                out.cx(g->qubits[0], g->qubits[1]);
                out.rz(-kPi / 2, g->qubits[1]);
                out.cx(g->qubits[0], g->qubits[1]);
                break;
            case GateKind::Swap:
                out.cx(g->qubits[0], g->qubits[1]);
                out.cx(g->qubits[1], g->qubits[0]);
                out.cx(g->qubits[0], g->qubits[1]);
                break;
            case GateKind::Unitary: {
                Circuit syn = unitary_to_circuit(*g->matrix, g->qubits, c.width());
                Circuit lowered = decompose_to_basis(syn);
                for (const auto& sub : lowered.instructions()) out.add(sub);
                break;
            }
        }
    }
    return out;
}

Circuit optimize_level1(const Circuit& c) {
    std::vector<Instruction> cur(c.instructions().begin(), c.instructions().end());
    bool changed = true;
    auto is_rotation = [](GateKind k) {
        return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
    };
    while (changed) {
        changed = false;
        std::vector<std::optional<Instruction>> next;
        std::vector<int> last(c.width(), -1);
        auto touch = [&](const std::vector<int>& qs, int idx) {
            for (int q : qs) last[q] = idx;
        };
        for (const Instruction& inst : cur) {
            if (const Barrier* b = std::get_if<Barrier>(&inst)) {
                next.emplace_back(inst);
                if (b->qubits.empty()) {
                    for (int q = 0; q < c.width(); ++q) last[q] = static_cast<int>(next.size()) - 1;
                } else {
                    touch(b->qubits, static_cast<int>(next.size()) - 1);
                }
                continue;
            }
            if (const Measure* m = std::get_if<Measure>(&inst)) {
                next.emplace_back(inst);
                last[m->qubit] = static_cast<int>(next.size()) - 1;
                continue;
            }
            Gate g = std::get<Gate>(inst);
            if (is_rotation(g.kind)) {
                g.theta = wrap_angle(g.theta);
                if (std::abs(g.theta) <= 1e-10) {
                    changed = true;
                    continue;
                }
            }
            // candidate for merging: the previous instruction on all of this
            // gate's qubits must be one and the same gate
            int cand = g.qubits.empty() ? -1 : last[g.qubits[0]];
            for (int q : g.qubits)
                if (last[q] != cand) cand = -1;
            Gate* prev = nullptr;
            if (cand >= 0 && next[cand].has_value())
                prev = std::get_if<Gate>(&*next[cand]);
            if (prev && prev->kind == g.kind && prev->qubits == g.qubits) {
                if (is_rotation(g.kind)) {
                    prev->theta = wrap_angle(prev->theta + g.theta);
                    changed = true;
                    continue;
                }
                if (g.kind == GateKind::CX) {
                    next[cand].reset();
                    changed = true;
                    continue;
                }
            }
            next.emplace_back(std::move(g));
            touch(std::get<Gate>(*next.back()).qubits, static_cast<int>(next.size()) - 1);
        }
        cur.clear();
        for (auto& o : next)
            if (o) cur.push_back(std::move(*o));
    }
    Circuit out(c.width());
    out.metadata = c.metadata;
    for (const auto& [name, span] : c.registers()) out.set_register(name, span.start, span.count);
    for (auto& inst : cur) out.add(std::move(inst));
    return out;
}

int normalized_depth(const Circuit& c) {
    return algorithmic_depth(optimize_level1(decompose_to_basis(c)));
}

}  // namespace qbench
