#include "qbench/kak.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbench {

namespace {

constexpr double kPi = M_PI;
constexpr double kQuarterPi = M_PI / 4;

// Magic (Bell-like) basis columns m0..m3; rows indexed |b1 b0>.
const Matrix4& magic_basis() {
    static const Matrix4 b = [] {
        Matrix4 m;
        const double r = 1.0 / std::sqrt(2.0);
        const Complex i(0, 1);
        m << r, -i * r, 0, 0,
             0, 0, r, -i * r,
             0, 0, -r, -i * r,
             r, i * r, 0, 0;
        return m;
    }();
    return b;
}

// Eigenphases of N(c) on the magic basis vectors.
Eigen::Vector4d lambdas_from_c(const WeylCoordinates& c, double gamma) {
    Eigen::Vector4d l;
    l << gamma + c.c1 - c.c2 + c.c3,
         gamma - c.c1 + c.c2 + c.c3,
         gamma - c.c1 - c.c2 - c.c3,
         gamma + c.c1 + c.c2 - c.c3;
    return l;
}

// Simultaneously diagonalize commuting real symmetric matrices; returns an
// orthogonal basis. Degenerate clusters of x are re-diagonalized against y.
Eigen::Matrix4d simultaneous_diagonalize(const Eigen::Matrix4d& x, const Eigen::Matrix4d& y) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(x);
    Eigen::Matrix4d o = es.eigenvectors();
    Eigen::Vector4d w = es.eigenvalues();
    int i = 0;
    while (i < 4) {
        int j = i;
        while (j < 4 && std::abs(w(j) - w(i)) < 1e-7) ++j;
        if (j - i > 1) {
            Eigen::MatrixXd blk = o.middleCols(i, j - i);
            Eigen::MatrixXd sub = blk.transpose() * y * blk;
            sub = ((sub + sub.transpose()) / 2).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sub);
            o.middleCols(i, j - i) = blk * es2.eigenvectors();
        }
        i = j;
    }
    return o;
}

struct RawKak {
    double gamma;
    double c[3];
    Matrix4 l1, l2;  // u = e^{i gamma} l1 N(c) l2
};

RawKak kak_raw(const Matrix4& u) {
    const Matrix4& b = magic_basis();
    Matrix4 m = b.adjoint() * u * b;
    Matrix4 s4 = m.transpose() * m;
    s4 = ((s4 + s4.transpose()) / 2).eval();
    Eigen::Matrix4d p = simultaneous_diagonalize(s4.real(), s4.imag());
    if (p.determinant() < 0) p.col(0) *= -1;

    Eigen::Vector4d theta;
    for (int i2 = 0; i2 < 4; ++i2) {
        Complex d = p.col(i2).cast<Complex>().dot(s4 * p.col(i2).cast<Complex>());
        theta(i2) = 0.5 * std::atan2(d.imag(), d.real());
    }
    Matrix4 dh_inv = Matrix4::Zero();
    for (int i2 = 0; i2 < 4; ++i2) dh_inv(i2, i2) = std::exp(Complex(0, -theta(i2)));
    Matrix4 q1c = m * p.cast<Complex>() * dh_inv;
    Eigen::Matrix4d q1 = q1c.real();
    if (q1.determinant() < 0) {
        q1.col(0) *= -1;
        theta(0) += kPi;
    }

    RawKak out;
    out.gamma = theta.sum() / 4;
    out.c[0] = (theta(0) - theta(1) - theta(2) + theta(3)) / 4;
    out.c[1] = (-theta(0) + theta(1) - theta(2) + theta(3)) / 4;
    out.c[2] = (theta(0) + theta(1) - theta(2) - theta(3)) / 4;
    out.l1 = b * q1.cast<Complex>() * b.adjoint();
    out.l2 = b * p.transpose().cast<Complex>() * b.adjoint();
    return out;
}

Matrix4 kron2(const Matrix2& hi, const Matrix2& lo) {
    Matrix4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = hi(i, j) * lo;
    return out;
}

Matrix2 pauli_mat(int axis) {
    switch (axis) {
        case 0: return gates::x();
        case 1: return gates::y();
        default: return gates::z();
    }
}

// Local conjugations that permute the coordinate axes: v N(c) v^dag has the
// two listed coordinates swapped.
Matrix4 swap_conjugator(int i, int j) {
    const int k = 3 - i - j;
    Matrix2 v;
    if (k == 2) v = gates::s();                       // swap XX <-> YY
    else if (k == 0) v = gates::rx(kPi / 2);          // swap YY <-> ZZ
    else v = gates::h();                              // swap XX <-> ZZ
    return kron2(v, v);
}

// Tracked canonicalization: maintains u = e^{i gamma} l1 N(c) l2 exactly while
// moving c into the chamber.
void canonicalize(RawKak& r) {
    auto shift_down = [&](int k) {  // c[k] -= pi/2
        r.c[k] -= kPi / 2;
        Matrix4 ss = kron2(pauli_mat(k), pauli_mat(k));
        r.l1 = (r.l1 * ss).eval();
        r.gamma += kPi / 2;
    };
    auto shift_up = [&](int k) {  // c[k] += pi/2
        r.c[k] += kPi / 2;
        Matrix4 ss = kron2(pauli_mat(k), pauli_mat(k));
        r.l1 = (r.l1 * ss).eval();
        r.gamma -= kPi / 2;
    };
    auto flip_pair = [&](int i, int j) {  // negate c[i], c[j]
        const int k = 3 - i - j;
        Matrix4 sk = kron2(pauli_mat(k), Matrix2::Identity());
        r.c[i] = -r.c[i];
        r.c[j] = -r.c[j];
        r.l1 = (r.l1 * sk).eval();
        r.l2 = (sk * r.l2).eval();
    };
    auto swap_coords = [&](int i, int j) {
        Matrix4 v = swap_conjugator(i, j);
        std::swap(r.c[i], r.c[j]);
        r.l1 = (r.l1 * v.adjoint()).eval();
        r.l2 = (v * r.l2).eval();
    };

    const double tol = 1e-13;
    for (int guard = 0; guard < 64; ++guard) {
        bool changed = false;
        // bring each coordinate into (-pi/4, pi/4]
        for (int k = 0; k < 3; ++k) {
            int m = static_cast<int>(std::ceil(r.c[k] / (kPi / 2) - 0.5 - 1e-12));
            while (m > 0) { shift_down(k); --m; changed = true; }
            while (m < 0) { shift_up(k); ++m; changed = true; }
        }
        // sort descending
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (r.c[j] > r.c[i] + tol) {
                    swap_coords(i, j);
                    changed = true;
                }
        if (r.c[1] < -tol) {  // two negatives: make both positive
            flip_pair(1, 2);
            changed = true;
            continue;
        }
        if (r.c[2] < -tol && -r.c[2] > r.c[1] + tol) {  // |c3| too large: move sign
            flip_pair(1, 2);
            changed = true;
            continue;
        }
        if (r.c[2] < -tol && r.c[0] > kQuarterPi - 1e-9) {
            // boundary c1 = pi/4: sign of c3 is a gauge choice; fix it positive
            flip_pair(0, 2);
            shift_up(0);
            changed = true;
            continue;
        }
        if (!changed) break;
    }
}

double trace_invariant_im(const Matrix4& v) {
    const Matrix4& b = magic_basis();
    Matrix4 m = b.adjoint() * v * b;
    Complex tr = (m.transpose() * m).trace();
    Complex det = v.determinant();
    return (tr * tr / det).imag();
}

// W2(a, b) circuit: CX (RX(-2a) on bit0, RZ(-2b) on bit1) CX = N(a, 0, b).
Circuit w2_circuit(double a, double b) {
    Circuit c(2);
    c.cx(0, 1);
    c.rx(-2 * a, 0);
    c.rz(-2 * b, 1);
    c.cx(0, 1);
    return c;
}

void emit_local_pair(Circuit& out, const Matrix4& k, int lo, int hi) {
    auto [a_hi, b_lo] = factor_local(k);
    const double id_tol = 1e-11;
    if (process_fidelity(Matrix(b_lo), Matrix(Matrix2::Identity())) < 1 - id_tol)
        out.unitary(b_lo, {lo});
    if (process_fidelity(Matrix(a_hi), Matrix(Matrix2::Identity())) < 1 - id_tol)
        out.unitary(a_hi, {hi});
}

// circuit for U = e^{i phase} k1 N(c') k2 given a template circuit whose
// unitary has canonical coordinates c'
void assemble_dressed(Circuit& out, const WeylDecomposition& dec, const Circuit& templ,
                      int lo, int hi) {
    Matrix4 tm = Matrix4(circuit_unitary(templ));
    WeylDecomposition dt = weyl_decompose(tm);
    const double dc = std::abs(dt.c.c1 - dec.c.c1) + std::abs(dt.c.c2 - dec.c.c2) +
                      std::abs(dt.c.c3 - dec.c.c3);
    if (dc > 1e-8) throw std::logic_error("canonical template coordinate mismatch");
    Matrix4 k2 = dt.k2.adjoint() * dec.k2;
    Matrix4 k1 = dec.k1 * dt.k1.adjoint();
    emit_local_pair(out, k2, lo, hi);
    Circuit placed = embedded(templ, out.width(), {lo, hi});
    for (const auto& inst : placed.instructions()) out.add(inst);
    emit_local_pair(out, k1, lo, hi);
}

}  // namespace

Matrix4 canonical_gate(const WeylCoordinates& c) {
    const Matrix4& b = magic_basis();
    Eigen::Vector4d l = lambdas_from_c(c, 0.0);
    Matrix4 d = Matrix4::Zero();
    for (int i = 0; i < 4; ++i) d(i, i) = std::exp(Complex(0, l(i)));
    return b * d * b.adjoint();
}

WeylDecomposition weyl_decompose(const Matrix4& u, double tol) {
    if (unitarity_error(u) > tol)
        throw std::invalid_argument("weyl_decompose: input is not unitary");
    RawKak r = kak_raw(u);
    canonicalize(r);
    WeylDecomposition out;
    out.c = {r.c[0], r.c[1], r.c[2]};
    out.k1 = r.l1;
    out.k2 = r.l2;
    out.phase = r.gamma;
    // reconstruction safety net
    Matrix4 rec = std::exp(Complex(0, r.gamma)) * r.l1 * canonical_gate(out.c) * r.l2;
    if ((rec - u).cwiseAbs().maxCoeff() > 1e-8)
        throw std::logic_error("weyl_decompose: reconstruction failed");
    return out;
}

std::pair<Matrix2, Matrix2> factor_local(const Matrix4& k) {
    int bi = 0, bj = 0;
    double best = -1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double n = k.block<2, 2>(2 * i, 2 * j).norm();
            if (n > best) {
                best = n;
                bi = i;
                bj = j;
            }
        }
    Matrix2 blk = k.block<2, 2>(2 * bi, 2 * bj);
    Complex det = blk(0, 0) * blk(1, 1) - blk(0, 1) * blk(1, 0);
    Matrix2 b = blk / std::sqrt(det);
    Matrix2 a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            a(i, j) = (b.adjoint() * k.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
    // deterministic phase split: largest entry of a real positive
    int mi = 0, mj = 0;
    double mv = -1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(a(i, j)) > mv) {
                mv = std::abs(a(i, j));
                mi = i;
                mj = j;
            }
    Complex ph = a(mi, mj) / std::abs(a(mi, mj));
    a /= ph;
    b *= ph;
    if ((kron2(a, b) - k).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("factor_local: matrix is not a local product");
    return {a, b};
}

WeylCoordinates project_to_cx_class(const WeylCoordinates& c, int k) {
    switch (k) {
        case 0: return {0, 0, 0};
        case 1: return {kQuarterPi, 0, 0};
        case 2: return {c.c1, c.c2, 0};
        default: return c;
    }
}

double resynthesis_fidelity(const WeylCoordinates& c, int k) {
    WeylCoordinates p = project_to_cx_class(c, k);
    const double d1 = c.c1 - p.c1, d2 = c.c2 - p.c2, d3 = c.c3 - p.c3;
    const Complex z(std::cos(d1) * std::cos(d2) * std::cos(d3),
                    std::sin(d1) * std::sin(d2) * std::sin(d3));
    const double tr = 4 * std::abs(z);
    return (tr * tr + 4) / 20.0;
}

int exact_cx_count(const WeylCoordinates& c, double tol) {
    if (std::abs(c.c1) <= tol && std::abs(c.c2) <= tol && std::abs(c.c3) <= tol) return 0;
    if (std::abs(c.c1 - kQuarterPi) <= tol && std::abs(c.c2) <= tol && std::abs(c.c3) <= tol)
        return 1;
    if (std::abs(c.c3) <= tol) return 2;
    return 3;
}

Circuit synthesize_two_qubit(const Matrix4& u, int qubit_lo, int qubit_hi, int width) {
    WeylDecomposition dec = weyl_decompose(u);
    Circuit out(width);
    const int k = exact_cx_count(dec.c, 1e-9);
    if (k == 0) {
        // N(c) with |c| below tolerance is dropped; k1*k2 is exactly local
        emit_local_pair(out, Matrix4(dec.k1 * dec.k2), qubit_lo, qubit_hi);
        return out;
    }
    if (k <= 2) {
        WeylDecomposition target = dec;
        target.c = project_to_cx_class(dec.c, k);
        Circuit templ(2);
        if (k == 1) templ.cx(0, 1);
        else templ = w2_circuit(target.c.c1, target.c.c2);
        assemble_dressed(out, target, templ, qubit_lo, qubit_hi);
        return out;
    }
    // three CX: peel one CX with a dressing angle that lands the remainder on
    // the two-CX reachable face (Im of the squared-trace invariant vanishes)
    const Matrix4 cxm = gates::cx();
    auto peeled = [&](double th) -> Matrix4 {
        return u * kron2(gates::rz(th), Matrix2::Identity()) * cxm;
    };
    const double t0 = trace_invariant_im(peeled(0.0));
    const double t90 = trace_invariant_im(peeled(kPi / 2));
    const double t45 = trace_invariant_im(peeled(kPi / 4));
    const double cc = (t0 + t90) / 2;
    const double aa = (t0 - t90) / 2;
    const double bb = t45 - cc;
    const double rad = std::hypot(aa, bb);
    if (rad + 1e-12 < std::abs(cc))
        throw std::logic_error("two-qubit synthesis: no peeling root");
    const double phi = std::atan2(bb, aa);
    const double delta = std::acos(std::clamp(-cc / std::max(rad, 1e-300), -1.0, 1.0));
    double best_theta = 0;
    double best_c3 = 1e9;
    for (double th : {(phi + delta) / 2, (phi - delta) / 2}) {
        WeylDecomposition dv = weyl_decompose(peeled(th));
        if (std::abs(dv.c.c3) < best_c3) {
            best_c3 = std::abs(dv.c.c3);
            best_theta = th;
        }
    }
    if (best_c3 > 1e-8) throw std::logic_error("two-qubit synthesis: peeling failed");
    Matrix4 v = peeled(best_theta);
    Circuit inner = synthesize_two_qubit(v, qubit_lo, qubit_hi, width);
    if (inner.count_kind(GateKind::CX) > 2)
        throw std::logic_error("two-qubit synthesis: peel did not reduce CX count");
    // u = v * CX * RZ(-theta) on the high bit; rightmost factor applies first
    out.rz(-best_theta, qubit_hi);
    out.cx(qubit_lo, qubit_hi);
    for (const auto& inst : inner.instructions()) out.add(inst);
    return out;
}

// ---- resynthesis pass ----

namespace {

struct OpenRun {
    int qa, qb;  // qa < qb
    std::vector<Gate> gates;
};

Matrix4 gate_matrix_on_pair(const Gate& g, int qa, int qb) {
    // local bit 0 = qa, bit 1 = qb
    if (g.qubits.size() == 1) {
        Matrix2 m = g.dense();
        return g.qubits[0] == qa ? kron2(Matrix2::Identity(), m)
                                 : kron2(m, Matrix2::Identity());
    }
    Matrix4 m = g.dense();
    if (g.qubits[0] == qa) return m;
    // reverse local bit order: conjugate by swap
    Matrix4 sw = gates::swap();
    return sw * m * sw;
}

class Resynthesizer {
public:
    Resynthesizer(const Circuit& in, const ResynthesisConfig& cfg)
        : in_(in), cfg_(cfg), out_(in.width()), run_of_(in.width(), -1) {
        out_.metadata = in.metadata;
        for (const auto& [name, span] : in.registers())
            out_.set_register(name, span.start, span.count);
    }

    Circuit run() {
        for (const auto& inst : in_.instructions()) {
            if (const Gate* g = std::get_if<Gate>(&inst)) handle_gate(*g);
            else if (const Barrier* b = std::get_if<Barrier>(&inst)) handle_barrier(*b);
            else handle_measure(std::get<Measure>(inst));
        }
        flush_all();
        return std::move(out_);
    }

private:
    void handle_gate(const Gate& g) {
        if (g.qubits.size() == 1) {
            const int q = g.qubits[0];
            if (run_of_[q] >= 0) runs_[run_of_[q]].gates.push_back(g);
            else pending_[q].push_back(g);
            return;
        }
        if (g.qubits.size() > 2) {
            for (int q : g.qubits) flush_qubit(q);
            out_.add(g);
            return;
        }
        const int a = std::min(g.qubits[0], g.qubits[1]);
        const int b = std::max(g.qubits[0], g.qubits[1]);
        const int ra = run_of_[a], rb = run_of_[b];
        if (ra >= 0 && ra == rb) {
            runs_[ra].gates.push_back(g);
            return;
        }
        flush_qubit(a);
        flush_qubit(b);
        OpenRun r{a, b, {}};
        for (auto& pg : pending_[a]) r.gates.push_back(std::move(pg));
        for (auto& pg : pending_[b]) r.gates.push_back(std::move(pg));
        pending_[a].clear();
        pending_[b].clear();
        r.gates.push_back(g);
        runs_.push_back(std::move(r));
        run_of_[a] = run_of_[b] = static_cast<int>(runs_.size()) - 1;
    }

    void handle_barrier(const Barrier& b) {
        if (b.qubits.empty()) flush_all();
        else
            for (int q : b.qubits) flush_qubit(q);
        out_.add(b);
    }

    void handle_measure(const Measure& m) {
        flush_qubit(m.qubit);
        out_.add(m);
    }

    void flush_qubit(int q) {
        if (run_of_[q] >= 0) emit_run(run_of_[q]);
        for (auto& pg : pending_[q]) out_.add(std::move(pg));
        pending_[q].clear();
    }

    void flush_all() {
        for (std::size_t i = 0; i < runs_.size(); ++i)
            if (!runs_[i].gates.empty()) emit_run(static_cast<int>(i));
        for (int q = 0; q < in_.width(); ++q) {
            for (auto& pg : pending_[q]) out_.add(std::move(pg));
            pending_[q].clear();
        }
    }

    void emit_run(int idx) {
        OpenRun run = std::move(runs_[idx]);
        runs_[idx].gates.clear();
        run_of_[run.qa] = run_of_[run.qb] = -1;
        if (run.gates.empty()) return;
        // single bare CX stays untouched (nothing to gain from redressing)
        if (run.gates.size() == 1 && run.gates[0].kind == GateKind::CX) {
            out_.add(run.gates[0]);
            return;
        }
        Matrix4 u = Matrix4::Identity();
        for (const Gate& g : run.gates) u = (gate_matrix_on_pair(g, run.qa, run.qb) * u).eval();
        Circuit circ(out_.width());
        if (cfg_.mode == ResynthesisConfig::Mode::exact) {
            circ = synthesize_two_qubit(u, run.qa, run.qb, out_.width());
        } else {
            WeylDecomposition dec = weyl_decompose(u);
            int best_k = 0;
            double best_score = 1e300;
            for (int k = 0; k <= 3; ++k) {
                const double score = (1 - resynthesis_fidelity(dec.c, k)) + k * cfg_.e2;
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_k = k;
                }
            }
            if (best_k == 3) {
                circ = synthesize_two_qubit(u, run.qa, run.qb, out_.width());
            } else if (best_k == 0) {
                emit_local_pair(circ, Matrix4(dec.k1 * canonical_gate(project_to_cx_class(
                                                            dec.c, 0)) *
                                              dec.k2),
                                run.qa, run.qb);
            } else {
                WeylCoordinates cp = project_to_cx_class(dec.c, best_k);
                WeylDecomposition target = dec;
                target.c = cp;
                Circuit templ = (best_k == 1) ? [] {
                    Circuit t(2);
                    t.cx(0, 1);
                    return t;
                }()
                                              : w2_circuit(cp.c1, cp.c2);
                assemble_dressed(circ, target, templ, run.qa, run.qb);
            }
        }
        for (const auto& inst : circ.instructions()) out_.add(inst);
    }

    const Circuit& in_;
    ResynthesisConfig cfg_;
    Circuit out_;
    std::vector<int> run_of_;
    std::vector<OpenRun> runs_;
    std::map<int, std::vector<Gate>> pending_;
};

}  // namespace

Circuit kak_resynthesize(const Circuit& c, const ResynthesisConfig& cfg) {
    if (cfg.e2 < 0 || cfg.e2 > 1)
        throw std::invalid_argument("resynthesis e2 must lie in [0,1]");
    return Resynthesizer(c, cfg).run();
}

}  // namespace qbench
