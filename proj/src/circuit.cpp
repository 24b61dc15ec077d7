#include "qbench/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qbench {

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "SDG";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::CX: return "CX";
        case GateKind::CZ: return "CZ";
        case GateKind::Swap: return "SWAP";
        case GateKind::XRot: return "XROT";
        case GateKind::ZZ: return "ZZ";
        case GateKind::Unitary: return "UNITARY";
    }
    return "?";
}

bool gate_has_angle(GateKind k) {
    switch (k) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::XRot:
        case GateKind::ZZ:
            return true;
        default:
            return false;
    }
}

int gate_arity(GateKind k) {
    switch (k) {
        case GateKind::CX:
        case GateKind::CZ:
        case GateKind::Swap:
        case GateKind::ZZ:
            return 2;
        case GateKind::Unitary:
            return -1;
        default:
            return 1;
    }
}

Matrix Gate::dense() const {
    switch (kind) {
        case GateKind::H: return gates::h();
        case GateKind::X: return gates::x();
        case GateKind::Y: return gates::y();
        case GateKind::Z: return gates::z();
        case GateKind::S: return gates::s();
        case GateKind::Sdg: return gates::sdg();
        case GateKind::RX: return gates::rx(theta);
        case GateKind::RY: return gates::ry(theta);
        case GateKind::RZ: return gates::rz(theta);
        case GateKind::XRot: return gates::xrot(theta);
        case GateKind::CX: return gates::cx();
        case GateKind::CZ: return gates::cz();
        case GateKind::Swap: return gates::swap();
        case GateKind::ZZ: return gates::zz(theta);
        case GateKind::Unitary: return *matrix;
    }
    throw std::logic_error("bad gate kind");
}

Gate Gate::adjoint() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::S: g.kind = GateKind::Sdg; break;
        case GateKind::Sdg: g.kind = GateKind::S; break;
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::XRot:
        case GateKind::ZZ:
            g.theta = -theta;
            break;
        case GateKind::Unitary:
            g.matrix = std::make_shared<const Matrix>(matrix->adjoint());
            break;
        default:
            break;  // self-inverse
    }
    return g;
}

Circuit::Circuit(int width) : width_(width) {
    if (width < 0) throw std::invalid_argument("circuit width must be >= 0");
}

void Circuit::validate_qubits(const std::vector<int>& qs) const {
    std::set<int> seen;
    for (int q : qs) {
        if (q < 0 || q >= width_)
            throw std::invalid_argument("qubit index " + std::to_string(q) +
                                        " out of range for width " + std::to_string(width_));
        if (!seen.insert(q).second)
            throw std::invalid_argument("duplicate qubit index " + std::to_string(q));
    }
}

Circuit& Circuit::add(Instruction inst) {
    if (const Gate* g = std::get_if<Gate>(&inst)) {
        validate_qubits(g->qubits);
        int arity = gate_arity(g->kind);
        if (arity >= 0 && static_cast<int>(g->qubits.size()) != arity)
            throw std::invalid_argument(std::string(gate_name(g->kind)) + " expects " +
                                        std::to_string(arity) + " qubits");
        if (g->kind == GateKind::Unitary) {
            int k = static_cast<int>(g->qubits.size());
            if (k < 1 || k > 3) throw std::invalid_argument("unitary block limited to 1..3 qubits");
            if (!g->matrix || g->matrix->rows() != (1 << k) || g->matrix->cols() != (1 << k))
                throw std::invalid_argument("unitary block dimension mismatch");
            if (unitarity_error(*g->matrix) > 1e-10)
                throw std::invalid_argument("unitary block matrix is not unitary");
        }
    } else if (const Barrier* b = std::get_if<Barrier>(&inst)) {
        validate_qubits(b->qubits);
    } else {
        const Measure& m = std::get<Measure>(inst);
        validate_qubits({m.qubit});
        if (m.cbit < 0) throw std::invalid_argument("classical bit must be >= 0");
        for (const auto& other : instructions_)
            if (const Measure* om = std::get_if<Measure>(&other))
                if (om->cbit == m.cbit)
                    throw std::invalid_argument("classical bit " + std::to_string(m.cbit) +
                                                " measured twice");
        num_cbits_ = std::max(num_cbits_, m.cbit + 1);
    }
    instructions_.push_back(std::move(inst));
    return *this;
}

Circuit& Circuit::gate(GateKind k, std::vector<int> qubits, double theta) {
    return add(Gate{k, theta, std::move(qubits), nullptr});
}

Circuit& Circuit::unitary(const Matrix& u, std::vector<int> qubits) {
    return add(Gate{GateKind::Unitary, 0.0, std::move(qubits),
                    std::make_shared<const Matrix>(u)});
}

Circuit& Circuit::barrier(std::vector<int> qubits) {
    return add(Barrier{std::move(qubits)});
}

Circuit& Circuit::measure(int qubit, int cbit) {
    return add(Measure{qubit, cbit});
}

Circuit& Circuit::measure_all() {
    for (int q = 0; q < width_; ++q) measure(q, q);
    return *this;
}

std::vector<int> Circuit::cbit_to_qubit() const {
    std::vector<int> map(num_cbits_, -1);
    for (const auto& inst : instructions_)
        if (const Measure* m = std::get_if<Measure>(&inst)) map[m->cbit] = m->qubit;
    return map;
}

std::size_t Circuit::gate_count() const {
    std::size_t n = 0;
    for (const auto& inst : instructions_)
        if (std::holds_alternative<Gate>(inst)) ++n;
    return n;
}

std::size_t Circuit::count_kind(GateKind k) const {
    std::size_t n = 0;
    for (const auto& inst : instructions_)
        if (const Gate* g = std::get_if<Gate>(&inst))
            if (g->kind == k) ++n;
    return n;
}

bool Circuit::has_measurements() const { return num_cbits_ > 0; }

void Circuit::set_register(const std::string& name, int start, int count) {
    if (start < 0 || count < 0 || start + count > width_)
        throw std::invalid_argument("register span out of range");
    registers_[name] = RegisterSpan{start, count};
}

std::optional<RegisterSpan> Circuit::find_register(const std::string& name) const {
    auto it = registers_.find(name);
    if (it == registers_.end()) return std::nullopt;
    return it->second;
}

Circuit Circuit::adjoint() const {
    if (has_measurements())
        throw std::invalid_argument("cannot take adjoint of a circuit with measurements");
    Circuit out(width_);
    out.registers_ = registers_;
    out.metadata = metadata;
    for (auto it = instructions_.rbegin(); it != instructions_.rend(); ++it) {
        if (const Gate* g = std::get_if<Gate>(&*it))
            out.add(g->adjoint());
        else
            out.add(*it);
    }
    return out;
}

Circuit compose(const Circuit& a, const Circuit& b) {
    if (a.width() != b.width())
        throw std::invalid_argument("compose: width mismatch (" + std::to_string(a.width()) +
                                    " vs " + std::to_string(b.width()) + ")");
    Circuit out(a.width());
    for (const auto& [name, span] : a.registers()) out.set_register(name, span.start, span.count);
    for (const auto& [name, span] : b.registers()) out.set_register(name, span.start, span.count);
    out.metadata = a.metadata;
    for (const auto& [k, v] : b.metadata) out.metadata[k] = v;
    for (const auto& inst : a.instructions()) out.add(inst);
    for (const auto& inst : b.instructions()) out.add(inst);
    return out;
}

Circuit embedded(const Circuit& c, int new_width, const std::vector<int>& qubit_map) {
    if (static_cast<int>(qubit_map.size()) != c.width())
        throw std::invalid_argument("embedded: qubit map size mismatch");
    Circuit out(new_width);
    auto remap = [&](const std::vector<int>& qs) {
        std::vector<int> r;
        r.reserve(qs.size());
        for (int q : qs) r.push_back(qubit_map[q]);
        return r;
    };
    for (const auto& inst : c.instructions()) {
        if (const Gate* g = std::get_if<Gate>(&inst)) {
            Gate h = *g;
            h.qubits = remap(g->qubits);
            out.add(std::move(h));
        } else if (const Barrier* b = std::get_if<Barrier>(&inst)) {
            out.add(Barrier{remap(b->qubits)});
        } else {
            const Measure& m = std::get<Measure>(inst);
            out.add(Measure{qubit_map[m.qubit], m.cbit});
        }
    }
    return out;
}

int algorithmic_depth(const Circuit& c) {
    std::vector<int> level(c.width(), 0);
    for (const auto& inst : c.instructions()) {
        if (const Gate* g = std::get_if<Gate>(&inst)) {
            int d = 0;
            for (int q : g->qubits) d = std::max(d, level[q]);
            ++d;
            for (int q : g->qubits) level[q] = d;
        } else if (const Barrier* b = std::get_if<Barrier>(&inst)) {
            const std::vector<int>* qs = &b->qubits;
            std::vector<int> all;
            if (qs->empty()) {
                all.resize(c.width());
                for (int q = 0; q < c.width(); ++q) all[q] = q;
                qs = &all;
            }
            int d = 0;
            for (int q : *qs) d = std::max(d, level[q]);
            for (int q : *qs) level[q] = d;
        }
    }
    return level.empty() ? 0 : *std::max_element(level.begin(), level.end());
}

Matrix circuit_unitary(const Circuit& c, int max_width) {
    if (c.width() > max_width)
        throw std::invalid_argument("circuit too wide for dense unitary");
    const std::size_t dim = std::size_t{1} << c.width();
    Matrix u = Matrix::Identity(dim, dim);
    for (const auto& inst : c.instructions()) {
        if (std::holds_alternative<Measure>(inst))
            throw std::invalid_argument("circuit_unitary: circuit has measurements");
        const Gate* g = std::get_if<Gate>(&inst);
        if (!g) continue;  // barrier
        const Matrix gm = g->dense();
        const int k = static_cast<int>(g->qubits.size());
        const std::size_t sub = std::size_t{1} << k;
        // apply to every column of u
        std::vector<std::size_t> offsets(sub, 0);
        // iterate over all basis indices whose gate-local bits are zero
        std::size_t free_mask = dim - 1;
        for (int b = 0; b < k; ++b) free_mask &= ~(std::size_t{1} << g->qubits[b]);
        std::vector<std::size_t> strides(k);
        for (int b = 0; b < k; ++b) strides[b] = std::size_t{1} << g->qubits[b];
        for (std::size_t m = 0; m < sub; ++m) {
            std::size_t off = 0;
            for (int b = 0; b < k; ++b)
                if (m & (std::size_t{1} << b)) off |= strides[b];
            offsets[m] = off;
        }
        Vector amp(sub);
        for (Eigen::Index col = 0; col < u.cols(); ++col) {
            for (std::size_t base = 0; base < dim; ++base) {
                if ((base & ~free_mask) != 0) continue;
                for (std::size_t m = 0; m < sub; ++m) amp(m) = u(base + offsets[m], col);
                Vector res = gm * amp;
                for (std::size_t m = 0; m < sub; ++m) u(base + offsets[m], col) = res(m);
            }
        }
    }
    return u;
}

// ---- text serialization ----

namespace {
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string Circuit::to_text() const {
    std::ostringstream os;
    os << "QUBITS " << width_ << "\n";
    for (const auto& [name, span] : registers_)
        os << "REG " << name << " " << span.start << " " << span.count << "\n";
    for (const auto& [k, v] : metadata) os << "META " << k << " " << v << "\n";
    for (const auto& inst : instructions_) {
        if (const Gate* g = std::get_if<Gate>(&inst)) {
            os << gate_name(g->kind);
            if (g->kind == GateKind::Unitary) os << " " << g->qubits.size();
            if (gate_has_angle(g->kind)) os << " " << fmt_double(g->theta);
            for (int q : g->qubits) os << " " << q;
            if (g->kind == GateKind::Unitary) {
                for (Eigen::Index r = 0; r < g->matrix->rows(); ++r)
                    for (Eigen::Index c2 = 0; c2 < g->matrix->cols(); ++c2) {
                        Complex z = (*g->matrix)(r, c2);
                        os << " " << fmt_double(z.real()) << " " << fmt_double(z.imag());
                    }
            }
            os << "\n";
        } else if (const Barrier* b = std::get_if<Barrier>(&inst)) {
            os << "BARRIER";
            for (int q : b->qubits) os << " " << q;
            os << "\n";
        } else {
            const Measure& m = std::get<Measure>(inst);
            os << "MEASURE " << m.qubit << " " << m.cbit << "\n";
        }
    }
    return os.str();
}

Circuit Circuit::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::optional<Circuit> circ;
    auto need = [&]() -> Circuit& {
        if (!circ) throw std::invalid_argument("circuit text must start with QUBITS");
        return *circ;
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        if (op == "QUBITS") {
            int n;
            if (!(ls >> n)) throw std::invalid_argument("bad QUBITS line");
            circ = Circuit(n);
        } else if (op == "REG") {
            std::string name;
            int start, count;
            if (!(ls >> name >> start >> count)) throw std::invalid_argument("bad REG line");
            need().set_register(name, start, count);
        } else if (op == "META") {
            std::string key, rest;
            ls >> key;
            std::getline(ls, rest);
            if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
            need().metadata[key] = rest;
        } else if (op == "BARRIER") {
            std::vector<int> qs;
            int q;
            while (ls >> q) qs.push_back(q);
            need().barrier(qs);
        } else if (op == "MEASURE") {
            int q, c;
            if (!(ls >> q >> c)) throw std::invalid_argument("bad MEASURE line");
            need().measure(q, c);
        } else if (op == "UNITARY") {
            int k;
            if (!(ls >> k) || k < 1 || k > 3) throw std::invalid_argument("bad UNITARY line");
            std::vector<int> qs(k);
            for (int& q : qs)
                if (!(ls >> q)) throw std::invalid_argument("bad UNITARY qubits");
            const int dim = 1 << k;
            Matrix m(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) {
                    double re, im2;
                    if (!(ls >> re >> im2)) throw std::invalid_argument("bad UNITARY matrix");
                    m(r, c) = Complex(re, im2);
                }
            need().unitary(m, qs);
        } else {
            GateKind kind;
            bool found = false;
            for (GateKind k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S,
                               GateKind::Sdg, GateKind::RX, GateKind::RY, GateKind::RZ,
                               GateKind::CX, GateKind::CZ, GateKind::Swap, GateKind::XRot,
                               GateKind::ZZ}) {
                if (op == gate_name(k)) {
                    kind = k;
                    found = true;
                    break;
                }
            }
            if (!found) throw std::invalid_argument("unknown instruction: " + op);
            double theta = 0.0;
            if (gate_has_angle(kind))
                if (!(ls >> theta)) throw std::invalid_argument("missing angle for " + op);
            std::vector<int> qs;
            int q;
            while (ls >> q) qs.push_back(q);
            need().gate(kind, qs, theta);
        }
    }
    if (!circ) throw std::invalid_argument("empty circuit text");
    return *circ;
}

}  // namespace qbench
