#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qbench/linalg.hpp"

namespace qbench {

enum class GateKind {
    H, X, Y, Z, S, Sdg,
    RX, RY, RZ,
    CX, CZ, Swap,
    XRot,  // exp(+i phi X)
    ZZ,    // exp(-i (theta/2) Z(x)Z)
    Unitary,
};

const char* gate_name(GateKind k);
bool gate_has_angle(GateKind k);
int gate_arity(GateKind k);  // -1 for Unitary (variable)

struct Gate {
    GateKind kind;
    double theta = 0.0;
    std::vector<int> qubits;  // qubits[0] is the least significant local bit
    std::shared_ptr<const Matrix> matrix;  // Unitary only

    /// Dense matrix over the gate's local qubits.
    Matrix dense() const;
    Gate adjoint() const;
};

struct Barrier {
    std::vector<int> qubits;  // empty = all qubits
};

struct Measure {
    int qubit;
    int cbit;
};

using Instruction = std::variant<Gate, Barrier, Measure>;

struct RegisterSpan {
    int start = 0;
    int count = 0;
};

/// Gate-level circuit over a fixed qubit count. Instructions are validated as
/// they are added; circuits are treated as immutable once built.
class Circuit {
public:
    explicit Circuit(int width);

    int width() const { return width_; }
    const std::vector<Instruction>& instructions() const { return instructions_; }

    Circuit& add(Instruction inst);

    Circuit& gate(GateKind k, std::vector<int> qubits, double theta = 0.0);
    Circuit& h(int q) { return gate(GateKind::H, {q}); }
    Circuit& x(int q) { return gate(GateKind::X, {q}); }
    Circuit& y(int q) { return gate(GateKind::Y, {q}); }
    Circuit& z(int q) { return gate(GateKind::Z, {q}); }
    Circuit& s(int q) { return gate(GateKind::S, {q}); }
    Circuit& sdg(int q) { return gate(GateKind::Sdg, {q}); }
    Circuit& rx(double theta, int q) { return gate(GateKind::RX, {q}, theta); }
    Circuit& ry(double theta, int q) { return gate(GateKind::RY, {q}, theta); }
    Circuit& rz(double theta, int q) { return gate(GateKind::RZ, {q}, theta); }
    Circuit& xrot(double phi, int q) { return gate(GateKind::XRot, {q}, phi); }
    Circuit& cx(int control, int target) { return gate(GateKind::CX, {control, target}); }
    Circuit& cz(int a, int b) { return gate(GateKind::CZ, {a, b}); }
    Circuit& swap_gate(int a, int b) { return gate(GateKind::Swap, {a, b}); }
    Circuit& zz(double theta, int a, int b) { return gate(GateKind::ZZ, {a, b}, theta); }
    Circuit& unitary(const Matrix& u, std::vector<int> qubits);
    Circuit& barrier(std::vector<int> qubits = {});
    Circuit& measure(int qubit, int cbit);
    Circuit& measure_all();

    /// Number of classical bits (max used cbit + 1).
    int num_cbits() const { return num_cbits_; }
    /// qubit measured into each classical bit; -1 for unused bits.
    std::vector<int> cbit_to_qubit() const;

    std::size_t gate_count() const;
    std::size_t count_kind(GateKind k) const;
    bool has_measurements() const;

    void set_register(const std::string& name, int start, int count);
    std::optional<RegisterSpan> find_register(const std::string& name) const;
    const std::map<std::string, RegisterSpan>& registers() const { return registers_; }

    std::map<std::string, std::string> metadata;

    /// Adjoint of a measurement-free circuit.
    Circuit adjoint() const;

    std::string to_text() const;
    static Circuit from_text(const std::string& text);

private:
    void validate_qubits(const std::vector<int>& qs) const;

    int width_;
    int num_cbits_ = 0;
    std::vector<Instruction> instructions_;
    std::map<std::string, RegisterSpan> registers_;
};

/// Concatenate instruction lists; registers/metadata of b override a on conflict.
Circuit compose(const Circuit& a, const Circuit& b);

/// Map circuit `c` onto a wider circuit: qubit q of c becomes qubit_map[q].
Circuit embedded(const Circuit& c, int new_width, const std::vector<int>& qubit_map);

/// Longest path over gate instructions; barriers align layers, measures excluded.
int algorithmic_depth(const Circuit& c);

/// Dense unitary of a measurement-free circuit (width capped; intended for tests
/// and small synthesis blocks).
Matrix circuit_unitary(const Circuit& c, int max_width = 10);

}  // namespace qbench
