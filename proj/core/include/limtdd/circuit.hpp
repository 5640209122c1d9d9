#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "limtdd/dense_tensor.hpp"
#include "limtdd/xp_operator.hpp"

namespace limtdd {

enum class GateKind { X, Y, Z, H, S, Sdg, T, Tdg, CX, CZ, CP };

std::string gate_name(GateKind k);
int gate_arity(GateKind k);

/// num/den * pi.
struct Angle {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double radians() const;
    friend bool operator==(const Angle&, const Angle&) = default;
};

struct Gate {
    GateKind kind = GateKind::X;
    /// Control first for controlled kinds.
    std::vector<int> qubits;
    Angle angle;  // only meaningful for CP

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Qubit q[i] is the i-th least significant bit of a basis state; the
/// highest qubit is nearest the root of every diagram.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::string name;

    void add(GateKind k, std::vector<int> qubits, Angle a = {});
    std::string to_qasm() const;
};

class QasmError : public std::runtime_error {
public:
    QasmError(const std::string& msg, int line, int col);
    int line() const { return line_; }
    int column() const { return col_; }

private:
    int line_;
    int col_;
};

Circuit parse_qasm(std::string_view text);
Circuit load_qasm_file(const std::string& path);

/// Unitary of a gate on its own operands, first operand most significant.
CMatrix gate_matrix(const Gate& g);
/// Gate as a tensor over (out, in) pairs, one pair per operand in order.
DenseTensor gate_tensor(const Gate& g, const std::vector<std::string>& outs,
                        const std::vector<std::string>& ins);

// ---- generators -------------------------------------------------------------

Circuit gen_ghz(int n);
/// H on q[n-1] first, CP controlled by the lower qubits, closing swaps.
Circuit gen_qft(int n);
/// Bell pairs q[i], q[n+i] (H and CX controlled by the lower register),
/// then a QFT without swaps on the upper register with q[n] most
/// significant. 2n qubits.
Circuit gen_fig9(int n);
/// H on every qubit, then CP with phase 2 pi / 2^{k-1} between qubit k and
/// qubit 1 for k = 2..n (qubit k is q[k-1]).
Circuit gen_remark2(int n);
/// Clifford+T: each gate is T with probability t_prob, otherwise uniform over
/// {X, Y, Z, S, H, CX}.
Circuit gen_random_cliffordt(int n, int gates, double t_prob, std::uint64_t seed);
/// Uniform over the given kinds, CP kinds using `cp_angle`.
Circuit gen_random_from(int n, int gates, const std::vector<GateKind>& kinds, std::uint64_t seed,
                        Angle cp_angle = {1, 4});
/// Generator by name: ghz, qft, fig9, remark2, cliffordt.
Circuit generate_named(std::string_view name, int n, std::uint64_t seed = 0, int gates = 400,
                       double t_prob = 0.02);

// ---- dense reference --------------------------------------------------------

/// State vector of c applied to |input>, amplitude index = sum b_i 2^i.
std::vector<cplx> dense_simulate(const Circuit& c, std::uint64_t input = 0);
/// Full unitary, row = output basis index, column = input basis index.
CMatrix dense_unitary(const Circuit& c);

}  // namespace limtdd
