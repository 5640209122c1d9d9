#include "limtdd/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace limtdd {

std::string gate_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::H: return "h";
        case GateKind::S: return "s";
        case GateKind::Sdg: return "sdg";
        case GateKind::T: return "t";
        case GateKind::Tdg: return "tdg";
        case GateKind::CX: return "cx";
        case GateKind::CZ: return "cz";
        case GateKind::CP: return "cp";
    }
    return "?";
}

int gate_arity(GateKind k) {
    return (k == GateKind::CX || k == GateKind::CZ || k == GateKind::CP) ? 2 : 1;
}

double Angle::radians() const { return std::numbers::pi * double(num) / double(den); }

void Circuit::add(GateKind k, std::vector<int> qubits, Angle a) {
    if (int(qubits.size()) != gate_arity(k)) throw std::invalid_argument("wrong operand count for " + gate_name(k));
    for (int q : qubits)
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("qubit out of range");
    if (qubits.size() == 2 && qubits[0] == qubits[1])
        throw std::invalid_argument("two-qubit gate needs distinct operands");
    gates.push_back(Gate{k, std::move(qubits), k == GateKind::CP ? a : Angle{}});
}

std::string Circuit::to_qasm() const {
    std::ostringstream os;
    os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" << n_qubits << "];\n";
    for (const auto& g : gates) {
        os << gate_name(g.kind);
        if (g.kind == GateKind::CP) {
            os << "(";
            if (g.angle.num == -1) os << "-";
            else if (g.angle.num != 1) os << g.angle.num << "*";
            os << "pi";
            if (g.angle.den != 1) os << "/" << g.angle.den;
            os << ")";
        }
        os << " ";
        for (std::size_t i = 0; i < g.qubits.size(); ++i) os << (i ? "," : "") << "q[" << g.qubits[i] << "]";
        os << ";\n";
    }
    return os.str();
}

CMatrix gate_matrix(const Gate& g) {
    const cplx i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    const cplx t = std::polar(1.0, std::numbers::pi / 4);
    CMatrix m(gate_arity(g.kind) == 1 ? 2 : 4);
    switch (g.kind) {
        case GateKind::X: m(0, 1) = 1; m(1, 0) = 1; break;
        case GateKind::Y: m(0, 1) = -i; m(1, 0) = i; break;
        case GateKind::Z: m(0, 0) = 1; m(1, 1) = -1; break;
        case GateKind::H: m(0, 0) = r; m(0, 1) = r; m(1, 0) = r; m(1, 1) = -r; break;
        case GateKind::S: m(0, 0) = 1; m(1, 1) = i; break;
        case GateKind::Sdg: m(0, 0) = 1; m(1, 1) = -i; break;
        case GateKind::T: m(0, 0) = 1; m(1, 1) = t; break;
        case GateKind::Tdg: m(0, 0) = 1; m(1, 1) = std::conj(t); break;
        case GateKind::CX:
            m(0, 0) = 1; m(1, 1) = 1; m(2, 3) = 1; m(3, 2) = 1;
            break;
        case GateKind::CZ:
            m(0, 0) = 1; m(1, 1) = 1; m(2, 2) = 1; m(3, 3) = -1;
            break;
        case GateKind::CP: {
            m(0, 0) = 1; m(1, 1) = 1; m(2, 2) = 1;
            // multiples of pi/2 get exact entries
            const std::int64_t period = 2 * g.angle.den;
            std::int64_t k = ((g.angle.num % period) + period) % period;
            if (k * 4 == period) m(3, 3) = i;
            else if (k * 2 == period) m(3, 3) = -1;
            else if (k * 4 == 3 * period) m(3, 3) = -i;
            else if (k == 0) m(3, 3) = 1;
            else m(3, 3) = std::polar(1.0, g.angle.radians());
            break;
        }
    }
    return m;
}

DenseTensor gate_tensor(const Gate& g, const std::vector<std::string>& outs,
                        const std::vector<std::string>& ins) {
    const int k = gate_arity(g.kind);
    if (int(outs.size()) != k || int(ins.size()) != k) throw std::invalid_argument("gate_tensor: index count");
    const CMatrix u = gate_matrix(g);
    std::vector<std::string> idx;
    for (int q = 0; q < k; ++q) {
        idx.push_back(outs[q]);
        idx.push_back(ins[q]);
    }
    DenseTensor t = DenseTensor::zeros(idx);
    for (std::size_t pos = 0; pos < t.data.size(); ++pos) {
        std::size_t row = 0, col = 0;
        for (int q = 0; q < k; ++q) {
            const std::size_t o = (pos >> (2 * (k - q) - 1)) & 1u;
            const std::size_t in = (pos >> (2 * (k - q) - 2)) & 1u;
            row = (row << 1) | o;
            col = (col << 1) | in;
        }
        t.data[pos] = u(row, col);
    }
    return t;
}

namespace {

void apply_dense(std::vector<cplx>& psi, const Gate& g) {
    const CMatrix u = gate_matrix(g);
    if (gate_arity(g.kind) == 1) {
        const std::size_t bit = std::size_t{1} << g.qubits[0];
        for (std::size_t s = 0; s < psi.size(); ++s) {
            if (s & bit) continue;
            const cplx a = psi[s], b = psi[s | bit];
            psi[s] = u(0, 0) * a + u(0, 1) * b;
            psi[s | bit] = u(1, 0) * a + u(1, 1) * b;
        }
        return;
    }
    const std::size_t ba = std::size_t{1} << g.qubits[0];
    const std::size_t bb = std::size_t{1} << g.qubits[1];
    for (std::size_t s = 0; s < psi.size(); ++s) {
        if (s & (ba | bb)) continue;
        const std::size_t idx[4] = {s, s | bb, s | ba, s | ba | bb};
        cplx in[4], out[4];
        for (int j = 0; j < 4; ++j) in[j] = psi[idx[j]];
        for (int r = 0; r < 4; ++r) {
            out[r] = 0;
            for (int c = 0; c < 4; ++c) out[r] += u(r, c) * in[c];
        }
        for (int j = 0; j < 4; ++j) psi[idx[j]] = out[j];
    }
}

}  // namespace

std::vector<cplx> dense_simulate(const Circuit& c, std::uint64_t input) {
    if (c.n_qubits > 24) throw std::invalid_argument("dense_simulate: too many qubits");
    std::vector<cplx> psi(std::size_t{1} << c.n_qubits);
    psi[input] = 1.0;
    for (const auto& g : c.gates) apply_dense(psi, g);
    return psi;
}

CMatrix dense_unitary(const Circuit& c) {
    if (c.n_qubits > 12) throw std::invalid_argument("dense_unitary: too many qubits");
    const std::size_t dim = std::size_t{1} << c.n_qubits;
    CMatrix u(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        const auto psi = dense_simulate(c, col);
        for (std::size_t row = 0; row < dim; ++row) u(row, col) = psi[row];
    }
    return u;
}

}  // namespace limtdd
