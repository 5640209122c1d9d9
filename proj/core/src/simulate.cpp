#include "limtdd/simulate.hpp"

#include <algorithm>

namespace limtdd {

namespace {

std::vector<int> gate_counts(const Circuit& c) {
    std::vector<int> m(c.n_qubits, 0);
    for (const auto& g : c.gates)
        for (int q : g.qubits) ++m[q];
    return m;
}

std::string wire_name(int q, int k, int last) {
    if (k == last) return "x" + std::to_string(q + 1);
    if (k == 0) return "y" + std::to_string(q + 1);
    return "x" + std::to_string(q + 1) + "_" + std::to_string(k);
}

}  // namespace

WireMap::WireMap(DDManager& mgr, const Circuit& c, bool functionality)
    : names_(c.n_qubits), live_(c.n_qubits, 0) {
    std::vector<int> m = gate_counts(c);
    // an untouched qubit still gets an (out, in) pair in a functionality
    if (functionality)
        for (int& k : m) k = std::max(k, 1);
    for (int q = 0; q < c.n_qubits; ++q)
        for (int k = 0; k <= m[q]; ++k) names_[q].push_back(wire_name(q, k, m[q]));
    for (int q = c.n_qubits - 1; q >= 0; --q)
        for (int k = m[q]; k >= 0; --k) mgr.order().ensure(names_[q][k]);
}

const std::string& WireMap::advance(int qubit) {
    if (live_[qubit] + 1 >= int(names_[qubit].size())) throw std::logic_error("WireMap: qubit has no further wire");
    return names_[qubit][++live_[qubit]];
}

std::vector<std::string> WireMap::outputs() const {
    std::vector<std::string> out;
    for (int q = int(names_.size()) - 1; q >= 0; --q) out.push_back(names_[q].back());
    return out;
}

std::vector<std::string> WireMap::inputs() const {
    std::vector<std::string> out;
    for (int q = int(names_.size()) - 1; q >= 0; --q) out.push_back(names_[q].front());
    return out;
}

namespace {

// Contracts one gate into `f`, moving each operand to its next wire.
Diagram apply_gate(DDManager& mgr, WireMap& wires, const Gate& g, const Diagram& f) {
    std::vector<std::string> ins, outs;
    for (int q : g.qubits) {
        ins.push_back(wires.live(q));
        outs.push_back(wires.advance(q));
    }
    const Diagram gd = mgr.generate(gate_tensor(g, outs, ins));
    std::vector<std::string> var;
    for (const auto& name : ins) {
        const auto pos = mgr.order().find(name);
        const auto& fs = mgr.positions(f.set);
        if (std::find(fs.begin(), fs.end(), *pos) != fs.end()) var.push_back(name);
    }
    return mgr.contract(f, gd, var);
}

}  // namespace

CircuitRun simulate(const Circuit& c, std::uint64_t input, DDManager& mgr) {
    if (c.n_qubits < 64 && (input >> c.n_qubits) != 0) throw std::invalid_argument("simulate: input wider than circuit");
    WireMap wires(mgr, c, false);
    Diagram f = mgr.constant(1.0);
    for (int q = 0; q < c.n_qubits; ++q) {
        const std::uint32_t pos = mgr.order().position(wires.input(q));
        const Diagram z = mgr.zero(f.set);
        f = ((input >> q) & 1u) ? mgr.loc_norm(pos, z, f) : mgr.loc_norm(pos, f, z);
    }
    for (const auto& g : c.gates) {
        f = apply_gate(mgr, wires, g, f);
        mgr.checkpoint(f);
    }
    if (c.gates.empty()) mgr.checkpoint(f);
    return CircuitRun{f, wires.outputs(), {}};
}

CircuitRun functionality(const Circuit& c, DDManager& mgr) {
    WireMap wires(mgr, c, true);
    const std::vector<int> m = gate_counts(c);
    Diagram f = mgr.constant(1.0);
    for (int q = 0; q < c.n_qubits; ++q) {
        if (m[q] != 0) continue;
        DenseTensor t = DenseTensor::zeros({wires.wire(q, 1), wires.input(q)});
        t.data = {1.0, 0.0, 0.0, 1.0};
        wires.advance(q);
        f = mgr.contract(f, mgr.generate(t), {});
    }
    for (const auto& g : c.gates) {
        f = apply_gate(mgr, wires, g, f);
        mgr.checkpoint(f);
    }
    if (c.gates.empty()) mgr.checkpoint(f);
    return CircuitRun{f, wires.outputs(), wires.inputs()};
}

std::vector<cplx> state_amplitudes(DDManager& mgr, const CircuitRun& run, std::size_t count) {
    const std::size_t n = run.outputs.size();
    if (n < 64) count = std::min<std::size_t>(count, std::size_t{1} << n);
    const std::vector<std::string> names = mgr.indices(run.result);
    if (names != run.outputs) throw DDError("state_amplitudes: result is not a state over the output wires");
    std::vector<cplx> out;
    out.reserve(count);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t idx = 0; idx < count; ++idx) {
        for (std::size_t i = 0; i < n; ++i) bits[i] = std::uint8_t((idx >> (n - 1 - i)) & 1u);
        out.push_back(mgr.amplitude_bits(run.result, bits));
    }
    return out;
}

}  // namespace limtdd
