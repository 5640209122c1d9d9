#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limtdd/circuit.hpp"
#include "limtdd/dd.hpp"

namespace limtdd {

/// Wire index names for every qubit over time. Wire k of a qubit is the
/// index after its k-th gate; wire 0 is the input. All names are registered
/// in the manager's order up front: qubit blocks from the highest qubit
/// down, and inside a block the latest wire first.
class WireMap {
public:
    WireMap(DDManager& mgr, const Circuit& c, bool functionality);

    const std::string& wire(int qubit, int k) const { return names_[qubit][k]; }
    const std::string& live(int qubit) const { return names_[qubit][live_[qubit]]; }
    const std::string& input(int qubit) const { return names_[qubit][0]; }
    /// Moves the qubit to its next wire and returns the new name.
    const std::string& advance(int qubit);
    /// Final wires from the highest qubit down.
    std::vector<std::string> outputs() const;
    std::vector<std::string> inputs() const;

private:
    std::vector<std::vector<std::string>> names_;
    std::vector<int> live_;
};

struct CircuitRun {
    Diagram result;
    /// Output index names, highest qubit first.
    std::vector<std::string> outputs;
    /// Input index names for functionality runs.
    std::vector<std::string> inputs;
};

/// Output state of c on the basis input (bit i of `input` is qubit i).
/// Records a peak checkpoint after every gate.
CircuitRun simulate(const Circuit& c, std::uint64_t input, DDManager& mgr);

/// Unitary of c as a rank-2n diagram, indices interleaved per qubit as
/// (out, in), highest qubit first.
CircuitRun functionality(const Circuit& c, DDManager& mgr);

/// Amplitudes of a simulated state in basis order (index = sum b_i 2^i).
std::vector<cplx> state_amplitudes(DDManager& mgr, const CircuitRun& run, std::size_t count);

}  // namespace limtdd
