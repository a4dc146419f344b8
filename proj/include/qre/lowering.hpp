#pragma once

#include <cstdint>
#include <set>
#include <variant>
#include <vector>

#include "qre/qasm.hpp"

// Gate-set lowering: Rz(theta) replacement sequences, SWAP expansion and
// controlled-Rn cost variants.
namespace qre::lowering {

using qasm::GateKind;

struct StatisticalSynth {
    int mean_length = 45;  // observed gridsynth output length at eps=1e-2
    int spread = 5;
    uint64_t seed = 0;
};

struct ExhaustiveSynth {
    int max_length = 10;
};

enum class ControlledRnVariant { Standard35, Ancilla21 };

struct DecomposeSpec {
    double epsilon = 1e-2;
    std::variant<StatisticalSynth, ExhaustiveSynth> synthesizer = StatisticalSynth{};
    ControlledRnVariant controlled_rn = ControlledRnVariant::Standard35;

    void check() const;  // throws std::invalid_argument on bad fields
};

// Single-qubit replacement word; never contains Rz or CNOT.
using GateSequence = std::vector<GateKind>;

// Map an angle into (-pi, pi].
double reduce_angle(double theta);

// Empty sequence when the reduced angle is below spec.epsilon (the gate
// acts as the identity at the configured precision). Deterministic for
// identical (quantized theta, spec).
GateSequence decompose_rz(double theta, const DecomposeSpec& spec);

using GateSet = std::set<GateKind>;

// Fault-tolerant target set: Clifford+T without Rz.
GateSet ft_gate_set();

// Replaces Rz gates in place and expands SWAP into three CNOTs when the
// target set lacks SWAP. Module structure is preserved.
qasm::Program lower_gateset(const qasm::Program& p, const GateSet& target,
                            const DecomposeSpec& spec);

struct ControlledRnCost {
    int gate_count;
    int ancilla;
};

ControlledRnCost expand_controlled_rn(ControlledRnVariant variant);

}  // namespace qre::lowering
