#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qre/qasm.hpp"

// Logical-operation time/fidelity tables for the concatenated Steane code
// and the double-defect surface code, plus magic state factory sizing.
namespace qre::blocks {

using qasm::GateKind;

struct DeviceProfile {
    double op_time = 1e-6;   // seconds per physical op, conservative default
    double error_rate = 1e-9;

    void check() const;
};

// Per-op composition counts for one concatenation level: how many
// level-(l-1) base steps a level-l logical op takes, QEC included.
struct SteaneCostModel {
    std::map<GateKind, double> c_op = {
        {GateKind::X, 5e3},     {GateKind::Z, 5e3},    {GateKind::H, 5e3},
        {GateKind::S, 5e3},     {GateKind::Sdg, 5e3},  {GateKind::T, 2e4},
        {GateKind::Tdg, 2e4},   {GateKind::CNOT, 1e4}, {GateKind::SWAP, 1e4},
        {GateKind::PrepZ, 5e3}, {GateKind::MeasZ, 5e3},
    };
    double c_qec = 1e4;  // KQ of the Shor-state QEC circuit
    std::map<GateKind, int> op_depth = {
        {GateKind::X, 1},     {GateKind::Z, 1},     {GateKind::H, 1},
        {GateKind::S, 1},     {GateKind::Sdg, 1},   {GateKind::T, 8},
        {GateKind::Tdg, 8},   {GateKind::CNOT, 1},  {GateKind::SWAP, 3},
        {GateKind::PrepZ, 4}, {GateKind::MeasZ, 1},
    };
    int qec_depth = 20;        // base steps per QEC round at one level down
    int lower_level_qubits = 25;  // 5x5 arrangement below the top level
    int top_level_qubits = 30;
    int max_level = 6;

    double max_c_op() const;
};

struct SurfaceCostModel {
    double c1 = 0.13;
    double c2 = 0.61;
    double eps_threshold = 0.009;
    double msd_target = 1e-12;
    double msd_time_ratio = 20.0;  // time(MSD)/time(T)
    int syndrome_round_ops = 8;    // physical ops per syndrome round
    int hadamard_cycles = 3;       // cut, transversal step, reconnect
    int max_distance = 101;
    int max_msd_rounds = 5;
};

struct OpPerf {
    double time = 0.0;      // seconds
    double fidelity = 1.0;
};

struct LogicalOpPerf {
    std::map<GateKind, OpPerf> ops;
    int level = 0;       // Steane concatenation level, 0 = physical
    int distance = 0;    // surface code distance, 0 when not surface
    double qec_cycle_time = 0.0;  // surface QEC cycle (d rounds), 0 otherwise

    const OpPerf& at(GateKind k) const;
};

// (c_op p^2)^(2^l) / c_op for l >= 1; p at l = 0. Throws above the
// pseudo-threshold c_op p^2 >= 1.
double steane_effective_error(double p, GateKind op, int level,
                              const SteaneCostModel& model);

// log10 of the above, usable where the value itself underflows.
double steane_effective_error_log10(double p, GateKind op, int level,
                                    const SteaneCostModel& model);

// Minimal l >= 1 with worst-op effective error <= 1/KQ.
int required_concatenation_level(double kq, double p, const SteaneCostModel& model);

LogicalOpPerf steane_logical_perf(const DeviceProfile& device, int level,
                                  const SteaneCostModel& model);

// Physical (code-free) table: device times, fidelity 1-p for every gate.
LogicalOpPerf physical_perf(const DeviceProfile& device);

// Eq.-style distance fit, rounded up to the next odd integer >= 3.
int surface_code_distance(double eps_logical, double eps_physical,
                          const SurfaceCostModel& model);

// Pre-rounding value of the distance formula (exposed for oracle tests).
double surface_code_distance_raw(double eps_logical, double eps_physical,
                                 const SurfaceCostModel& model);

// Logical error per op at distance d: C1 (C2 eps_p / eps_th)^((d+1)/2).
double surface_logical_error(int d, double eps_physical,
                             const SurfaceCostModel& model);

LogicalOpPerf surface_logical_perf(int d, const DeviceProfile& device,
                                   const SurfaceCostModel& model);

enum class MagicState { A, Y };  // |A_L> for T gates, |Y_L> for S gates

// Minimal distillation rounds to reach `target` from injection error eps_p
// under 35 e^3 (15-to-1) or 7 e^3 (7-to-1) suppression.
int msd_rounds(double eps_physical, double target, MagicState state,
               const SurfaceCostModel& model);

// ceil(max_parallel_t * time(MSD)/time(T)).
uint64_t factory_capacity(int max_parallel_t, const SurfaceCostModel& model);

struct FactoryQubits {
    uint64_t a_qubits = 0;
    uint64_t y_qubits = 0;
};

FactoryQubits factory_qubits(int max_parallel_t, int max_parallel_s,
                             uint64_t q_l, int rounds,
                             const SurfaceCostModel& model);

}  // namespace qre::blocks
