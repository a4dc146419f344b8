#include "qre/building_blocks.hpp"

#include <cmath>
#include <stdexcept>

namespace qre::blocks {

void DeviceProfile::check() const {
    if (!(op_time > 0.0)) throw std::invalid_argument("physical op time must be > 0");
    if (!(error_rate > 0.0 && error_rate < 1.0))
        throw std::invalid_argument("physical error rate must be in (0,1)");
}

double SteaneCostModel::max_c_op() const {
    double m = c_qec;
    for (const auto& [op, c] : c_op) m = std::max(m, c);
    return m;
}

const OpPerf& LogicalOpPerf::at(GateKind k) const {
    auto it = ops.find(k);
    if (it == ops.end())
        throw std::out_of_range(std::string("no perf entry for gate ") + qasm::gate_name(k));
    return it->second;
}

namespace {

double c_for(const SteaneCostModel& model, GateKind op) {
    auto it = model.c_op.find(op);
    if (it == model.c_op.end())
        throw std::out_of_range(std::string("no c_op constant for gate ") +
                                qasm::gate_name(op));
    return it->second;
}

void check_pseudo_threshold(double c, double p) {
    if (!(c * p * p < 1.0))
        throw std::runtime_error("above pseudo-threshold: c_op * p^2 >= 1, "
                                 "concatenation diverges");
}

}  // namespace

double steane_effective_error(double p, GateKind op, int level,
                              const SteaneCostModel& model) {
    if (level < 0) throw std::invalid_argument("level must be >= 0");
    if (level == 0) return p;
    double c = c_for(model, op);
    check_pseudo_threshold(c, p);
    return std::pow(c * p * p, std::exp2(level)) / c;
}

double steane_effective_error_log10(double p, GateKind op, int level,
                                    const SteaneCostModel& model) {
    if (level < 0) throw std::invalid_argument("level must be >= 0");
    if (level == 0) return std::log10(p);
    double c = c_for(model, op);
    check_pseudo_threshold(c, p);
    return std::exp2(level) * std::log10(c * p * p) - std::log10(c);
}

int required_concatenation_level(double kq, double p, const SteaneCostModel& model) {
    if (!(kq >= 1.0)) throw std::invalid_argument("KQ must be >= 1");
    // The op with the largest constant dominates Eq.-1 selection.
    GateKind worst = GateKind::CNOT;
    double worst_c = model.c_qec;
    for (const auto& [op, c] : model.c_op)
        if (c > worst_c) { worst_c = c; worst = op; }
    check_pseudo_threshold(worst_c, p);

    double target_log10 = -std::log10(kq);  // log10 of P_max = 1/KQ
    for (int l = 1; l <= model.max_level; ++l) {
        if (steane_effective_error_log10(p, worst, l, model) <= target_log10)
            return l;
    }
    throw std::runtime_error("required concatenation level exceeds cap " +
                             std::to_string(model.max_level));
}

namespace {

// Duration of one level-k primitive step, QEC folded in. Level 0 is a
// bare physical operation.
double base_step_time(const DeviceProfile& device, int level,
                      const SteaneCostModel& model) {
    double t = device.op_time;
    for (int k = 1; k <= level; ++k) t *= (1 + model.qec_depth);
    return t;
}

}  // namespace

LogicalOpPerf steane_logical_perf(const DeviceProfile& device, int level,
                                  const SteaneCostModel& model) {
    device.check();
    if (level < 0) throw std::invalid_argument("level must be >= 0");
    LogicalOpPerf perf;
    perf.level = level;
    if (level == 0) return physical_perf(device);
    double step = base_step_time(device, level - 1, model);
    for (const auto& [op, depth] : model.op_depth) {
        OpPerf entry;
        entry.time = (depth + model.qec_depth) * step;
        entry.fidelity = 1.0 - steane_effective_error(device.error_rate, op, level, model);
        perf.ops[op] = entry;
    }
    return perf;
}

LogicalOpPerf physical_perf(const DeviceProfile& device) {
    device.check();
    LogicalOpPerf perf;
    perf.level = 0;
    const GateKind all[] = {GateKind::X,    GateKind::Z,    GateKind::H,
                            GateKind::S,    GateKind::Sdg,  GateKind::T,
                            GateKind::Tdg,  GateKind::Rz,   GateKind::CNOT,
                            GateKind::SWAP, GateKind::PrepZ, GateKind::MeasZ};
    for (GateKind k : all)
        perf.ops[k] = {device.op_time, 1.0 - device.error_rate};
    return perf;
}

double surface_code_distance_raw(double eps_logical, double eps_physical,
                                 const SurfaceCostModel& model) {
    if (!(eps_logical > 0.0 && eps_logical < 1.0))
        throw std::invalid_argument("target logical error must be in (0,1)");
    if (!(eps_physical < model.eps_threshold))
        throw std::runtime_error("physical error rate at or above the code threshold: "
                                 "no suppression");
    return 2.0 * (std::log(eps_logical) - std::log(model.c1)) /
               (std::log(model.c2) + std::log(eps_physical / model.eps_threshold)) -
           1.0;
}

int surface_code_distance(double eps_logical, double eps_physical,
                          const SurfaceCostModel& model) {
    double raw = surface_code_distance_raw(eps_logical, eps_physical, model);
    int d = std::max(3, static_cast<int>(std::ceil(raw)));
    if (d % 2 == 0) ++d;  // double-defect distances are odd
    if (d > model.max_distance)
        throw std::runtime_error("required code distance " + std::to_string(d) +
                                 " exceeds cap " + std::to_string(model.max_distance));
    return d;
}

double surface_logical_error(int d, double eps_physical, const SurfaceCostModel& model) {
    return model.c1 * std::pow(model.c2 * eps_physical / model.eps_threshold,
                               (d + 1) / 2.0);
}

LogicalOpPerf surface_logical_perf(int d, const DeviceProfile& device,
                                   const SurfaceCostModel& model) {
    device.check();
    if (d < 3 || d % 2 == 0)
        throw std::invalid_argument("surface code distance must be odd and >= 3");
    LogicalOpPerf perf;
    perf.distance = d;
    double cycle = d * model.syndrome_round_ops * device.op_time;
    perf.qec_cycle_time = cycle;
    double eps_l = surface_logical_error(d, device.error_rate, model);
    double fid = 1.0 - eps_l;

    auto put = [&](GateKind k, double time, double fidelity) {
        perf.ops[k] = {time, fidelity};
    };
    // Pauli frame updates happen in classical control software.
    put(GateKind::X, 0.0, 1.0);
    put(GateKind::Z, 0.0, 1.0);
    double cnot = 3 * cycle;  // three braids between different-type qubits
    put(GateKind::CNOT, cnot, fid);
    put(GateKind::H, model.hadamard_cycles * cycle, fid);
    // S interacts with a resident reusable |Y_L>.
    double s_time = cycle;
    put(GateKind::S, s_time, fid);
    put(GateKind::Sdg, s_time, fid);
    // T consumes an |A_L>: braid, measure, then an S correction half the time.
    double t_time = cnot + cycle + 0.5 * s_time;
    put(GateKind::T, t_time, fid);
    put(GateKind::Tdg, t_time, fid);
    put(GateKind::SWAP, 3 * cnot, fid);
    put(GateKind::PrepZ, cycle, fid);
    put(GateKind::MeasZ, cycle, fid);
    return perf;
}

int msd_rounds(double eps_physical, double target, MagicState state,
               const SurfaceCostModel& model) {
    if (!(eps_physical > 0.0 && eps_physical < 1.0))
        throw std::invalid_argument("injection error must be in (0,1)");
    double factor = state == MagicState::A ? 35.0 : 7.0;
    if (!(factor * eps_physical * eps_physical < 1.0))
        throw std::runtime_error("injection error above distillation threshold");
    double eps = eps_physical;
    for (int r = 0; r <= model.max_msd_rounds; ++r) {
        if (eps <= target) return r;
        eps = factor * eps * eps * eps;
    }
    throw std::runtime_error("magic state target not reachable within " +
                             std::to_string(model.max_msd_rounds) + " rounds");
}

uint64_t factory_capacity(int max_parallel_t, const SurfaceCostModel& model) {
    if (max_parallel_t < 0) throw std::invalid_argument("parallel T count must be >= 0");
    return static_cast<uint64_t>(
        std::ceil(max_parallel_t * model.msd_time_ratio));
}

FactoryQubits factory_qubits(int max_parallel_t, int max_parallel_s, uint64_t q_l,
                             int rounds, const SurfaceCostModel& model) {
    if (rounds < 1) throw std::invalid_argument("distillation rounds must be >= 1");
    if (q_l < 1) throw std::invalid_argument("Q_L must be >= 1");
    FactoryQubits out;
    uint64_t a = factory_capacity(max_parallel_t, model);
    for (int k = 0; k < rounds - 1; ++k) a *= 15 * q_l;
    out.a_qubits = a * 16 * q_l;
    uint64_t y = static_cast<uint64_t>(std::max(max_parallel_t, max_parallel_s));
    for (int k = 0; k < rounds - 1; ++k) y *= 7 * q_l;
    out.y_qubits = y * 8 * q_l;
    return out;
}

}  // namespace qre::blocks
