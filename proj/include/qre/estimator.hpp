#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qre/architecture.hpp"
#include "qre/building_blocks.hpp"
#include "qre/lowering.hpp"
#include "qre/mapper.hpp"
#include "qre/qasm.hpp"

// End metrics (T_one, F_alg, T_avg, qubit totals) and parameter sweeps.
namespace qre::est {

using blocks::DeviceProfile;
using blocks::SteaneCostModel;
using blocks::SurfaceCostModel;
using mapper::MappingResult;
using qasm::GateKind;

enum class CodeKind { None, Steane, Surface };

struct EstimateConfig {
    CodeKind code = CodeKind::None;
    DeviceProfile device;
    arch::GlobalKind global_layout = arch::GlobalKind::OneD;
    arch::LocalKind local_layout = arch::LocalKind::TwoD;
    std::string adjacency_text;  // edge list, required for arbitrary layouts
    lowering::DecomposeSpec decompose;
    SteaneCostModel steane;
    SurfaceCostModel surface;
    double target_fidelity = 0.7;
    // >0 pins the parameter instead of deriving it from KQ.
    int forced_level = 0;
    int forced_distance = 0;
    // Physical qubits per extra distillation-ancilla pair, in factory units.
    int distillation_ancilla_pairs = 1;
    bool emit_trace = false;
};

struct QubitTotals {
    uint64_t q_comp = 0;   // logical qubits across module regions
    uint64_t q_comm = 0;   // logical bus qubits
    uint64_t total = 0;    // physical, code applied
    uint64_t factory_a = 0;
    uint64_t factory_y = 0;
    uint64_t bus_physical = 0;
};

struct EstimateReport {
    double t_one = 0.0;
    double f_alg = 0.0;
    double t_avg = 0.0;
    bool t_avg_saturated = false;  // F_alg at or below the floor
    double swap_ratio = 0.0;
    QubitTotals qubits;
    int level = 0;     // Steane concatenation level used
    int distance = 0;  // surface code distance used
    MappingResult mapping;
    std::map<std::string, std::string> config_echo;
};

inline constexpr double kFidelityFloor = 1e-300;

// Product over gates of F_g^{N_g}, accumulated in log space.
double algorithm_fidelity(const std::map<GateKind, uint64_t>& tallies,
                          const blocks::LogicalOpPerf& perf);

// Surface-code algorithm fidelity 1 - KQ * eps_L. Throws when >= 1.
double surface_fidelity(uint64_t kq, double eps_logical);

// T_one / F_alg; infinity when F_alg is at or below the floor.
double average_time(double t_one, double f_alg);

double swap_ratio(const std::map<GateKind, uint64_t>& tallies);

QubitTotals qubit_totals(const qasm::Program& p, const arch::ArchitectureLayout& layout,
                         CodeKind code, int level_or_distance,
                         const MappingResult& mapping, const EstimateConfig& cfg);

// Full pipeline: lower, build layout, derive perf tables, map, report.
EstimateReport run_estimate(const qasm::Program& p, const EstimateConfig& cfg);

enum class SweepParameter { SteaneLevel, SurfaceDistance, ErrorRate, CompileVariant };

struct SweepPoint {
    double parameter = 0.0;
    bool ok = false;
    std::string error;
    EstimateReport report;
};

struct SweepSeries {
    SweepParameter parameter;
    std::vector<SweepPoint> points;
    int argmin_t_avg = -1;            // index into points, -1 if none finite
    std::optional<double> formula_selected;  // Eq.-1 level or Eq.-2 distance
};

struct SweepSpec {
    SweepParameter parameter = SweepParameter::SteaneLevel;
    std::vector<double> values;  // levels, distances, error rates, or
                                 // variant codes (0 = standard, 1 = ancilla)
};

// Serial reference evaluation, one point after another.
SweepSeries run_sweep_serial(const qasm::Program& p, const EstimateConfig& cfg,
                             const SweepSpec& spec);

// OpenMP-parallel point evaluation; identical output to the serial path.
SweepSeries run_sweep(const qasm::Program& p, const EstimateConfig& cfg,
                      const SweepSpec& spec);

std::string report_to_json(const EstimateReport& report);
std::string report_summary(const EstimateReport& report);
std::string sweep_to_csv(const SweepSeries& series);

}  // namespace qre::est
