#include "qre/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qre::est {

double algorithm_fidelity(const std::map<GateKind, uint64_t>& tallies,
                          const blocks::LogicalOpPerf& perf) {
    double log_sum = 0.0;
    for (const auto& [gate, count] : tallies) {
        if (count == 0) continue;
        double f = perf.at(gate).fidelity;
        if (f <= 0.0) return 0.0;
        log_sum += static_cast<double>(count) * std::log(f);
    }
    return std::exp(log_sum);
}

double surface_fidelity(uint64_t kq, double eps_logical) {
    double product = static_cast<double>(kq) * eps_logical;
    if (product >= 1.0)
        throw std::runtime_error("KQ * eps_L >= 1: fidelity floor reached");
    return 1.0 - product;
}

double average_time(double t_one, double f_alg) {
    if (f_alg <= kFidelityFloor) return std::numeric_limits<double>::infinity();
    return t_one / f_alg;
}

double swap_ratio(const std::map<GateKind, uint64_t>& tallies) {
    uint64_t total = 0;
    for (const auto& [gate, count] : tallies) total += count;
    if (total == 0) throw std::invalid_argument("swap ratio of empty tallies");
    auto it = tallies.find(GateKind::SWAP);
    uint64_t swaps = it == tallies.end() ? 0 : it->second;
    return static_cast<double>(swaps) / static_cast<double>(total);
}

namespace {

uint64_t ipow(uint64_t base, int exp) {
    uint64_t out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

uint64_t q_comp_of(const qasm::Program& p) {
    uint64_t q = 0;
    for (const auto& [name, m] : p.modules) q += m.qubit_count();
    return q;
}

uint64_t q_comm_of(const arch::ArchitectureLayout& layout, size_t module_count) {
    switch (layout.global_kind) {
        case arch::GlobalKind::OneD:
            return static_cast<uint64_t>(layout.bus.bandwidth) * layout.bus.length;
        case arch::GlobalKind::TwoD: {
            uint64_t a = static_cast<uint64_t>(
                std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::sqrt(
                                         static_cast<double>(module_count)))) - 1));
            uint64_t b = a + 1;
            uint64_t n = static_cast<uint64_t>(layout.region_side);
            uint64_t bw = static_cast<uint64_t>(layout.bus.bandwidth);
            return 2 * bw * n * a * b + (n * a) * (n * a);
        }
        default:
            return 0;  // all-to-all and arbitrary devices have no bus
    }
}

size_t modules_with_cnot(const qasm::Program& p) {
    size_t n = 0;
    for (const auto& [name, m] : p.modules)
        for (const auto& ins : m.body)
            if (const auto* g = std::get_if<qasm::Gate>(&ins))
                if (g->kind == GateKind::CNOT || g->kind == GateKind::SWAP) {
                    ++n;
                    break;
                }
    return n;
}

}  // namespace

QubitTotals qubit_totals(const qasm::Program& p, const arch::ArchitectureLayout& layout,
                         CodeKind code, int level_or_distance,
                         const MappingResult& mapping, const EstimateConfig& cfg) {
    QubitTotals totals;
    totals.q_comp = q_comp_of(p);
    totals.q_comm = q_comm_of(layout, p.modules.size());

    switch (code) {
        case CodeKind::None:
            totals.total = totals.q_comp + totals.q_comm;
            break;
        case CodeKind::Steane: {
            int l = level_or_distance;
            if (l < 1) throw std::invalid_argument("Steane totals need level >= 1");
            uint64_t lower = static_cast<uint64_t>(cfg.steane.lower_level_qubits);
            uint64_t top = static_cast<uint64_t>(cfg.steane.top_level_qubits);
            totals.total = ipow(lower, l - 1) * top * totals.q_comp +
                           ipow(lower, l) * totals.q_comm;
            break;
        }
        case CodeKind::Surface: {
            int d = level_or_distance;
            auto fp = arch::surface_footprint(d);
            // Every CNOT-bearing module holds an X-cut/Z-cut ancilla pair,
            // and the last distillation round borrows one Bell-state qubit.
            uint64_t logical = totals.q_comp + 2 * modules_with_cnot(p) + 1;
            int n_w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(logical))));
            int n_h = static_cast<int>((logical + n_w - 1) / static_cast<uint64_t>(n_w));
            uint64_t grid = arch::surface_grid_qubits(std::max(1, n_h), n_w, d);

            int rounds = blocks::msd_rounds(cfg.device.error_rate, cfg.surface.msd_target,
                                            blocks::MagicState::A, cfg.surface);
            rounds = std::max(1, rounds);
            auto factory =
                blocks::factory_qubits(std::max(1, mapping.max_parallel_t),
                                       std::max(1, mapping.max_parallel_s),
                                       fp.physical_qubits, rounds, cfg.surface);
            totals.factory_a = factory.a_qubits;
            totals.factory_y = factory.y_qubits;
            uint64_t distill_ancilla =
                2 * fp.physical_qubits *
                static_cast<uint64_t>(std::max(0, cfg.distillation_ancilla_pairs));
            // Bus: ceil(d/4) lanes spanning the grid width.
            uint64_t grid_width =
                2 * (static_cast<uint64_t>(n_w) * fp.half_a + (n_w - 1) * fp.spacing) + 1;
            totals.bus_physical = static_cast<uint64_t>(fp.spacing) * grid_width;
            totals.total = grid + totals.factory_a + totals.factory_y +
                           distill_ancilla + totals.bus_physical;
            break;
        }
    }
    return totals;
}

namespace {

std::string code_name(CodeKind code) {
    switch (code) {
        case CodeKind::None: return "none";
        case CodeKind::Steane: return "steane";
        case CodeKind::Surface: return "surface";
    }
    return "?";
}

std::string global_name(arch::GlobalKind k) {
    switch (k) {
        case arch::GlobalKind::OneD: return "1d";
        case arch::GlobalKind::TwoD: return "2d";
        case arch::GlobalKind::AllToAll: return "all_to_all";
        case arch::GlobalKind::Arbitrary: return "arbitrary";
    }
    return "?";
}

std::map<std::string, std::string> echo_config(const EstimateConfig& cfg) {
    std::map<std::string, std::string> echo;
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    echo["code"] = code_name(cfg.code);
    echo["device.error_rate"] = num(cfg.device.error_rate);
    echo["device.op_time"] = num(cfg.device.op_time);
    echo["layout.global"] = global_name(cfg.global_layout);
    echo["layout.local"] = cfg.local_layout == arch::LocalKind::OneD ? "1d" : "2d";
    echo["decompose.epsilon"] = num(cfg.decompose.epsilon);
    if (const auto* s = std::get_if<lowering::StatisticalSynth>(&cfg.decompose.synthesizer)) {
        echo["decompose.synthesizer"] = "statistical";
        echo["decompose.mean_length"] = std::to_string(s->mean_length);
        echo["decompose.spread"] = std::to_string(s->spread);
        echo["decompose.seed"] = std::to_string(s->seed);
    } else {
        const auto& e = std::get<lowering::ExhaustiveSynth>(cfg.decompose.synthesizer);
        echo["decompose.synthesizer"] = "exhaustive";
        echo["decompose.max_length"] = std::to_string(e.max_length);
    }
    echo["decompose.controlled_rn"] =
        cfg.decompose.controlled_rn == lowering::ControlledRnVariant::Standard35
            ? "standard_35"
            : "ancilla_21";
    echo["target_fidelity"] = num(cfg.target_fidelity);
    echo["steane.c_qec"] = num(cfg.steane.c_qec);
    echo["steane.qec_depth"] = std::to_string(cfg.steane.qec_depth);
    echo["surface.c1"] = num(cfg.surface.c1);
    echo["surface.c2"] = num(cfg.surface.c2);
    echo["surface.eps_threshold"] = num(cfg.surface.eps_threshold);
    echo["surface.msd_target"] = num(cfg.surface.msd_target);
    echo["surface.msd_time_ratio"] = num(cfg.surface.msd_time_ratio);
    if (cfg.forced_level > 0) echo["steane.level"] = std::to_string(cfg.forced_level);
    if (cfg.forced_distance > 0)
        echo["surface.distance"] = std::to_string(cfg.forced_distance);
    return echo;
}

}  // namespace

EstimateReport run_estimate(const qasm::Program& p, const EstimateConfig& cfg) {
    auto diags = qasm::validate(p);
    for (const auto& d : diags)
        if (d.category != "dead-module")
            throw std::runtime_error("invalid program: " + d.message);

    qasm::Program lowered = cfg.code == CodeKind::None
                                ? p
                                : lowering::lower_gateset(p, lowering::ft_gate_set(),
                                                          cfg.decompose);

    arch::ArchitectureLayout layout;
    if (cfg.global_layout == arch::GlobalKind::Arbitrary) {
        // Device graphs only make sense for flat programs.
        lowered = qasm::flatten(lowered);
        layout = arch::build_arbitrary_layout(lowered, cfg.adjacency_text);
    } else {
        layout = arch::build_layout(lowered, cfg.global_layout, cfg.local_layout);
    }

    // Structural pass with physical perf to obtain KQ for code selection.
    mapper::MapperOptions probe_opts;
    auto physical = blocks::physical_perf(cfg.device);
    MappingResult probe = mapper::map_program(lowered, layout, physical, probe_opts);
    uint64_t kq = std::max<uint64_t>(1, probe.kq);

    EstimateReport report;
    mapper::MapperOptions opts;
    opts.emit_trace = cfg.emit_trace;
    blocks::LogicalOpPerf perf;

    switch (cfg.code) {
        case CodeKind::None:
            perf = physical;
            break;
        case CodeKind::Steane:
            report.level = cfg.forced_level > 0
                               ? cfg.forced_level
                               : blocks::required_concatenation_level(
                                     static_cast<double>(kq), cfg.device.error_rate,
                                     cfg.steane);
            perf = blocks::steane_logical_perf(cfg.device, report.level, cfg.steane);
            break;
        case CodeKind::Surface: {
            double eps_l = (1.0 - cfg.target_fidelity) / static_cast<double>(kq);
            report.distance =
                cfg.forced_distance > 0
                    ? cfg.forced_distance
                    : blocks::surface_code_distance(eps_l, cfg.device.error_rate,
                                                    cfg.surface);
            perf = blocks::surface_logical_perf(report.distance, cfg.device, cfg.surface);
            opts.passing = mapper::PassingStyle::SurfaceMove;
            opts.serialize_braids = true;
            opts.bus_lanes_override = (report.distance + 3) / 4;
            break;
        }
    }

    report.mapping = mapper::map_program(lowered, layout, perf, opts);
    report.t_one = report.mapping.t_one;

    if (cfg.code == CodeKind::Surface) {
        double eps_l = blocks::surface_logical_error(report.distance,
                                                     cfg.device.error_rate, cfg.surface);
        try {
            report.f_alg = surface_fidelity(report.mapping.kq, eps_l);
        } catch (const std::exception&) {
            report.f_alg = 0.0;
        }
    } else {
        report.f_alg = algorithm_fidelity(report.mapping.tallies, perf);
    }

    report.t_avg = average_time(report.t_one, report.f_alg);
    report.t_avg_saturated = !std::isfinite(report.t_avg);
    report.swap_ratio = report.mapping.total_tally() == 0
                            ? 0.0
                            : swap_ratio(report.mapping.tallies);
    report.qubits = qubit_totals(lowered, layout, cfg.code,
                                 cfg.code == CodeKind::Surface ? report.distance
                                                               : report.level,
                                 report.mapping, cfg);
    report.config_echo = echo_config(cfg);
    return report;
}

// ------------------------------------------------------------------ sweep

namespace {

SweepPoint evaluate_point(const qasm::Program& p, const EstimateConfig& base,
                          SweepParameter param, double value) {
    SweepPoint point;
    point.parameter = value;
    EstimateConfig cfg = base;
    try {
        switch (param) {
            case SweepParameter::SteaneLevel:
                cfg.code = CodeKind::Steane;
                cfg.forced_level = static_cast<int>(value);
                break;
            case SweepParameter::SurfaceDistance:
                cfg.code = CodeKind::Surface;
                cfg.forced_distance = static_cast<int>(value);
                break;
            case SweepParameter::ErrorRate:
                cfg.device.error_rate = value;
                break;
            case SweepParameter::CompileVariant: {
                auto cost = lowering::expand_controlled_rn(
                    value < 0.5 ? lowering::ControlledRnVariant::Standard35
                                : lowering::ControlledRnVariant::Ancilla21);
                cfg.decompose.controlled_rn =
                    value < 0.5 ? lowering::ControlledRnVariant::Standard35
                                : lowering::ControlledRnVariant::Ancilla21;
                // Replacement-sequence length scales with the variant's
                // per-controlled-Rn gate count.
                if (auto* s = std::get_if<lowering::StatisticalSynth>(
                        &cfg.decompose.synthesizer)) {
                    s->mean_length = std::max(
                        1, static_cast<int>(std::lround(s->mean_length *
                                                        cost.gate_count / 35.0)));
                }
                break;
            }
        }
        point.report = run_estimate(p, cfg);
        point.ok = true;
    } catch (const std::exception& e) {
        point.error = e.what();
    }
    return point;
}

void finish_series(SweepSeries& series, const qasm::Program& p,
                   const EstimateConfig& base) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < series.points.size(); ++i) {
        const auto& pt = series.points[i];
        if (pt.ok && std::isfinite(pt.report.t_avg) && pt.report.t_avg < best) {
            best = pt.report.t_avg;
            series.argmin_t_avg = static_cast<int>(i);
        }
    }
    // Formula-selected point for comparison against the sweep argmin.
    try {
        if (series.parameter == SweepParameter::SteaneLevel) {
            EstimateConfig cfg = base;
            cfg.code = CodeKind::Steane;
            cfg.forced_level = 0;
            series.formula_selected = run_estimate(p, cfg).level;
        } else if (series.parameter == SweepParameter::SurfaceDistance) {
            EstimateConfig cfg = base;
            cfg.code = CodeKind::Surface;
            cfg.forced_distance = 0;
            series.formula_selected = run_estimate(p, cfg).distance;
        }
    } catch (const std::exception&) {
        // Selection failure is not a sweep failure.
    }
}

}  // namespace

SweepSeries run_sweep_serial(const qasm::Program& p, const EstimateConfig& cfg,
                             const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("empty sweep range");
    SweepSeries series;
    series.parameter = spec.parameter;
    series.points.resize(spec.values.size());
    for (size_t i = 0; i < spec.values.size(); ++i)
        series.points[i] = evaluate_point(p, cfg, spec.parameter, spec.values[i]);
    finish_series(series, p, cfg);
    return series;
}

SweepSeries run_sweep(const qasm::Program& p, const EstimateConfig& cfg,
                      const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("empty sweep range");
    SweepSeries series;
    series.parameter = spec.parameter;
    series.points.resize(spec.values.size());
    const int64_t n = static_cast<int64_t>(spec.values.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
    for (int64_t i = 0; i < n; ++i)
        series.points[static_cast<size_t>(i)] =
            evaluate_point(p, cfg, spec.parameter, spec.values[static_cast<size_t>(i)]);
    finish_series(series, p, cfg);
    return series;
}

// --------------------------------------------------------------- emission

std::string report_to_json(const EstimateReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["t_one_s"] = report.t_one;
    j["f_alg"] = report.f_alg;
    if (report.t_avg_saturated)
        j["t_avg_s"] = "inf";
    else
        j["t_avg_s"] = report.t_avg;
    j["t_avg_saturated"] = report.t_avg_saturated;
    j["swap_ratio"] = report.swap_ratio;
    if (report.level > 0) j["steane_level"] = report.level;
    if (report.distance > 0) j["surface_distance"] = report.distance;
    j["qubits"]["q_comp"] = report.qubits.q_comp;
    j["qubits"]["q_comm"] = report.qubits.q_comm;
    j["qubits"]["total"] = report.qubits.total;
    j["qubits"]["factory_a"] = report.qubits.factory_a;
    j["qubits"]["factory_y"] = report.qubits.factory_y;
    j["qubits"]["bus_physical"] = report.qubits.bus_physical;
    j["mapping"]["k"] = report.mapping.k;
    j["mapping"]["q"] = report.mapping.q;
    j["mapping"]["kq"] = report.mapping.kq;
    j["mapping"]["max_parallel_t"] = report.mapping.max_parallel_t;
    j["mapping"]["max_parallel_s"] = report.mapping.max_parallel_s;
    j["mapping"]["inserted_swaps"] = report.mapping.inserted_swaps;
    nlohmann::json tallies;
    for (const auto& [gate, count] : report.mapping.tallies)
        tallies[qasm::gate_name(gate)] = count;
    j["mapping"]["tallies"] = tallies;
    nlohmann::json modules;
    for (const auto& [name, rec] : report.mapping.per_module) {
        modules[name]["duration_s"] = rec.duration;
        modules[name]["gates"] = rec.gate_count;
        modules[name]["inserted_swaps"] = rec.inserted_swaps;
        modules[name]["calls"] = rec.calls;
    }
    j["mapping"]["per_module"] = modules;
    j["config"] = report.config_echo;
    return j.dump(2) + "\n";
}

std::string report_summary(const EstimateReport& report) {
    std::ostringstream out;
    out.precision(6);
    out << "T_one       : " << report.t_one << " s\n";
    out << "F_alg       : " << report.f_alg << "\n";
    if (report.t_avg_saturated)
        out << "T_avg       : inf (fidelity at floor, reruns diverge)\n";
    else
        out << "T_avg       : " << report.t_avg << " s\n";
    out << "swap ratio  : " << report.swap_ratio << "\n";
    if (report.level > 0) out << "Steane level: " << report.level << "\n";
    if (report.distance > 0) out << "code distance: " << report.distance << "\n";
    out << "K           : " << report.mapping.k << "\n";
    out << "Q (depth)   : " << report.mapping.q << "\n";
    out << "KQ          : " << report.mapping.kq << "\n";
    out << "qubits total: " << report.qubits.total << "\n";
    return out.str();
}

std::string sweep_to_csv(const SweepSeries& series) {
    std::ostringstream out;
    out.precision(17);
    out << "param,T_one_s,F_alg,T_avg_s,qubits_total,swap_ratio\n";
    for (const auto& pt : series.points) {
        if (!pt.ok) {
            out << pt.parameter << ",failed,failed,failed,failed,failed\n";
            continue;
        }
        out << pt.parameter << "," << pt.report.t_one << "," << pt.report.f_alg << ","
            << (pt.report.t_avg_saturated ? std::numeric_limits<double>::infinity()
                                          : pt.report.t_avg)
            << "," << pt.report.qubits.total << "," << pt.report.swap_ratio << "\n";
    }
    return out.str();
}

}  // namespace qre::est
