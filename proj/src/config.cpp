#include "qre/config.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qre::config {

namespace {

std::string strip(std::string s) {
    auto is_space = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && is_space(s.back())) s.pop_back();
    size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    return s.substr(i);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value '" + value + "' for key '" + key + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    double v = to_double(key, value);
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("bad boolean value '" + value + "' for key '" + key + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(to_double(key, strip(item)));
    if (out.empty()) throw std::invalid_argument("empty list for key '" + key + "'");
    return out;
}

lowering::StatisticalSynth& statistical(RunConfig& cfg) {
    if (auto* s = std::get_if<lowering::StatisticalSynth>(&cfg.estimate.decompose.synthesizer))
        return *s;
    cfg.estimate.decompose.synthesizer = lowering::StatisticalSynth{};
    return std::get<lowering::StatisticalSynth>(cfg.estimate.decompose.synthesizer);
}

lowering::ExhaustiveSynth& exhaustive(RunConfig& cfg) {
    if (auto* e = std::get_if<lowering::ExhaustiveSynth>(&cfg.estimate.decompose.synthesizer))
        return *e;
    cfg.estimate.decompose.synthesizer = lowering::ExhaustiveSynth{};
    return std::get<lowering::ExhaustiveSynth>(cfg.estimate.decompose.synthesizer);
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto& e = cfg.estimate;
    if (key == "input") cfg.input_path = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "adjacency") cfg.adjacency_path = value;
    else if (key == "code") {
        if (value == "none") e.code = est::CodeKind::None;
        else if (value == "steane") e.code = est::CodeKind::Steane;
        else if (value == "surface") e.code = est::CodeKind::Surface;
        else throw std::invalid_argument("code must be none|steane|surface");
    } else if (key == "error_rate") e.device.error_rate = to_double(key, value);
    else if (key == "op_time") e.device.op_time = to_double(key, value);
    else if (key == "global_layout") {
        if (value == "1d") e.global_layout = arch::GlobalKind::OneD;
        else if (value == "2d") e.global_layout = arch::GlobalKind::TwoD;
        else if (value == "all_to_all") e.global_layout = arch::GlobalKind::AllToAll;
        else if (value == "arbitrary") e.global_layout = arch::GlobalKind::Arbitrary;
        else throw std::invalid_argument("global_layout must be 1d|2d|all_to_all|arbitrary");
    } else if (key == "local_layout") {
        if (value == "1d") e.local_layout = arch::LocalKind::OneD;
        else if (value == "2d") e.local_layout = arch::LocalKind::TwoD;
        else throw std::invalid_argument("local_layout must be 1d|2d");
    } else if (key == "epsilon") e.decompose.epsilon = to_double(key, value);
    else if (key == "synthesizer") {
        if (value == "statistical") statistical(cfg);
        else if (value == "exhaustive") exhaustive(cfg);
        else throw std::invalid_argument("synthesizer must be statistical|exhaustive");
    } else if (key == "mean_length") statistical(cfg).mean_length = to_int(key, value);
    else if (key == "spread") statistical(cfg).spread = to_int(key, value);
    else if (key == "seed") statistical(cfg).seed = static_cast<uint64_t>(to_double(key, value));
    else if (key == "max_length") exhaustive(cfg).max_length = to_int(key, value);
    else if (key == "controlled_rn") {
        if (value == "standard_35")
            e.decompose.controlled_rn = lowering::ControlledRnVariant::Standard35;
        else if (value == "ancilla_21")
            e.decompose.controlled_rn = lowering::ControlledRnVariant::Ancilla21;
        else throw std::invalid_argument("controlled_rn must be standard_35|ancilla_21");
    } else if (key == "target_fidelity") e.target_fidelity = to_double(key, value);
    else if (key == "steane_level") e.forced_level = to_int(key, value);
    else if (key == "surface_distance") e.forced_distance = to_int(key, value);
    else if (key == "c_qec") e.steane.c_qec = to_double(key, value);
    else if (key == "qec_depth") e.steane.qec_depth = to_int(key, value);
    else if (key == "max_level") e.steane.max_level = to_int(key, value);
    else if (key == "c1") e.surface.c1 = to_double(key, value);
    else if (key == "c2") e.surface.c2 = to_double(key, value);
    else if (key == "eps_threshold") e.surface.eps_threshold = to_double(key, value);
    else if (key == "msd_target") e.surface.msd_target = to_double(key, value);
    else if (key == "msd_time_ratio") e.surface.msd_time_ratio = to_double(key, value);
    else if (key == "syndrome_round_ops") e.surface.syndrome_round_ops = to_int(key, value);
    else if (key == "max_distance") e.surface.max_distance = to_int(key, value);
    else if (key == "distillation_ancilla_pairs")
        e.distillation_ancilla_pairs = to_int(key, value);
    else if (key == "trace") e.emit_trace = to_bool(key, value);
    else if (key == "sweep") {
        cfg.has_sweep = true;
        if (value == "level") cfg.sweep.parameter = est::SweepParameter::SteaneLevel;
        else if (value == "distance") cfg.sweep.parameter = est::SweepParameter::SurfaceDistance;
        else if (value == "error") cfg.sweep.parameter = est::SweepParameter::ErrorRate;
        else if (value == "variant") cfg.sweep.parameter = est::SweepParameter::CompileVariant;
        else throw std::invalid_argument("sweep must be level|distance|error|variant");
    } else if (key == "sweep_values") cfg.sweep.values = to_list(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        try {
            apply_override(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                        err.what());
        }
    }
    return cfg;
}

void RunConfig::check() const {
    const auto& e = estimate;
    e.device.check();
    e.decompose.check();
    if (!(e.target_fidelity > 0.0 && e.target_fidelity < 1.0))
        throw std::invalid_argument("target_fidelity must be in (0,1)");
    if (e.code == est::CodeKind::Surface &&
        e.global_layout == arch::GlobalKind::AllToAll)
        throw std::invalid_argument(
            "surface code needs a geometric layout, not all_to_all");
    if (e.global_layout == arch::GlobalKind::Arbitrary && adjacency_path.empty())
        throw std::invalid_argument("arbitrary layout needs an adjacency file");
    if (has_sweep && sweep.values.empty())
        throw std::invalid_argument("sweep requested without sweep_values");
}

}  // namespace qre::config
