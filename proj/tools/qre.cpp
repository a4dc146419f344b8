// qre: resource and performance estimation for fault-tolerant quantum
// computing over hierarchically structured assembly programs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qre/config.hpp"
#include "qre/estimator.hpp"
#include "qre/lowering.hpp"
#include "qre/qasm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitModel = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

qre::config::RunConfig load_config(const std::string& config_path,
                                   const std::vector<std::string>& overrides) {
    qre::config::RunConfig cfg;
    if (!config_path.empty()) cfg = qre::config::parse_config(read_file(config_path));
    for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must be key=value: '" + kv + "'");
        qre::config::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.check();
    return cfg;
}

int cmd_parse(const std::string& input, bool flat) {
    std::string text;
    try {
        text = read_file(input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        auto program = qre::qasm::parse_program(text);
        auto diags = qre::qasm::validate(program);
        for (const auto& d : diags) {
            std::cerr << "diagnostic [" << d.category << "]";
            if (!d.module.empty()) std::cerr << " module " << d.module;
            if (d.instruction >= 0) std::cerr << " instruction " << d.instruction;
            std::cerr << ": " << d.message << "\n";
        }
        if (!diags.empty()) return kExitInput;
        std::cout << qre::qasm::serialize_program(
            program, flat ? qre::qasm::SerializeForm::Flat
                          : qre::qasm::SerializeForm::Structured);
        return kExitOk;
    } catch (const qre::qasm::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ": " << e.message << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

int cmd_lower(const qre::config::RunConfig& cfg) {
    try {
        auto program = qre::qasm::parse_program(read_file(cfg.input_path));
        auto lowered = qre::lowering::lower_gateset(program, qre::lowering::ft_gate_set(),
                                                    cfg.estimate.decompose);
        std::cout << qre::qasm::serialize_program(lowered);
        return kExitOk;
    } catch (const qre::qasm::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ": " << e.message << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "lower error: " << e.what() << "\n";
        return kExitModel;
    }
}

int cmd_estimate(const qre::config::RunConfig& cfg) {
    qre::qasm::Program program;
    try {
        program = qre::qasm::parse_program(read_file(cfg.input_path));
    } catch (const qre::qasm::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ": " << e.message << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        auto report = qre::est::run_estimate(program, cfg.estimate);
        std::filesystem::path out_dir(cfg.output_dir);
        std::filesystem::create_directories(out_dir);
        write_file(out_dir / "report.json", qre::est::report_to_json(report));
        write_file(out_dir / "summary.txt", qre::est::report_summary(report));
        if (cfg.estimate.emit_trace) {
            std::ostringstream trace;
            for (const auto& line : report.mapping.trace) trace << line << "\n";
            write_file(out_dir / "trace.txt", trace.str());
        }
        std::cout << qre::est::report_summary(report);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "estimate error: " << e.what() << "\n";
        return kExitModel;
    }
}

int cmd_sweep(const qre::config::RunConfig& cfg) {
    if (!cfg.has_sweep || cfg.sweep.values.empty()) {
        std::cerr << "sweep error: no sweep specified in config\n";
        return kExitInput;
    }
    qre::qasm::Program program;
    try {
        program = qre::qasm::parse_program(read_file(cfg.input_path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        auto series = qre::est::run_sweep(program, cfg.estimate, cfg.sweep);
        std::filesystem::path out_dir(cfg.output_dir);
        std::filesystem::create_directories(out_dir);
        write_file(out_dir / "sweep.csv", qre::est::sweep_to_csv(series));

        bool any_ok = false;
        for (const auto& pt : series.points) any_ok |= pt.ok;
        if (!any_ok) {
            std::cerr << "sweep error: every point failed\n";
            return kExitModel;
        }
        std::cout << qre::est::sweep_to_csv(series);
        if (series.argmin_t_avg >= 0)
            std::cout << "argmin T_avg at param = "
                      << series.points[series.argmin_t_avg].parameter << "\n";
        if (series.formula_selected)
            std::cout << "formula-selected param = " << *series.formula_selected << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "sweep error: " << e.what() << "\n";
        return kExitModel;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fault-tolerant quantum computing resource estimator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string input;
    bool flat = false;

    auto* parse = app.add_subcommand("parse", "parse, validate and re-emit a program");
    parse->add_option("input", input, "assembly source file")->required();
    parse->add_flag("--flat", flat, "emit the flattened (non-structured) form");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file");
        cmd->add_option("--set", overrides, "key=value override (repeatable)");
        cmd->add_option("--input", input, "assembly source file");
    };
    auto* lower = app.add_subcommand("lower", "lower to the fault-tolerant gate set");
    add_common(lower);
    auto* estimate = app.add_subcommand("estimate", "run the full estimation pipeline");
    add_common(estimate);
    auto* sweep = app.add_subcommand("sweep", "sweep a model parameter");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    if (parse->parsed()) return cmd_parse(input, flat);

    qre::config::RunConfig cfg;
    try {
        cfg = load_config(config_path, overrides);
        if (!input.empty()) cfg.input_path = input;
        if (cfg.input_path.empty())
            throw std::invalid_argument("no input program (set --input or input= in config)");
        if (!cfg.adjacency_path.empty())
            cfg.estimate.adjacency_text = read_file(cfg.adjacency_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitInput;
    }

    if (lower->parsed()) return cmd_lower(cfg);
    if (estimate->parsed()) return cmd_estimate(cfg);
    return cmd_sweep(cfg);
}
