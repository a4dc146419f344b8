#include "qre/qasm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qre::qasm {

namespace {

struct GateNameEntry {
    GateKind kind;
    const char* name;
};

constexpr GateNameEntry kGateNames[] = {
    {GateKind::X, "X"},         {GateKind::Z, "Z"},
    {GateKind::H, "H"},         {GateKind::S, "S"},
    {GateKind::Sdg, "Sdg"},     {GateKind::T, "T"},
    {GateKind::Tdg, "Tdg"},     {GateKind::Rz, "Rz"},
    {GateKind::CNOT, "CNOT"},   {GateKind::SWAP, "SWAP"},
    {GateKind::PrepZ, "PrepZ"}, {GateKind::MeasZ, "MeasZ"},
};

}  // namespace

const char* gate_name(GateKind k) {
    for (const auto& e : kGateNames)
        if (e.kind == k) return e.name;
    return "?";
}

std::optional<GateKind> gate_from_name(const std::string& name) {
    for (const auto& e : kGateNames)
        if (name == e.name) return e.kind;
    return std::nullopt;
}

int gate_arity(GateKind k) {
    return (k == GateKind::CNOT || k == GateKind::SWAP) ? 2 : 1;
}

CensusKey census_key(const Gate& g, double angle_quantum) {
    CensusKey key{g.kind, 0};
    if (g.kind == GateKind::Rz)
        key.angle_ticks = static_cast<int64_t>(std::llround(g.angle / angle_quantum));
    return key;
}

uint64_t GateCensus::count_of(GateKind k) const {
    uint64_t n = 0;
    for (const auto& [key, c] : counts)
        if (key.kind == k) n += c;
    return n;
}

double GateCensus::rz_ratio() const {
    if (total == 0) return 0.0;
    return static_cast<double>(count_of(GateKind::Rz)) / static_cast<double>(total);
}

// ---------------------------------------------------------------- parsing

namespace {

class LineParser {
public:
    explicit LineParser(const std::string& text) : text_(text) {}

    Program parse() {
        Program prog;
        std::optional<ModuleDef> current;
        std::istringstream in(text_);
        std::string raw;
        line_ = 0;
        while (std::getline(in, raw)) {
            ++line_;
            std::string stmt = strip(raw);
            if (stmt.empty()) continue;

            if (stmt.rfind("module", 0) == 0 &&
                (stmt.size() == 6 || std::isspace(static_cast<unsigned char>(stmt[6])))) {
                if (current) fail("nested module definition");
                current = parse_module_header(stmt);
                if (prog.modules.count(current->name))
                    fail("duplicate module name '" + current->name + "'");
                continue;
            }
            if (stmt == "}") {
                if (!current) fail("unmatched '}'");
                prog.modules.emplace(current->name, std::move(*current));
                current.reset();
                continue;
            }
            if (!current) fail("statement outside module block");
            parse_statement(stmt, *current);
        }
        if (current) fail("unterminated module '" + current->name + "'");
        if (!prog.modules.count("main"))
            fail("missing main module");
        prog.entry = "main";
        bool has_call = false;
        for (const auto& [name, m] : prog.modules)
            for (const auto& ins : m.body)
                if (std::holds_alternative<Call>(ins)) has_call = true;
        prog.structured = prog.modules.size() > 1 || has_call;
        return prog;
    }

private:
    [[noreturn]] void fail(const std::string& msg, int col = 0) {
        throw ParseError{line_, col, msg};
    }

    static std::string strip(std::string s) {
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        auto is_space = [](unsigned char c) { return std::isspace(c); };
        while (!s.empty() && is_space(s.back())) s.pop_back();
        size_t i = 0;
        while (i < s.size() && is_space(s[i])) ++i;
        return s.substr(i);
    }

    std::vector<std::string> split_args(const std::string& list) {
        std::vector<std::string> out;
        std::string item;
        for (char c : list) {
            if (c == ',') {
                out.push_back(strip(item));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!strip(item).empty() || !out.empty()) out.push_back(strip(item));
        for (const auto& a : out)
            if (a.empty()) fail("empty name in argument list");
        return out;
    }

    ModuleDef parse_module_header(const std::string& stmt) {
        auto open = stmt.find('(');
        auto close = stmt.find(')');
        auto brace = stmt.find('{');
        if (open == std::string::npos || close == std::string::npos ||
            brace == std::string::npos || close < open || brace < close)
            fail("malformed module header, expected 'module <name>(<params>) {'");
        ModuleDef m;
        m.name = strip(stmt.substr(6, open - 6));
        if (m.name.empty()) fail("missing module name");
        std::string params = stmt.substr(open + 1, close - open - 1);
        if (!strip(params).empty()) m.params = split_args(params);
        return m;
    }

    void parse_statement(const std::string& stmt, ModuleDef& m) {
        auto space = stmt.find_first_of(" \t");
        std::string head = stmt.substr(0, space);
        std::string rest = space == std::string::npos ? "" : strip(stmt.substr(space));

        if (head == "qubit") {
            if (rest.empty()) fail("qubit declaration needs a name");
            m.locals.push_back(rest);
            return;
        }
        if (head == "call") {
            auto open = rest.find('(');
            auto close = rest.rfind(')');
            if (open == std::string::npos || close == std::string::npos || close < open)
                fail("malformed call, expected 'call <Module>(<args>)'");
            Call c;
            c.module = strip(rest.substr(0, open));
            if (c.module.empty()) fail("missing callee name");
            std::string args = rest.substr(open + 1, close - open - 1);
            if (!strip(args).empty()) c.args = split_args(args);
            m.body.emplace_back(std::move(c));
            return;
        }

        Gate g;
        if (head.rfind("Rz(", 0) == 0) {
            auto close = head.find(')');
            if (close == std::string::npos) fail("malformed Rz, expected 'Rz(<angle>) <q>'");
            g.kind = GateKind::Rz;
            std::string num = head.substr(3, close - 3);
            try {
                size_t used = 0;
                g.angle = std::stod(num, &used);
                if (used != num.size()) throw std::invalid_argument(num);
            } catch (const std::exception&) {
                fail("bad Rz angle '" + num + "'");
            }
            if (!std::isfinite(g.angle)) fail("Rz angle must be finite");
        } else {
            auto kind = gate_from_name(head);
            if (!kind) fail("unknown gate mnemonic '" + head + "'");
            g.kind = *kind;
        }
        g.operands = split_args(rest);
        if (static_cast<int>(g.operands.size()) != gate_arity(g.kind))
            fail(std::string(gate_name(g.kind)) + " expects " +
                 std::to_string(gate_arity(g.kind)) + " operand(s)");
        m.body.emplace_back(std::move(g));
    }

    const std::string& text_;
    int line_ = 0;
};

}  // namespace

Program parse_program(const std::string& text) {
    return LineParser(text).parse();
}

// ------------------------------------------------------------- call graph

namespace {

// Post-order over the call graph from entry; throws on recursion.
std::vector<std::string> topo_order(const Program& p) {
    std::vector<std::string> order;
    std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        auto it = p.modules.find(name);
        if (it == p.modules.end())
            throw std::runtime_error("call to undefined module '" + name + "'");
        int& s = state[name];
        if (s == 1) throw std::runtime_error("recursion detected at module '" + name + "'");
        if (s == 2) return;
        s = 1;
        for (const auto& ins : it->second.body)
            if (const auto* c = std::get_if<Call>(&ins)) visit(c->module);
        s = 2;
        order.push_back(name);
    };
    visit(p.entry);
    return order;
}

}  // namespace

std::map<std::string, uint64_t> call_multiplicities(const Program& p) {
    auto order = topo_order(p);  // callees before callers
    std::map<std::string, uint64_t> mult;
    mult[p.entry] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        uint64_t m = mult[*it];
        if (m == 0) continue;
        for (const auto& ins : p.modules.at(*it).body)
            if (const auto* c = std::get_if<Call>(&ins)) mult[c->module] += m;
    }
    return mult;
}

// --------------------------------------------------------------- flatten

namespace {

uint64_t module_gate_count(const ModuleDef& m) {
    uint64_t n = 0;
    for (const auto& ins : m.body)
        if (std::holds_alternative<Gate>(ins)) ++n;
    return n;
}

}  // namespace

Program flatten(const Program& p, uint64_t cap) {
    auto mult = call_multiplicities(p);
    uint64_t flat_size = 0;
    for (const auto& [name, m] : mult)
        flat_size += m * module_gate_count(p.modules.at(name));
    if (flat_size > cap)
        throw std::runtime_error("flattened instruction count " +
                                 std::to_string(flat_size) + " exceeds cap " +
                                 std::to_string(cap));

    ModuleDef flat;
    flat.name = p.entry;
    uint64_t fresh = 0;

    // Inline depth-first. binding maps callee-visible names to flat names.
    std::function<void(const ModuleDef&, const std::map<std::string, std::string>&)>
        inline_module = [&](const ModuleDef& m,
                            const std::map<std::string, std::string>& binding) {
            std::map<std::string, std::string> names = binding;
            for (const auto& local : m.locals) {
                std::string flat_name =
                    m.name == p.entry ? local : m.name + "_" + std::to_string(fresh++) + "_" + local;
                names[local] = flat_name;
                flat.locals.push_back(flat_name);
            }
            for (const auto& ins : m.body) {
                if (const auto* g = std::get_if<Gate>(&ins)) {
                    Gate copy = *g;
                    for (auto& op : copy.operands) op = names.at(op);
                    flat.body.emplace_back(std::move(copy));
                } else {
                    const auto& c = std::get<Call>(ins);
                    const ModuleDef& callee = p.modules.at(c.module);
                    std::map<std::string, std::string> callee_binding;
                    for (size_t i = 0; i < c.args.size(); ++i)
                        callee_binding[callee.params[i]] = names.at(c.args[i]);
                    inline_module(callee, callee_binding);
                }
            }
        };

    inline_module(p.entry_module(), {});
    Program out;
    out.entry = p.entry;
    out.structured = false;
    out.modules.emplace(flat.name, std::move(flat));
    return out;
}

// ---------------------------------------------------------------- census

GateCensus gate_census(const Program& p, double angle_quantum) {
    GateCensus census;
    auto mult = call_multiplicities(p);
    for (const auto& [name, m] : mult) {
        if (m == 0) continue;
        auto& per_mod = census.per_module[name];
        for (const auto& ins : p.modules.at(name).body) {
            if (const auto* g = std::get_if<Gate>(&ins)) {
                CensusKey key = census_key(*g, angle_quantum);
                per_mod[key] += 1;
                census.counts[key] += m;
                census.total += m;
            }
        }
    }
    return census;
}

// -------------------------------------------------------------- validate

std::vector<Diagnostic> validate(const Program& p) {
    std::vector<Diagnostic> diags;
    auto add = [&](std::string mod, int idx, std::string cat, std::string msg) {
        diags.push_back({std::move(mod), idx, std::move(cat), std::move(msg)});
    };

    if (!p.modules.count(p.entry)) {
        add("", -1, "entry", "entry module '" + p.entry + "' not defined");
        return diags;
    }
    if (!p.entry_module().params.empty())
        add(p.entry, -1, "entry", "main module must take no parameters");

    for (const auto& [name, m] : p.modules) {
        std::set<std::string> declared(m.params.begin(), m.params.end());
        for (const auto& local : m.locals) {
            if (!declared.insert(local).second)
                add(name, -1, "duplicate-qubit",
                    "qubit '" + local + "' declared twice in '" + name + "'");
        }
        for (size_t i = 0; i < m.body.size(); ++i) {
            int idx = static_cast<int>(i);
            if (const auto* g = std::get_if<Gate>(&m.body[i])) {
                std::set<std::string> seen;
                for (const auto& op : g->operands) {
                    if (!declared.count(op))
                        add(name, idx, "unknown-qubit", "operand '" + op + "' not declared");
                    if (!seen.insert(op).second)
                        add(name, idx, "duplicate-operand",
                            std::string(gate_name(g->kind)) + " repeats operand '" + op + "'");
                }
            } else {
                const auto& c = std::get<Call>(m.body[i]);
                auto callee = p.modules.find(c.module);
                if (callee == p.modules.end()) {
                    add(name, idx, "unknown-module", "call to undefined module '" + c.module + "'");
                    continue;
                }
                if (c.args.size() != callee->second.params.size())
                    add(name, idx, "arity",
                        "call to '" + c.module + "' passes " + std::to_string(c.args.size()) +
                            " args, expected " + std::to_string(callee->second.params.size()));
                for (const auto& a : c.args)
                    if (!declared.count(a))
                        add(name, idx, "unknown-qubit", "argument '" + a + "' not declared");
            }
        }
    }

    // Cycle detection over the whole module set (not just what entry reaches).
    std::map<std::string, int> state;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        int& s = state[name];
        if (s != 0) {
            if (s == 1) add(name, -1, "recursion", "recursive call involving '" + name + "'");
            return;
        }
        s = 1;
        for (const auto& ins : p.modules.at(name).body)
            if (const auto* c = std::get_if<Call>(&ins))
                if (p.modules.count(c->module)) visit(c->module);
        s = 2;
    };
    for (const auto& [name, m] : p.modules)
        if (state[name] == 0) visit(name);

    // Reachability from entry.
    std::set<std::string> reachable;
    bool has_cycle = std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.category == "recursion";
    });
    if (!has_cycle) {
        std::function<void(const std::string&)> reach = [&](const std::string& name) {
            if (!reachable.insert(name).second) return;
            for (const auto& ins : p.modules.at(name).body)
                if (const auto* c = std::get_if<Call>(&ins))
                    if (p.modules.count(c->module)) reach(c->module);
        };
        reach(p.entry);
        for (const auto& [name, m] : p.modules)
            if (!reachable.count(name))
                add(name, -1, "dead-module", "module '" + name + "' unreachable from entry");
    }
    return diags;
}

// -------------------------------------------------------------- serialize

namespace {

void emit_module(std::ostringstream& out, const ModuleDef& m) {
    out << "module " << m.name << "(";
    for (size_t i = 0; i < m.params.size(); ++i)
        out << (i ? "," : "") << m.params[i];
    out << ") {\n";
    for (const auto& local : m.locals) out << "  qubit " << local << "\n";
    for (const auto& ins : m.body) {
        out << "  ";
        if (const auto* g = std::get_if<Gate>(&ins)) {
            if (g->kind == GateKind::Rz) {
                std::ostringstream num;
                num.precision(17);
                num << g->angle;
                out << "Rz(" << num.str() << ")";
            } else {
                out << gate_name(g->kind);
            }
            out << " ";
            for (size_t i = 0; i < g->operands.size(); ++i)
                out << (i ? "," : "") << g->operands[i];
        } else {
            const auto& c = std::get<Call>(ins);
            out << "call " << c.module << "(";
            for (size_t i = 0; i < c.args.size(); ++i)
                out << (i ? "," : "") << c.args[i];
            out << ")";
        }
        out << "\n";
    }
    out << "}\n";
}

}  // namespace

std::string serialize_program(const Program& p, SerializeForm form, uint64_t flatten_cap) {
    std::ostringstream out;
    if (form == SerializeForm::Flat) {
        Program flat = flatten(p, flatten_cap);
        emit_module(out, flat.entry_module());
        return out.str();
    }
    for (const auto& [name, m] : p.modules)
        if (name != p.entry) emit_module(out, m);
    emit_module(out, p.entry_module());
    return out.str();
}

bool structurally_equal(const Program& a, const Program& b) {
    if (a.entry != b.entry || a.modules.size() != b.modules.size()) return false;
    for (const auto& [name, ma] : a.modules) {
        auto it = b.modules.find(name);
        if (it == b.modules.end()) return false;
        const ModuleDef& mb = it->second;
        if (ma.params != mb.params || ma.locals != mb.locals ||
            ma.body.size() != mb.body.size())
            return false;
        for (size_t i = 0; i < ma.body.size(); ++i) {
            const auto& ia = ma.body[i];
            const auto& ib = mb.body[i];
            if (ia.index() != ib.index()) return false;
            if (const auto* ga = std::get_if<Gate>(&ia)) {
                const auto& gb = std::get<Gate>(ib);
                if (ga->kind != gb.kind || ga->operands != gb.operands) return false;
                if (ga->kind == GateKind::Rz && ga->angle != gb.angle) return false;
            } else {
                const auto& ca = std::get<Call>(ia);
                const auto& cb = std::get<Call>(ib);
                if (ca.module != cb.module || ca.args != cb.args) return false;
            }
        }
    }
    return true;
}

}  // namespace qre::qasm
