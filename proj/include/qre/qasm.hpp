#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Hierarchical quantum assembly data model: modules of gate/call
// instructions, a line-oriented text format, flattening and gate census.
namespace qre::qasm {

enum class GateKind : uint8_t {
    X, Z, H, S, Sdg, T, Tdg, Rz, CNOT, SWAP, PrepZ, MeasZ
};

const char* gate_name(GateKind k);
std::optional<GateKind> gate_from_name(const std::string& name);

// 2 for CNOT/SWAP, 1 otherwise.
int gate_arity(GateKind k);

struct Gate {
    GateKind kind;
    double angle = 0.0;  // meaningful only for Rz
    std::vector<std::string> operands;
};

struct Call {
    std::string module;
    std::vector<std::string> args;
};

using Instruction = std::variant<Gate, Call>;

struct ModuleDef {
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> locals;
    std::vector<Instruction> body;

    size_t qubit_count() const { return params.size() + locals.size(); }
};

struct Program {
    std::map<std::string, ModuleDef> modules;
    std::string entry = "main";
    bool structured = false;

    const ModuleDef& entry_module() const { return modules.at(entry); }
};

struct Diagnostic {
    std::string module;     // empty for program-level issues
    int instruction = -1;   // index in module body, -1 if not applicable
    std::string category;   // "recursion", "arity", "syntax", ...
    std::string message;
};

struct ParseError {
    int line = 0;
    int column = 0;
    std::string message;
};

// Census key: gate kind plus, for Rz, the angle quantized to a fixed grid
// so float formatting noise cannot split buckets.
struct CensusKey {
    GateKind kind;
    int64_t angle_ticks = 0;  // round(angle / quantum), 0 for non-Rz

    auto operator<=>(const CensusKey&) const = default;
};

inline constexpr double kDefaultAngleQuantum = 1e-6;

CensusKey census_key(const Gate& g, double angle_quantum = kDefaultAngleQuantum);

struct GateCensus {
    std::map<CensusKey, uint64_t> counts;
    uint64_t total = 0;
    std::map<std::string, std::map<CensusKey, uint64_t>> per_module;

    uint64_t count_of(GateKind k) const;  // summed over Rz buckets for Rz
    double rz_ratio() const;              // Rz gates / total, 0 if empty

    bool operator==(const GateCensus& other) const {
        return counts == other.counts && total == other.total;
    }
};

inline constexpr uint64_t kDefaultFlattenCap = 100'000'000;

// Throws ParseError on malformed input.
Program parse_program(const std::string& text);

enum class SerializeForm { Structured, Flat };

// Structured form emits sub-modules first, entry module last.
// Flat form inlines everything; throws std::runtime_error past the cap.
std::string serialize_program(const Program& p,
                              SerializeForm form = SerializeForm::Structured,
                              uint64_t flatten_cap = kDefaultFlattenCap);

// Depth-first inlining with operand substitution. Requires a DAG call graph.
Program flatten(const Program& p, uint64_t cap = kDefaultFlattenCap);

// Counts without flattening, via call-graph multiplicity products.
GateCensus gate_census(const Program& p,
                       double angle_quantum = kDefaultAngleQuantum);

// Empty list iff the program is well formed.
std::vector<Diagnostic> validate(const Program& p);

// Multiplicity of each module in the fully expanded call tree rooted at
// entry (entry itself has multiplicity 1). Throws on recursion.
std::map<std::string, uint64_t> call_multiplicities(const Program& p);

bool structurally_equal(const Program& a, const Program& b);

}  // namespace qre::qasm
