#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qre/architecture.hpp"
#include "qre/building_blocks.hpp"
#include "qre/qasm.hpp"

// Deterministic system-mapping scheduler: recasts a program for a layout,
// inserting SWAP routing and forward/backward qubit passing, and reports
// timing, gate tallies and parallelism statistics.
namespace qre::mapper {

using arch::ArchitectureLayout;
using arch::Cell;
using blocks::LogicalOpPerf;
using qasm::GateKind;

enum class PassingStyle {
    SwapChain,   // Steane/physical: one SWAP per cell of distance
    SurfaceMove  // surface code: one multi-cell move per leg
};

struct MapperOptions {
    PassingStyle passing = PassingStyle::SwapChain;
    bool serialize_braids = false;  // surface mode: one braid at a time
    int bus_lanes_override = 0;     // >0 replaces layout bus bandwidth
    bool emit_trace = false;
};

struct ModuleRecord {
    double duration = 0.0;      // body time, passing excluded
    uint64_t gate_count = 0;
    uint64_t inserted_swaps = 0;
    uint64_t calls = 0;         // times this module was entered
};

struct MappingResult {
    double t_one = 0.0;  // seconds
    std::map<GateKind, uint64_t> tallies;  // includes routing SWAPs
    uint64_t k = 0;   // logical qubits (sum of module params + locals)
    uint64_t q = 0;   // critical-path depth in logical steps
    uint64_t kq = 0;
    int max_parallel_t = 0;
    int max_parallel_s = 0;
    uint64_t inserted_swaps = 0;
    std::map<std::string, ModuleRecord> per_module;
    std::vector<std::string> trace;  // filled when emit_trace is set

    uint64_t total_tally() const;
};

// Schedules the whole program. The program must already be lowered to
// gates covered by `perf`.
MappingResult map_program(const qasm::Program& p, const ArchitectureLayout& layout,
                          const LogicalOpPerf& perf, const MapperOptions& options = {});

// Ordered SWAP plan moving the occupant of `from` until it is adjacent to
// `to`; empty when they already are. Cells are global coordinates inside
// one region. Throws when no path exists.
std::vector<std::pair<Cell, Cell>> route_cnot(const ArchitectureLayout& layout,
                                              const std::string& module,
                                              Cell from, Cell to);

// Shortest-path cell distance inside a region (BFS, 4-neighborhood), used
// by routing and by the passing-distance computation.
int region_distance(const ArchitectureLayout& layout, const std::string& module,
                    Cell from, Cell to);

struct PassingCost {
    double time = 0.0;
    uint64_t swaps = 0;
    int waves = 0;
};

// Forward or backward qubit passing of `distances` (one per argument,
// already measured in cells) over a bus of `bandwidth` lanes.
PassingCost pass_qubits(const std::vector<int>& distances, int bandwidth,
                        PassingStyle style, double swap_time,
                        double move_leg_time);

}  // namespace qre::mapper
