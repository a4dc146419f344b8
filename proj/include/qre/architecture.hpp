#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qre/qasm.hpp"

// Quantum computer layouts: per-module computing regions, the global
// arrangement with a communication bus, and surface-code floor plans.
namespace qre::arch {

struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

enum class CellRole { Param, Local, Filler };

struct Region {
    std::string module;
    int width = 0;
    int height = 0;
    Cell origin;  // global coordinate of the region's (0,0) cell
    std::map<Cell, CellRole> roles;  // keyed by region-local coordinates

    Cell to_global(Cell local) const {
        return {origin.row + local.row, origin.col + local.col};
    }
    // Region-local cell holding the i-th parameter / local qubit.
    Cell param_cell(size_t index) const;
    Cell local_cell(size_t index) const;
};

enum class GlobalKind { OneD, TwoD, AllToAll, Arbitrary };
enum class LocalKind { OneD, TwoD };

struct BusSpec {
    int bandwidth = 0;  // logical-qubit lanes; 0 means no bus
    int length = 0;     // cells along the strip (1D global)
};

struct ArchitectureLayout {
    GlobalKind global_kind = GlobalKind::OneD;
    LocalKind local_kind = LocalKind::OneD;
    std::vector<Region> regions;
    BusSpec bus;
    int region_side = 0;  // n for uniform n x n regions (2D global)
    uint64_t total_cells = 0;
    // Arbitrary device: adjacency over abstract node ids.
    std::map<int, std::vector<int>> adjacency;

    const Region& region_of(const std::string& module) const;
    bool has_bus() const { return bus.bandwidth > 0; }
};

struct SurfaceFootprint {
    int d = 0;
    int spacing = 0;          // ceil(d/4) data-qubit separation
    uint64_t half_a = 0;      // A = 2d-2+spacing
    uint64_t half_b = 0;      // B = 4d-4+3*spacing
    uint64_t physical_qubits = 0;  // (2A+1)(2B+1)
    // The two defect sites are neither data nor syndrome, so the split is
    // (Q_L-1)/2 data and (Q_L-3)/2 syndrome (126/125 at d=3).
    uint64_t data_qubits = 0;
    uint64_t syndrome_qubits = 0;
};

Region build_region(const qasm::ModuleDef& m, LocalKind local_kind);

// Max over modules of parameter count; 0 when no module takes parameters.
int bus_bandwidth(const qasm::Program& p);

ArchitectureLayout build_layout(const qasm::Program& p, GlobalKind global_kind,
                                LocalKind local_kind);

// Arbitrary-device layout from an adjacency edge list (one "u v" per line).
ArchitectureLayout build_arbitrary_layout(const qasm::Program& p,
                                          const std::string& edge_list_text);

SurfaceFootprint surface_footprint(int d);

// Physical qubits for an n_h x n_w grid of double-defect logical qubits.
uint64_t surface_grid_qubits(int n_h, int n_w, int d);

}  // namespace qre::arch
