#include "qre/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qre::arch {

Cell Region::param_cell(size_t index) const {
    size_t i = 0;
    for (const auto& [cell, role] : roles)
        if (role == CellRole::Param && i++ == index) return cell;
    throw std::out_of_range("param cell index out of range");
}

Cell Region::local_cell(size_t index) const {
    size_t i = 0;
    for (const auto& [cell, role] : roles)
        if (role == CellRole::Local && i++ == index) return cell;
    throw std::out_of_range("local cell index out of range");
}

const Region& ArchitectureLayout::region_of(const std::string& module) const {
    for (const auto& r : regions)
        if (r.module == module) return r;
    throw std::out_of_range("no region for module '" + module + "'");
}

Region build_region(const qasm::ModuleDef& m, LocalKind local_kind) {
    size_t n = m.qubit_count();
    if (n == 0) throw std::invalid_argument("module '" + m.name + "' has no qubits");
    Region r;
    r.module = m.name;
    if (local_kind == LocalKind::OneD) {
        r.width = static_cast<int>(n);
        r.height = 1;
    } else {
        r.width = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
        r.height = static_cast<int>((n + r.width - 1) / static_cast<size_t>(r.width));
    }
    // Params first in row-major order, then locals, then fillers.
    size_t placed = 0;
    for (int row = 0; row < r.height; ++row) {
        for (int col = 0; col < r.width; ++col) {
            CellRole role = placed < m.params.size()  ? CellRole::Param
                            : placed < n              ? CellRole::Local
                                                      : CellRole::Filler;
            r.roles[{row, col}] = role;
            ++placed;
        }
    }
    return r;
}

int bus_bandwidth(const qasm::Program& p) {
    int bw = 0;
    for (const auto& [name, m] : p.modules)
        bw = std::max(bw, static_cast<int>(m.params.size()));
    return bw;
}

namespace {

// Modules in first-call order starting from entry; unreached ones appended.
std::vector<std::string> placement_order(const qasm::Program& p) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        if (!seen.insert(name).second) return;
        order.push_back(name);
        for (const auto& ins : p.modules.at(name).body)
            if (const auto* c = std::get_if<qasm::Call>(&ins))
                if (p.modules.count(c->module)) visit(c->module);
    };
    visit(p.entry);
    for (const auto& [name, m] : p.modules) visit(name);
    return order;
}

}  // namespace

ArchitectureLayout build_layout(const qasm::Program& p, GlobalKind global_kind,
                                LocalKind local_kind) {
    if (global_kind == GlobalKind::Arbitrary)
        throw std::invalid_argument("arbitrary layouts need an adjacency edge list");

    ArchitectureLayout layout;
    layout.global_kind = global_kind;
    layout.local_kind = local_kind;

    auto order = placement_order(p);
    int bw = bus_bandwidth(p);

    if (global_kind == GlobalKind::TwoD) {
        // Uniform n x n regions on a near-square module grid. The grid is
        // floor(sqrt(|M|)) columns wide; n must actually hold max Q^M, so
        // it is the ceiling square root.
        size_t max_q = 0;
        for (const auto& [name, m] : p.modules) max_q = std::max(max_q, m.qubit_count());
        int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_q))));
        layout.region_side = n;
        int cols = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                   static_cast<double>(p.modules.size())))));
        int idx = 0;
        for (const auto& name : order) {
            const auto& m = p.modules.at(name);
            Region r;
            r.module = name;
            r.width = n;
            r.height = n;
            size_t placed = 0;
            size_t q = m.qubit_count();
            for (int row = 0; row < n; ++row)
                for (int col = 0; col < n; ++col) {
                    CellRole role = placed < m.params.size() ? CellRole::Param
                                    : placed < q             ? CellRole::Local
                                                             : CellRole::Filler;
                    r.roles[{row, col}] = role;
                    ++placed;
                }
            // One bus lane separates neighboring regions.
            int grid_row = idx / cols;
            int grid_col = idx % cols;
            r.origin = {grid_row * (n + 1), grid_col * (n + 1)};
            layout.regions.push_back(std::move(r));
            ++idx;
        }
        layout.bus = {bw, static_cast<int>(p.modules.size()) * n};
    } else {
        // 1D global (and all-to-all, where geometry is unused): regions in
        // a row in first-call order; bus strip of `bandwidth` lanes above.
        int bus_rows = global_kind == GlobalKind::AllToAll ? 0 : bw;
        int col = 0;
        for (const auto& name : order) {
            Region r = build_region(p.modules.at(name), local_kind);
            r.origin = {bus_rows, col};
            col += r.width;
            layout.regions.push_back(std::move(r));
        }
        layout.bus = global_kind == GlobalKind::AllToAll ? BusSpec{0, 0} : BusSpec{bw, col};
    }

    bool any_call = false;
    for (const auto& [name, m] : p.modules)
        for (const auto& ins : m.body)
            if (std::holds_alternative<qasm::Call>(ins)) any_call = true;
    if (any_call && global_kind != GlobalKind::AllToAll && layout.bus.bandwidth < 1)
        throw std::runtime_error("program makes calls but bus bandwidth is 0");

    layout.total_cells = 0;
    for (const auto& r : layout.regions)
        layout.total_cells += static_cast<uint64_t>(r.width) * r.height;
    layout.total_cells +=
        static_cast<uint64_t>(layout.bus.bandwidth) * layout.bus.length;
    return layout;
}

ArchitectureLayout build_arbitrary_layout(const qasm::Program& p,
                                          const std::string& edge_list_text) {
    ArchitectureLayout layout;
    layout.global_kind = GlobalKind::Arbitrary;

    std::istringstream in(edge_list_text);
    std::string line;
    std::set<int> nodes;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u >> v)) continue;
        layout.adjacency[u].push_back(v);
        layout.adjacency[v].push_back(u);
        nodes.insert(u);
        nodes.insert(v);
    }
    for (auto& [node, nbrs] : layout.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    if (nodes.empty()) throw std::invalid_argument("empty adjacency edge list");

    // Connectivity check.
    std::set<int> seen;
    std::vector<int> stack{*nodes.begin()};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (!seen.insert(u).second) continue;
        for (int v : layout.adjacency[u]) stack.push_back(v);
    }
    if (seen.size() != nodes.size())
        throw std::runtime_error("adjacency graph is disconnected");

    const auto& m = p.entry_module();
    if (p.structured)
        throw std::invalid_argument("arbitrary layouts take non-structured programs");
    if (m.qubit_count() > nodes.size())
        throw std::runtime_error("device has fewer nodes than program qubits");

    // Qubits occupy node ids in ascending order; one region spans the device.
    Region r;
    r.module = m.name;
    r.width = static_cast<int>(nodes.size());
    r.height = 1;
    size_t placed = 0;
    for (int node : nodes) {
        CellRole role = placed < m.qubit_count() ? CellRole::Local : CellRole::Filler;
        r.roles[{0, node}] = role;
        ++placed;
    }
    layout.regions.push_back(std::move(r));
    layout.total_cells = nodes.size();
    return layout;
}

SurfaceFootprint surface_footprint(int d) {
    if (d < 1) throw std::invalid_argument("code distance must be >= 1");
    SurfaceFootprint f;
    f.d = d;
    f.spacing = (d + 3) / 4;  // ceil(d/4); floor contradicts the 253-qubit floor plan
    f.half_a = static_cast<uint64_t>(2 * d - 2 + f.spacing);
    f.half_b = static_cast<uint64_t>(4 * d - 4 + 3 * f.spacing);
    f.physical_qubits = (2 * f.half_a + 1) * (2 * f.half_b + 1);
    f.data_qubits = (f.physical_qubits - 1) / 2;
    f.syndrome_qubits = (f.physical_qubits - 3) / 2;
    return f;
}

uint64_t surface_grid_qubits(int n_h, int n_w, int d) {
    if (n_h < 1 || n_w < 1) throw std::invalid_argument("grid extents must be >= 1");
    SurfaceFootprint f = surface_footprint(d);
    uint64_t s = static_cast<uint64_t>(f.spacing);
    uint64_t w = 2 * (static_cast<uint64_t>(n_w) * f.half_a + (n_w - 1) * s) + 1;
    uint64_t h = 2 * (static_cast<uint64_t>(n_h) * f.half_b + (n_h - 1) * s) + 1;
    return w * h;
}

}  // namespace qre::arch
