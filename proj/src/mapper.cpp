#include "qre/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace qre::mapper {

uint64_t MappingResult::total_tally() const {
    uint64_t n = 0;
    for (const auto& [k, c] : tallies) n += c;
    return n;
}

namespace {

std::vector<Cell> region_cells(const arch::Region& r) {
    std::vector<Cell> cells;
    cells.reserve(r.roles.size());
    for (const auto& [local, role] : r.roles) cells.push_back(r.to_global(local));
    return cells;
}

std::vector<Cell> neighbors(const ArchitectureLayout& layout, const arch::Region& r,
                            Cell c) {
    std::vector<Cell> out;
    if (layout.global_kind == arch::GlobalKind::Arbitrary) {
        auto it = layout.adjacency.find(c.col);
        if (it != layout.adjacency.end())
            for (int v : it->second) out.push_back({0, v});
        return out;  // adjacency lists are pre-sorted
    }
    // 4-neighborhood clipped to the region rectangle.
    const Cell candidates[] = {{c.row - 1, c.col}, {c.row, c.col - 1},
                               {c.row, c.col + 1}, {c.row + 1, c.col}};
    for (Cell n : candidates) {
        int lr = n.row - r.origin.row;
        int lc = n.col - r.origin.col;
        if (lr >= 0 && lr < r.height && lc >= 0 && lc < r.width) out.push_back(n);
    }
    return out;
}

// Deterministic BFS shortest path; explores neighbors in ascending cell
// order so tie-breaks are lexicographic.
std::vector<Cell> bfs_path(const ArchitectureLayout& layout, const arch::Region& r,
                           Cell from, Cell to) {
    if (from == to) return {from};
    std::map<Cell, Cell> parent;
    std::deque<Cell> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        for (Cell n : neighbors(layout, r, c)) {
            if (parent.count(n)) continue;
            parent[n] = c;
            if (n == to) {
                std::vector<Cell> path{to};
                for (Cell x = to; x != from; x = parent[x]) path.push_back(parent[x]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(n);
        }
    }
    throw std::runtime_error("no routing path between cells in module '" + r.module + "'");
}

// Cell distance of a forward/backward pass from a source cell to a target
// cell, travelling via the bus strip on 1D-global layouts.
int passing_distance(const ArchitectureLayout& layout, Cell src, Cell dst) {
    if (layout.global_kind == arch::GlobalKind::AllToAll) return 0;
    if (layout.global_kind == arch::GlobalKind::OneD && layout.bus.bandwidth > 0) {
        int bus_row = layout.bus.bandwidth - 1;  // nearest bus lane to regions
        return (src.row - bus_row) + std::abs(src.col - dst.col) + (dst.row - bus_row);
    }
    return std::abs(src.row - dst.row) + std::abs(src.col - dst.col);
}

struct CellState {
    std::string occupant;  // empty = null/filler qubit
    double t = 0.0;        // time the occupant becomes idle
    uint64_t step = 0;     // logical depth of the occupant's last step
};

class Scheduler {
public:
    Scheduler(const qasm::Program& p, const ArchitectureLayout& layout,
              const LogicalOpPerf& perf, const MapperOptions& opts)
        : prog_(p), layout_(layout), perf_(perf), opts_(opts) {}

    MappingResult run() {
        for (const auto& r : layout_.regions)
            for (Cell c : region_cells(r)) cells_[c];

        const auto& entry = prog_.entry_module();
        const auto& entry_region = layout_.region_of(entry.name);
        std::map<std::string, std::string> binding;
        for (size_t i = 0; i < entry.locals.size(); ++i) {
            Cell c = entry_region.to_global(entry_region.local_cell(i));
            place(entry.locals[i], c);
            binding[entry.locals[i]] = entry.locals[i];
        }
        exec(entry, binding);

        for (const auto& [name, id] : binding)
            result_.t_one = std::max(result_.t_one, cells_.at(where_.at(id)).t);
        for (const auto& [c, st] : cells_) result_.q = std::max(result_.q, st.step);
        for (const auto& [name, m] : prog_.modules) result_.k += m.qubit_count();
        result_.kq = result_.k * result_.q;
        return std::move(result_);
    }

private:
    void place(const std::string& id, Cell c) {
        cells_.at(c).occupant = id;
        where_[id] = c;
    }

    double op_time(GateKind k) const { return perf_.at(k).time; }

    void trace(double t, const std::string& what, std::initializer_list<Cell> at) {
        if (!opts_.emit_trace) return;
        std::ostringstream line;
        line << "t=" << t << " " << what;
        for (Cell c : at) line << " (" << c.row << "," << c.col << ")";
        result_.trace.push_back(line.str());
    }

    void note_parallel(GateKind k, uint64_t step) {
        if (k == GateKind::T || k == GateKind::Tdg) {
            int n = ++t_per_step_[step];
            result_.max_parallel_t = std::max(result_.max_parallel_t, n);
        } else if (k == GateKind::S || k == GateKind::Sdg) {
            int n = ++s_per_step_[step];
            result_.max_parallel_s = std::max(result_.max_parallel_s, n);
        }
    }

    // Exchanges the occupants of two cells as one timed SWAP gate.
    void schedule_swap(Cell a, Cell b) {
        CellState& sa = cells_.at(a);
        CellState& sb = cells_.at(b);
        double start = std::max(sa.t, sb.t);
        double finish = start + op_time(GateKind::SWAP);
        trace(start, "SWAP", {a, b});
        uint64_t step = std::max(sa.step, sb.step) + 1;
        std::swap(sa.occupant, sb.occupant);
        sa.t = sb.t = finish;
        sa.step = sb.step = step;
        if (!sa.occupant.empty()) where_[sa.occupant] = a;
        if (!sb.occupant.empty()) where_[sb.occupant] = b;
        ++result_.tallies[GateKind::SWAP];
        ++result_.inserted_swaps;
    }

    void schedule_1q(GateKind k, const std::string& id) {
        Cell c = where_.at(id);
        CellState& st = cells_.at(c);
        double start = st.t;
        st.t = start + op_time(k);
        st.step += 1;
        trace(start, qasm::gate_name(k), {c});
        note_parallel(k, st.step);
        ++result_.tallies[k];
    }

    void schedule_2q(GateKind k, const std::string& a, const std::string& b,
                     const std::string& module) {
        if (layout_.global_kind != arch::GlobalKind::AllToAll) {
            const auto& region = layout_.region_of(module);
            auto path = bfs_path(layout_, region, where_.at(a), where_.at(b));
            // Move the first operand until adjacent to the second.
            while (path.size() > 2) {
                schedule_swap(path[0], path[1]);
                path.erase(path.begin());
            }
        }
        Cell ca = where_.at(a);
        Cell cb = where_.at(b);
        CellState& sa = cells_.at(ca);
        CellState& sb = cells_.at(cb);
        double start = std::max(sa.t, sb.t);
        if (opts_.serialize_braids) {
            start = std::max(start, braid_free_);
        }
        double finish = start + op_time(k);
        if (opts_.serialize_braids) braid_free_ = finish;
        trace(start, qasm::gate_name(k), {ca, cb});
        uint64_t step = std::max(sa.step, sb.step) + 1;
        sa.t = sb.t = finish;
        sa.step = sb.step = step;
        if (k == GateKind::SWAP) {
            // An explicit SWAP exchanges which cell holds which named state.
            std::swap(sa.occupant, sb.occupant);
            if (!sa.occupant.empty()) where_[sa.occupant] = ca;
            if (!sb.occupant.empty()) where_[sb.occupant] = cb;
        }
        ++result_.tallies[k];
    }

    int effective_bandwidth() const {
        return opts_.bus_lanes_override > 0 ? opts_.bus_lanes_override
                                            : layout_.bus.bandwidth;
    }

    // Moves argument qubits to destination cells in waves over the bus and
    // returns the time all of them have arrived.
    double pass(const std::vector<std::string>& ids, const std::vector<Cell>& dests,
                const char* label) {
        if (ids.empty()) return bus_free_;
        if (layout_.global_kind == arch::GlobalKind::AllToAll) {
            // Arbitrary interaction: rebinding is free, qubits stay put.
            double t = 0.0;
            for (const auto& id : ids) t = std::max(t, cells_.at(where_.at(id)).t);
            return t;
        }
        int bw = effective_bandwidth();
        if (bw < 1)
            throw std::runtime_error("qubit passing requires a bus but bandwidth is 0");
        double swap_t = op_time(GateKind::SWAP);
        double arrival = 0.0;
        for (size_t w = 0; w * bw < ids.size(); ++w) {
            size_t lo = w * bw;
            size_t hi = std::min(ids.size(), lo + bw);
            double start = bus_free_;
            int max_dist = 0;
            for (size_t i = lo; i < hi; ++i) {
                start = std::max(start, cells_.at(where_.at(ids[i])).t);
                max_dist = std::max(max_dist,
                                    passing_distance(layout_, where_.at(ids[i]), dests[i]));
            }
            double wave_time = opts_.passing == PassingStyle::SwapChain
                                   ? max_dist * swap_t
                                   : 3 * move_leg_time();  // exit, bus, entry
            double finish = start + wave_time;
            trace(start, label, {});
            for (size_t i = lo; i < hi; ++i) {
                int dist = passing_distance(layout_, where_.at(ids[i]), dests[i]);
                Cell src = where_.at(ids[i]);
                Cell dst = dests[i];
                CellState& from = cells_.at(src);
                CellState& to = cells_.at(dst);
                // The destination's occupant is displaced to the vacated cell.
                std::string displaced = to.occupant;
                from.occupant = displaced;
                if (!displaced.empty()) where_[displaced] = src;
                uint64_t step = from.step;
                to.occupant = ids[i];
                to.t = finish;
                to.step = step + (opts_.passing == PassingStyle::SwapChain
                                      ? static_cast<uint64_t>(dist)
                                      : 3);
                where_[ids[i]] = dst;
                if (opts_.passing == PassingStyle::SwapChain) {
                    result_.tallies[GateKind::SWAP] += static_cast<uint64_t>(dist);
                    result_.inserted_swaps += static_cast<uint64_t>(dist);
                }
            }
            bus_free_ = finish;
            arrival = std::max(arrival, finish);
        }
        return arrival;
    }

    double move_leg_time() const {
        // One multi-cell movement leg costs a full QEC cycle.
        return perf_.qec_cycle_time > 0 ? perf_.qec_cycle_time
                                        : op_time(GateKind::SWAP);
    }

    void exec(const qasm::ModuleDef& m, const std::map<std::string, std::string>& binding) {
        uint64_t swaps_before = result_.inserted_swaps;
        uint64_t gates_before = result_.total_tally();
        double t_enter = 0.0;
        for (const auto& [name, id] : binding)
            t_enter = std::max(t_enter, cells_.at(where_.at(id)).t);

        for (const auto& ins : m.body) {
            if (const auto* g = std::get_if<qasm::Gate>(&ins)) {
                if (qasm::gate_arity(g->kind) == 1)
                    schedule_1q(g->kind, binding.at(g->operands[0]));
                else
                    schedule_2q(g->kind, binding.at(g->operands[0]),
                                binding.at(g->operands[1]), m.name);
            } else {
                exec_call(std::get<qasm::Call>(ins), binding);
            }
        }

        double t_exit = 0.0;
        for (const auto& [name, id] : binding)
            t_exit = std::max(t_exit, cells_.at(where_.at(id)).t);
        auto [it, fresh] = result_.per_module.try_emplace(m.name);
        ModuleRecord& rec = it->second;
        ++rec.calls;
        if (fresh || rec.calls == 1) {
            rec.duration = t_exit - t_enter;
            rec.gate_count = result_.total_tally() - gates_before;
            rec.inserted_swaps = result_.inserted_swaps - swaps_before;
        }
    }

    void exec_call(const qasm::Call& call, const std::map<std::string, std::string>& binding) {
        const auto& callee = prog_.modules.at(call.module);
        const auto& region = layout_.region_of(call.module);

        std::vector<std::string> ids;
        std::vector<Cell> homes;
        std::vector<Cell> params;
        for (size_t i = 0; i < call.args.size(); ++i) {
            ids.push_back(binding.at(call.args[i]));
            homes.push_back(where_.at(ids.back()));
            params.push_back(region.to_global(region.param_cell(i)));
        }

        pass(ids, params, "FP");  // forward qubit passing

        std::map<std::string, std::string> callee_binding;
        for (size_t i = 0; i < call.args.size(); ++i)
            callee_binding[callee.params[i]] = ids[i];
        for (size_t i = 0; i < callee.locals.size(); ++i) {
            std::string id = call.module + "#" + std::to_string(instance_counter_++) +
                             "/" + callee.locals[i];
            Cell c = region.to_global(region.local_cell(i));
            place(id, c);
            callee_binding[callee.locals[i]] = id;
        }

        exec(callee, callee_binding);

        pass(ids, homes, "BP");  // backward qubit passing
    }

    const qasm::Program& prog_;
    const ArchitectureLayout& layout_;
    const LogicalOpPerf& perf_;
    MapperOptions opts_;
    std::map<Cell, CellState> cells_;
    std::map<std::string, Cell> where_;
    std::map<uint64_t, int> t_per_step_;
    std::map<uint64_t, int> s_per_step_;
    double bus_free_ = 0.0;
    double braid_free_ = 0.0;
    uint64_t instance_counter_ = 0;
    MappingResult result_;
};

}  // namespace

MappingResult map_program(const qasm::Program& p, const ArchitectureLayout& layout,
                          const LogicalOpPerf& perf, const MapperOptions& options) {
    return Scheduler(p, layout, perf, options).run();
}

std::vector<std::pair<Cell, Cell>> route_cnot(const ArchitectureLayout& layout,
                                              const std::string& module,
                                              Cell from, Cell to) {
    const auto& region = layout.region_of(module);
    auto path = bfs_path(layout, region, from, to);
    std::vector<std::pair<Cell, Cell>> plan;
    for (size_t i = 0; i + 2 < path.size(); ++i) plan.emplace_back(path[i], path[i + 1]);
    return plan;
}

int region_distance(const ArchitectureLayout& layout, const std::string& module,
                    Cell from, Cell to) {
    const auto& region = layout.region_of(module);
    return static_cast<int>(bfs_path(layout, region, from, to).size()) - 1;
}

PassingCost pass_qubits(const std::vector<int>& distances, int bandwidth,
                        PassingStyle style, double swap_time, double move_leg_time) {
    PassingCost cost;
    if (distances.empty()) return cost;
    if (bandwidth < 1)
        throw std::invalid_argument("qubit passing requires bus bandwidth >= 1");
    for (size_t lo = 0; lo < distances.size(); lo += static_cast<size_t>(bandwidth)) {
        size_t hi = std::min(distances.size(), lo + static_cast<size_t>(bandwidth));
        int max_dist = 0;
        for (size_t i = lo; i < hi; ++i) {
            max_dist = std::max(max_dist, distances[i]);
            cost.swaps += style == PassingStyle::SwapChain
                              ? static_cast<uint64_t>(distances[i])
                              : 0;
        }
        cost.time += style == PassingStyle::SwapChain ? max_dist * swap_time
                                                      : 3 * move_leg_time;
        ++cost.waves;
    }
    return cost;
}

}  // namespace qre::mapper
