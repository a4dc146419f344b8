#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qre/estimator.hpp"
#include "test_util.hpp"

using namespace qre;

namespace {

bool report_line(int idx, const char* name, bool ok) {
    std::printf("criterion %02d %-34s %s\n", idx, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    return ok;
}

blocks::LogicalOpPerf unit_perf() {
    blocks::DeviceProfile device;
    device.op_time = 1.0;
    return blocks::physical_perf(device);
}

// Brute-force BFS distance on a w x h grid with 4-neighborhood.
int grid_bfs(int w, int h, int from, int to) {
    std::vector<int> dist(static_cast<size_t>(w) * h, -1);
    std::deque<int> queue{from};
    dist[static_cast<size_t>(from)] = 0;
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        if (c == to) return dist[static_cast<size_t>(c)];
        int r = c / w, col = c % w;
        const int nbrs[][2] = {{r - 1, col}, {r + 1, col}, {r, col - 1}, {r, col + 1}};
        for (auto [nr, nc] : nbrs) {
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            int n = nr * w + nc;
            if (dist[static_cast<size_t>(n)] != -1) continue;
            dist[static_cast<size_t>(n)] = dist[static_cast<size_t>(c)] + 1;
            queue.push_back(n);
        }
    }
    return -1;
}

std::string pair_cnot_text(int n, int a, int b) {
    std::string text = "module main() {\n";
    for (int i = 0; i < n; ++i) text += "  qubit q" + std::to_string(i) + "\n";
    text += "  CNOT q" + std::to_string(a) + ",q" + std::to_string(b) + "\n}\n";
    return text;
}

using Mat = std::array<std::complex<double>, 4>;

Mat unitary_of(qasm::GateKind k) {
    using namespace std::complex_literals;
    const double r = 1.0 / std::sqrt(2.0);
    const double pi = std::numbers::pi;
    switch (k) {
        case qasm::GateKind::H: return {r, r, r, -r};
        case qasm::GateKind::S: return {1.0, 0.0, 0.0, 1.0i};
        case qasm::GateKind::Sdg: return {1.0, 0.0, 0.0, -1.0i};
        case qasm::GateKind::T: return {1.0, 0.0, 0.0, std::polar(1.0, pi / 4)};
        case qasm::GateKind::Tdg: return {1.0, 0.0, 0.0, std::polar(1.0, -pi / 4)};
        default: return {1.0, 0.0, 0.0, 1.0};
    }
}

double word_error(const lowering::GateSequence& word, double theta) {
    Mat u = {1.0, 0.0, 0.0, 1.0};
    for (qasm::GateKind k : word) {
        Mat g = unitary_of(k);
        u = {g[0] * u[0] + g[1] * u[2], g[0] * u[1] + g[1] * u[3],
             g[2] * u[0] + g[3] * u[2], g[2] * u[1] + g[3] * u[3]};
    }
    Mat v = {std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)};
    std::complex<double> tr = std::conj(v[0]) * u[0] + std::conj(v[3]) * u[3];
    return std::sqrt(std::max(0.0, 4.0 - 2.0 * std::abs(tr)));
}

// 50-gate single-module toy circuit on two qubits.
std::string toy_text() {
    std::string text = "module main() {\n  qubit a\n  qubit b\n";
    const char* cycle[] = {"H a", "T b", "CNOT a,b", "S a", "T a"};
    for (int i = 0; i < 50; ++i)
        text += std::string("  ") + cycle[i % 5] + "\n";
    text += "}\n";
    return text;
}

// Nested calls multiply 50 T gates up to 400000 without a long source file.
std::string deep_t_text() {
    std::string text = "module Burst(a) {\n";
    for (int i = 0; i < 50; ++i) text += "  T a\n";
    text += "}\n";
    auto layer = [&](const char* name, const char* callee) {
        text += std::string("module ") + name + "(a) {\n";
        for (int i = 0; i < 20; ++i) text += std::string("  call ") + callee + "(a)\n";
        text += "}\n";
    };
    layer("Mid", "Burst");
    layer("Top", "Mid");
    text += "module main() {\n  qubit q\n";
    for (int i = 0; i < 20; ++i) text += "  call Top(q)\n";
    text += "}\n";
    return text;
}

}  // namespace

TEST_CASE("criterion 1: CAT closed-form timing") {
    auto p = qasm::parse_program(testutil::cat_timing_text());
    auto layout = arch::build_layout(p, arch::GlobalKind::OneD, arch::LocalKind::OneD);
    auto res = mapper::map_program(p, layout, unit_perf());
    // Both passes move each qubit 7 cells: region exit, bus, region entry.
    double d_f = 7.0, d_b = 7.0;
    double expected = 1.0 + d_f + d_b + 1.0 + 4.0;
    bool ok = res.t_one == expected && layout.regions.size() == 2;
    CHECK(res.t_one == expected);
    CHECK(report_line(1, "cat-closed-form-timing", ok));
}

TEST_CASE("criterion 2: surface footprint") {
    auto f3 = arch::surface_footprint(3);
    bool ok = f3.physical_qubits == 253 && f3.data_qubits == 126 &&
              f3.syndrome_qubits == 125;
    CHECK(f3.physical_qubits == 253);
    CHECK(f3.data_qubits == 126);
    CHECK(f3.syndrome_qubits == 125);
    for (int d : {3, 5, 7, 9, 11}) {
        uint64_t s = static_cast<uint64_t>((d + 3) / 4);
        uint64_t a = 2 * static_cast<uint64_t>(d) - 2 + s;
        uint64_t b = 4 * static_cast<uint64_t>(d) - 4 + 3 * s;
        uint64_t oracle = (2 * a + 1) * (2 * b + 1);
        auto f = arch::surface_footprint(d);
        CAPTURE(d);
        CHECK(f.physical_qubits == oracle);
        ok = ok && f.physical_qubits == oracle && f.half_a == a && f.half_b == b;
    }
    CHECK(report_line(2, "surface-footprint", ok));
}

TEST_CASE("criterion 3: distance formula") {
    blocks::SurfaceCostModel model;
    bool ok = true;
    for (int i = 0; i < 10; ++i) {
        double eps_l = std::pow(10.0, -4.0 - 1.5 * i);
        int prev_d = model.max_distance;
        for (int j = 0; j < 10; ++j) {
            double eps_p = 5e-3 * std::pow(10.0, -0.3 * j);
            // Independent evaluation in log10 space.
            double oracle = 2.0 *
                                (std::log10(eps_l / model.c1)) /
                                std::log10(model.c2 * eps_p / model.eps_threshold) -
                            1.0;
            double raw = blocks::surface_code_distance_raw(eps_l, eps_p, model);
            CAPTURE(eps_l);
            CAPTURE(eps_p);
            CHECK(raw == doctest::Approx(oracle).epsilon(1e-9));
            ok = ok && std::abs(raw - oracle) <= 1e-9 * std::abs(oracle);
            int d = blocks::surface_code_distance(eps_l, eps_p, model);
            CHECK(d >= 3);
            CHECK(d % 2 == 1);
            CHECK(d <= prev_d);  // better devices never need more distance
            ok = ok && d >= 3 && d % 2 == 1 && d <= prev_d;
            prev_d = d;
        }
    }
    CHECK(report_line(3, "distance-formula", ok));
}

TEST_CASE("criterion 4: factory sizing") {
    blocks::SurfaceCostModel model;
    bool ok = blocks::factory_capacity(1, model) == 20;
    CHECK(blocks::factory_capacity(1, model) == 20);
    for (int r : {1, 2, 3})
        for (uint64_t q_l : {uint64_t{21}, uint64_t{253}})
            for (int t = 0; t <= 4; ++t)
                for (int s = 0; s <= 4; ++s) {
                    auto f = blocks::factory_qubits(t, s, q_l, r, model);
                    unsigned __int128 a = blocks::factory_capacity(t, model);
                    for (int k = 1; k < r; ++k) a *= 15 * q_l;
                    a *= 16 * q_l;
                    unsigned __int128 y = static_cast<unsigned>(std::max(t, s));
                    for (int k = 1; k < r; ++k) y *= 7 * q_l;
                    y *= 8 * q_l;
                    bool match = static_cast<unsigned __int128>(f.a_qubits) == a &&
                                 static_cast<unsigned __int128>(f.y_qubits) == y;
                    CAPTURE(r);
                    CAPTURE(q_l);
                    CHECK(match);
                    ok = ok && match;
                }
    CHECK(report_line(4, "factory-sizing", ok));
}

TEST_CASE("criterion 5: MSD rounds") {
    blocks::SurfaceCostModel model;
    int r = blocks::msd_rounds(1e-3, 1e-12, blocks::MagicState::A, model);
    CHECK(r == 2);
    CHECK(report_line(5, "msd-rounds", r == 2));
}

TEST_CASE("criterion 6: census/flatten equivalence") {
    bool ok = true;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        auto p = testutil::random_program(seed, 5, 50);
        bool same = qasm::gate_census(p) == qasm::gate_census(qasm::flatten(p));
        CAPTURE(seed);
        CHECK(same);
        ok = ok && same;
    }
    CHECK(report_line(6, "census-flatten-equivalence", ok));
}

TEST_CASE("criterion 7: routing oracle equivalence") {
    bool ok = true;
    for (int n = 2; n <= 6; ++n)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                auto p = qasm::parse_program(pair_cnot_text(n, a, b));
                auto layout =
                    arch::build_layout(p, arch::GlobalKind::OneD, arch::LocalKind::OneD);
                auto res = mapper::map_program(p, layout, unit_perf());
                uint64_t oracle = static_cast<uint64_t>(grid_bfs(n, 1, a, b) - 1);
                CAPTURE(n);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(res.inserted_swaps == oracle);
                ok = ok && res.inserted_swaps == oracle;
            }
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) {
            if (a == b) continue;
            auto p = qasm::parse_program(pair_cnot_text(9, a, b));
            auto layout =
                arch::build_layout(p, arch::GlobalKind::OneD, arch::LocalKind::TwoD);
            auto res = mapper::map_program(p, layout, unit_perf());
            uint64_t oracle = static_cast<uint64_t>(grid_bfs(3, 3, a, b) - 1);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(res.inserted_swaps == oracle);
            ok = ok && res.inserted_swaps == oracle;
        }
    for (int a = 0; a < 9; ++a) {
        int b = (a + 4) % 9;
        auto p = qasm::parse_program(pair_cnot_text(9, a, b));
        auto layout =
            arch::build_layout(p, arch::GlobalKind::AllToAll, arch::LocalKind::OneD);
        auto res = mapper::map_program(p, layout, unit_perf());
        CHECK(res.inserted_swaps == 0);
        CHECK(est::swap_ratio(res.tallies) == 0.0);
        ok = ok && res.inserted_swaps == 0 && est::swap_ratio(res.tallies) == 0.0;
    }
    CHECK(report_line(7, "routing-oracle-equivalence", ok));
}

TEST_CASE("criterion 8: Rz thresholding") {
    lowering::DecomposeSpec spec;  // statistical, eps = 1e-2
    // 100 angles, exactly 75 below the threshold.
    std::vector<double> angles;
    for (int i = 0; i < 75; ++i)
        angles.push_back((i % 2 ? -1 : 1) * 0.0099 * (i + 1) / 75.0);
    for (int i = 0; i < 25; ++i) angles.push_back(0.02 + 0.1 * i);
    int identities = 0;
    for (double theta : angles)
        if (lowering::decompose_rz(theta, spec).empty()) ++identities;
    bool ok = identities == 75;
    CHECK(identities == 75);

    lowering::DecomposeSpec exact;
    exact.epsilon = 1e-3;
    exact.synthesizer = lowering::ExhaustiveSynth{6};
    const double pi = std::numbers::pi;
    for (double theta : {pi / 4, pi / 2, pi}) {
        auto word = lowering::decompose_rz(theta, exact);
        double err = word_error(word, lowering::reduce_angle(theta));
        CAPTURE(theta);
        CHECK_FALSE(word.empty());
        CHECK(err <= 1e-3);
        ok = ok && !word.empty() && err <= 1e-3;
    }
    CHECK(report_line(8, "rz-thresholding", ok));
}

TEST_CASE("criterion 9: trade-off reproduction") {
    auto toy = qasm::parse_program(toy_text());
    est::EstimateConfig cfg;
    cfg.device.error_rate = 1e-3;
    cfg.global_layout = arch::GlobalKind::AllToAll;
    est::SweepSpec levels;
    levels.parameter = est::SweepParameter::SteaneLevel;
    levels.values = {1, 2, 3, 4};
    auto series = est::run_sweep_serial(toy, cfg, levels);
    bool ok = series.argmin_t_avg != -1;
    double prev_t = 0.0, prev_f = 0.0;
    for (const auto& pt : series.points) {
        REQUIRE(pt.ok);
        CHECK(pt.report.t_one > prev_t);
        CHECK(pt.report.f_alg >= prev_f);
        ok = ok && pt.ok && pt.report.t_one > prev_t && pt.report.f_alg >= prev_f;
        prev_t = pt.report.t_one;
        prev_f = pt.report.f_alg;
    }

    // Near the pseudo-threshold, 400000 T gates push F_alg(l=1) below 1e-6
    // and the average runtime into the runaway regime.
    auto deep = qasm::parse_program(deep_t_text());
    est::EstimateConfig hard;
    hard.code = est::CodeKind::Steane;
    hard.forced_level = 1;
    hard.device.error_rate = 7e-3;
    hard.global_layout = arch::GlobalKind::AllToAll;
    auto runaway = est::run_estimate(deep, hard);
    CHECK(runaway.f_alg < 1e-6);
    bool diverges = runaway.t_avg_saturated || runaway.t_avg > 1e6 * runaway.t_one;
    CHECK(diverges);
    ok = ok && runaway.f_alg < 1e-6 && diverges;

    // Distance sweep around the formula-selected point has a finite argmin.
    auto cat = qasm::parse_program(testutil::cat_text());
    est::EstimateConfig scfg;
    scfg.code = est::CodeKind::Surface;
    scfg.device.error_rate = 1e-3;
    int formula = est::run_estimate(cat, scfg).distance;
    est::SweepSpec distances;
    distances.parameter = est::SweepParameter::SurfaceDistance;
    for (int d = std::max(3, formula - 2); d <= formula + 4; d += 2)
        distances.values.push_back(d);
    auto dseries = est::run_sweep_serial(cat, scfg, distances);
    CHECK(dseries.argmin_t_avg != -1);
    REQUIRE(dseries.formula_selected.has_value());
    CHECK(*dseries.formula_selected == formula);
    ok = ok && dseries.argmin_t_avg != -1 && *dseries.formula_selected == formula;
    CHECK(report_line(9, "trade-off-reproduction", ok));
}

TEST_CASE("criterion 10: determinism") {
    auto p = qasm::parse_program(testutil::cat_text());
    est::EstimateConfig cfg;
    cfg.code = est::CodeKind::Steane;
    cfg.decompose.synthesizer = lowering::StatisticalSynth{45, 5, 11};
    auto first = est::report_to_json(est::run_estimate(p, cfg));
    auto second = est::report_to_json(est::run_estimate(p, cfg));
    bool ok = first == second && !first.empty();
    CHECK(first == second);
    cfg.code = est::CodeKind::Surface;
    cfg.device.error_rate = 1e-3;
    auto s1 = est::report_to_json(est::run_estimate(p, cfg));
    auto s2 = est::report_to_json(est::run_estimate(p, cfg));
    CHECK(s1 == s2);
    ok = ok && s1 == s2;
    CHECK(report_line(10, "determinism", ok));
}
