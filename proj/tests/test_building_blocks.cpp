#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qre/building_blocks.hpp"

using namespace qre::blocks;
using qre::qasm::GateKind;

TEST_CASE("effective error at one level of concatenation") {
    SteaneCostModel model;
    double p = 1e-9;
    // CNOT: c = 1e4, so (c p^2)^2 / c = 1e-32.
    CHECK(steane_effective_error(p, GateKind::CNOT, 1, model) ==
          doctest::Approx(1e-32).epsilon(1e-10));
    CHECK(steane_effective_error(p, GateKind::CNOT, 0, model) == p);
    CHECK(steane_effective_error_log10(p, GateKind::CNOT, 1, model) ==
          doctest::Approx(-32.0));
    CHECK_THROWS_AS(
        static_cast<void>(steane_effective_error(p, GateKind::CNOT, -1, model)),
        std::invalid_argument);
}

TEST_CASE("effective error decreases with level below pseudo-threshold") {
    SteaneCostModel model;
    double p = 1e-6;
    double prev = p;
    for (int l = 1; l <= 4; ++l) {
        double log_e = steane_effective_error_log10(p, GateKind::T, l, model);
        CHECK(log_e < std::log10(prev));
        prev = std::pow(10.0, log_e);
    }
}

TEST_CASE("concatenation diverges above the pseudo-threshold") {
    SteaneCostModel model;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(steane_effective_error(0.1, GateKind::CNOT, 1, model)),
        doctest::Contains("pseudo-threshold"), std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(required_concatenation_level(100.0, 0.1, model)),
                    std::runtime_error);
}

TEST_CASE("required level is minimal and monotone in KQ") {
    SteaneCostModel model;
    double p = 1e-9;
    // Worst op is T with c = 2e4; level 1 gives 2e-32.
    CHECK(required_concatenation_level(1e10, p, model) == 1);
    int prev = 1;
    for (double kq : {1e2, 1e6, 1e10, 1e20, 1e31, 1e35}) {
        int l = required_concatenation_level(kq, p, model);
        CHECK(l >= prev);
        // Minimality: level l reaches 1/KQ, level l-1 does not.
        CHECK(steane_effective_error_log10(p, GateKind::T, l, model) <= -std::log10(kq));
        if (l > 1)
            CHECK(steane_effective_error_log10(p, GateKind::T, l - 1, model) >
                  -std::log10(kq));
        prev = l;
    }
    CHECK_THROWS_AS(static_cast<void>(required_concatenation_level(0.5, p, model)),
                    std::invalid_argument);
}

TEST_CASE("level cap is reported when concatenation cannot reach the target") {
    SteaneCostModel model;
    // c p^2 = 0.5 shrinks too slowly for KQ = 1e30 within six levels.
    CHECK_THROWS_WITH_AS(
        static_cast<void>(required_concatenation_level(1e30, 5e-3, model)),
        doctest::Contains("exceeds cap"), std::runtime_error);
}

TEST_CASE("level-1 logical op times follow depth plus QEC") {
    DeviceProfile device;  // 1e-6 s, 1e-9
    SteaneCostModel model;
    auto perf = steane_logical_perf(device, 1, model);
    CHECK(perf.level == 1);
    CHECK(perf.at(GateKind::CNOT).time == doctest::Approx(21e-6));
    CHECK(perf.at(GateKind::T).time == doctest::Approx(28e-6));
    CHECK(perf.at(GateKind::PrepZ).time == doctest::Approx(24e-6));
    CHECK(perf.at(GateKind::CNOT).fidelity == doctest::Approx(1.0));
    // Level 2 base steps are 21x longer.
    auto perf2 = steane_logical_perf(device, 2, model);
    CHECK(perf2.at(GateKind::CNOT).time == doctest::Approx(21.0 * 21e-6));
}

TEST_CASE("logical op time grows monotonically with level") {
    DeviceProfile device;
    SteaneCostModel model;
    for (GateKind k : {GateKind::H, GateKind::CNOT, GateKind::T}) {
        double prev = 0.0;
        for (int l = 1; l <= 4; ++l) {
            double t = steane_logical_perf(device, l, model).at(k).time;
            CHECK(t > prev);
            prev = t;
        }
    }
}

TEST_CASE("level 0 is the bare physical table") {
    DeviceProfile device;
    SteaneCostModel model;
    auto p0 = steane_logical_perf(device, 0, model);
    auto phys = physical_perf(device);
    CHECK(p0.level == 0);
    for (GateKind k : {GateKind::H, GateKind::CNOT, GateKind::Rz, GateKind::SWAP}) {
        CHECK(p0.at(k).time == device.op_time);
        CHECK(p0.at(k).fidelity == doctest::Approx(1.0 - device.error_rate));
        CHECK(phys.at(k).time == p0.at(k).time);
    }
    DeviceProfile bad;
    bad.error_rate = 0.0;
    CHECK_THROWS_AS(static_cast<void>(physical_perf(bad)), std::invalid_argument);
}

TEST_CASE("surface distance is the minimal odd d meeting the target") {
    SurfaceCostModel model;
    for (double eps_p : {1e-3, 1e-4, 3e-3, 5e-4}) {
        for (double eps_l : {1e-6, 1e-9, 1e-12, 1e-15, 1e-20}) {
            CAPTURE(eps_p);
            CAPTURE(eps_l);
            int d = surface_code_distance(eps_l, eps_p, model);
            CHECK(d >= 3);
            CHECK(d % 2 == 1);
            CHECK(surface_logical_error(d, eps_p, model) <= eps_l);
            if (d > 3) CHECK(surface_logical_error(d - 2, eps_p, model) > eps_l);
            // Raw formula inverts the suppression law exactly.
            double raw = surface_code_distance_raw(eps_l, eps_p, model);
            CHECK(model.c1 * std::pow(model.c2 * eps_p / model.eps_threshold,
                                      (raw + 1) / 2.0) ==
                  doctest::Approx(eps_l).epsilon(1e-9));
        }
    }
}

TEST_CASE("surface distance shrinks as the physical error improves") {
    SurfaceCostModel model;
    int prev = model.max_distance;
    for (double eps_p : {5e-3, 1e-3, 1e-4, 1e-5, 1e-6}) {
        int d = surface_code_distance(1e-12, eps_p, model);
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("surface distance rejects out-of-range inputs") {
    SurfaceCostModel model;
    CHECK_THROWS_WITH_AS(static_cast<void>(surface_code_distance(1e-12, 9e-3, model)),
                         doctest::Contains("threshold"), std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(surface_code_distance(0.0, 1e-3, model)),
                    std::invalid_argument);
    CHECK_THROWS_WITH_AS(static_cast<void>(surface_code_distance(1e-30, 8e-3, model)),
                         doctest::Contains("exceeds cap"), std::runtime_error);
}

TEST_CASE("surface op times are cycle multiples") {
    DeviceProfile device;
    device.error_rate = 1e-3;
    SurfaceCostModel model;
    auto perf = surface_logical_perf(3, device, model);
    double cycle = 3 * 8 * 1e-6;
    CHECK(perf.distance == 3);
    CHECK(perf.qec_cycle_time == doctest::Approx(cycle));
    CHECK(perf.at(GateKind::CNOT).time == doctest::Approx(3 * cycle));
    CHECK(perf.at(GateKind::H).time == doctest::Approx(3 * cycle));
    CHECK(perf.at(GateKind::S).time == doctest::Approx(cycle));
    CHECK(perf.at(GateKind::T).time == doctest::Approx(4.5 * cycle));
    CHECK(perf.at(GateKind::SWAP).time == doctest::Approx(9 * cycle));
    CHECK(perf.at(GateKind::PrepZ).time == doctest::Approx(cycle));
    // Pauli frame updates are free.
    CHECK(perf.at(GateKind::X).time == 0.0);
    CHECK(perf.at(GateKind::X).fidelity == 1.0);
    double fid = 1.0 - surface_logical_error(3, 1e-3, model);
    CHECK(perf.at(GateKind::CNOT).fidelity == doctest::Approx(fid));
    CHECK_THROWS_AS(static_cast<void>(surface_logical_perf(4, device, model)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(surface_logical_perf(1, device, model)),
                    std::invalid_argument);
}

TEST_CASE("two distillation rounds take 1e-3 injection to 1e-12") {
    SurfaceCostModel model;
    CHECK(msd_rounds(1e-3, 1e-12, MagicState::A, model) == 2);
    CHECK(msd_rounds(1e-3, 1e-12, MagicState::Y, model) == 2);
    CHECK(msd_rounds(1e-3, 1e-2, MagicState::A, model) == 0);
    // Oracle: iterate the suppression law directly.
    for (double p : {1e-2, 1e-3, 1e-4, 1e-5}) {
        for (double target : {1e-6, 1e-10, 1e-12}) {
            int r = msd_rounds(p, target, MagicState::A, model);
            double eps = p;
            for (int k = 0; k < r; ++k) eps = 35.0 * eps * eps * eps;
            CAPTURE(p);
            CAPTURE(target);
            CHECK(eps <= target);
            if (r > 0) {
                eps = p;
                for (int k = 0; k + 1 < r; ++k) eps = 35.0 * eps * eps * eps;
                CHECK(eps > target);
            }
        }
    }
}

TEST_CASE("distillation limits are enforced") {
    SurfaceCostModel model;
    CHECK_THROWS_WITH_AS(static_cast<void>(msd_rounds(0.2, 1e-12, MagicState::A, model)),
                         doctest::Contains("distillation threshold"), std::runtime_error);
    CHECK_THROWS_WITH_AS(static_cast<void>(msd_rounds(0.15, 1e-15, MagicState::A, model)),
                         doctest::Contains("rounds"), std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(msd_rounds(0.0, 1e-12, MagicState::A, model)),
                    std::invalid_argument);
}

TEST_CASE("factory capacity covers the MSD-to-T time ratio") {
    SurfaceCostModel model;
    CHECK(factory_capacity(1, model) == 20);
    CHECK(factory_capacity(0, model) == 0);
    CHECK(factory_capacity(3, model) == 60);
    CHECK_THROWS_AS(static_cast<void>(factory_capacity(-1, model)), std::invalid_argument);
}

TEST_CASE("factory qubit counts match the recursion oracle") {
    SurfaceCostModel model;
    for (int rounds : {1, 2, 3}) {
        for (uint64_t q_l : {uint64_t{21}, uint64_t{253}}) {
            for (int t = 0; t <= 4; ++t)
                for (int s = 0; s <= 4; ++s) {
                    auto f = factory_qubits(t, s, q_l, rounds, model);
                    // 128-bit oracle guards against silent overflow.
                    unsigned __int128 a = factory_capacity(t, model);
                    for (int k = 1; k < rounds; ++k) a *= 15 * q_l;
                    a *= 16 * q_l;
                    unsigned __int128 y = static_cast<unsigned>(std::max(t, s));
                    for (int k = 1; k < rounds; ++k) y *= 7 * q_l;
                    y *= 8 * q_l;
                    CAPTURE(rounds);
                    CAPTURE(q_l);
                    CHECK(static_cast<unsigned __int128>(f.a_qubits) == a);
                    CHECK(static_cast<unsigned __int128>(f.y_qubits) == y);
                }
        }
    }
    CHECK_THROWS_AS(static_cast<void>(factory_qubits(1, 1, 21, 0, SurfaceCostModel{})),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(factory_qubits(1, 1, 0, 1, SurfaceCostModel{})),
                    std::invalid_argument);
}
