#include "qre/lowering.hpp"

#include <cmath>
#include <complex>
#include <array>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace qre::lowering {

namespace {

constexpr double kPi = std::numbers::pi;

// splitmix64: tiny, platform-stable generator for the statistical model.
struct SplitMix64 {
    uint64_t state;
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Unbiased-enough for a cost model; range is tiny vs 2^64.
    uint64_t below(uint64_t n) { return next() % n; }
};

using Mat2 = std::array<std::complex<double>, 4>;  // row-major 2x2

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 gate_matrix(GateKind k) {
    using namespace std::complex_literals;
    const double r = 1.0 / std::sqrt(2.0);
    switch (k) {
        case GateKind::H: return {r, r, r, -r};
        case GateKind::S: return {1.0, 0.0, 0.0, 1.0i};
        case GateKind::Sdg: return {1.0, 0.0, 0.0, -1.0i};
        case GateKind::T: return {1.0, 0.0, 0.0, std::polar(1.0, kPi / 4)};
        case GateKind::Tdg: return {1.0, 0.0, 0.0, std::polar(1.0, -kPi / 4)};
        case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
        default: throw std::invalid_argument("no matrix for gate");
    }
}

Mat2 rz_matrix(double theta) {
    return {std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)};
}

// Operator-norm distance between U and V, minimized over global phase.
double phase_distance(const Mat2& u, const Mat2& v) {
    std::complex<double> tr = std::conj(v[0]) * u[0] + std::conj(v[1]) * u[1] +
                              std::conj(v[2]) * u[2] + std::conj(v[3]) * u[3];
    std::complex<double> phase =
        std::abs(tr) > 1e-15 ? tr / std::abs(tr) : std::complex<double>(1.0, 0.0);
    Mat2 d;
    for (int i = 0; i < 4; ++i) d[i] = u[i] - phase * v[i];
    // Largest singular value of d via eigenvalues of d^dagger d.
    double a = std::norm(d[0]) + std::norm(d[2]);
    double b = std::norm(d[1]) + std::norm(d[3]);
    std::complex<double> c = std::conj(d[0]) * d[1] + std::conj(d[2]) * d[3];
    double mean = (a + b) / 2;
    double disc = std::sqrt((a - b) * (a - b) / 4 + std::norm(c));
    return std::sqrt(std::max(0.0, mean + disc));
}

// Canonical fingerprint of a matrix up to global phase, for BFS dedup.
uint64_t fingerprint(const Mat2& m) {
    // Rotate so the entry of largest magnitude is real positive.
    int pivot = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(m[i]) > std::abs(m[pivot])) pivot = i;
    std::complex<double> phase = m[pivot] / std::abs(m[pivot]);
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double x) {
        int64_t q = static_cast<int64_t>(std::llround(x * 1e7));
        h ^= static_cast<uint64_t>(q);
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 4; ++i) {
        std::complex<double> e = m[i] / phase;
        mix(e.real());
        mix(e.imag());
    }
    return h;
}

GateSequence exhaustive_search(double theta, double eps, int max_length) {
    const Mat2 target = rz_matrix(theta);
    const Mat2 identity = {1.0, 0.0, 0.0, 1.0};
    if (phase_distance(identity, target) <= eps) return {};

    constexpr GateKind alphabet[] = {GateKind::H, GateKind::T, GateKind::Tdg,
                                     GateKind::S, GateKind::Sdg};
    struct Node {
        Mat2 u;
        GateSequence word;
    };
    std::deque<Node> frontier{{identity, {}}};
    std::unordered_set<uint64_t> seen{fingerprint(identity)};
    constexpr size_t kNodeCap = 2'000'000;

    while (!frontier.empty()) {
        Node node = std::move(frontier.front());
        frontier.pop_front();
        if (static_cast<int>(node.word.size()) >= max_length) continue;
        for (GateKind g : alphabet) {
            Mat2 u = mul(gate_matrix(g), node.u);
            GateSequence word = node.word;
            word.push_back(g);
            if (phase_distance(u, target) <= eps) return word;
            uint64_t fp = fingerprint(u);
            if (seen.size() < kNodeCap && seen.insert(fp).second)
                frontier.push_back({u, std::move(word)});
        }
    }
    throw std::runtime_error("exhaustive Rz synthesis found no word within length " +
                             std::to_string(max_length));
}

GateSequence statistical_sequence(int64_t quantized, const StatisticalSynth& synth) {
    if (synth.mean_length < 1) throw std::invalid_argument("mean length must be >= 1");
    int lo = std::max(1, synth.mean_length - synth.spread);
    int hi = synth.mean_length + synth.spread;
    SplitMix64 rng{synth.seed ^ (0x6a09e667f3bcc909ULL + static_cast<uint64_t>(quantized))};
    int length = lo + static_cast<int>(rng.below(static_cast<uint64_t>(hi - lo + 1)));
    constexpr GateKind pool[] = {GateKind::H, GateKind::S, GateKind::T};
    GateSequence seq;
    seq.reserve(static_cast<size_t>(length));
    for (int i = 0; i < length; ++i)
        seq.push_back(pool[rng.below(3)]);
    return seq;
}

}  // namespace

void DecomposeSpec::check() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("decomposition precision must be in (0,1)");
    if (const auto* s = std::get_if<StatisticalSynth>(&synthesizer)) {
        if (s->mean_length < 1) throw std::invalid_argument("mean length must be >= 1");
        if (s->spread < 0) throw std::invalid_argument("spread must be >= 0");
    } else {
        const auto& e = std::get<ExhaustiveSynth>(synthesizer);
        if (e.max_length < 1 || e.max_length > 24)
            throw std::invalid_argument("exhaustive max length must be in [1,24]");
    }
}

double reduce_angle(double theta) {
    double t = std::remainder(theta, 2 * kPi);  // in [-pi, pi]
    if (t <= -kPi) t = kPi;                     // map -pi to +pi
    return t;
}

GateSequence decompose_rz(double theta, const DecomposeSpec& spec) {
    spec.check();
    if (!std::isfinite(theta)) throw std::invalid_argument("Rz angle must be finite");
    double t = reduce_angle(theta);
    if (std::abs(t) < spec.epsilon) return {};  // identity at this precision
    if (const auto* s = std::get_if<StatisticalSynth>(&spec.synthesizer)) {
        // Angles equal after quantization at epsilon share one sequence.
        int64_t quantized = static_cast<int64_t>(std::llround(t / spec.epsilon));
        return statistical_sequence(quantized, *s);
    }
    const auto& e = std::get<ExhaustiveSynth>(spec.synthesizer);
    auto word = exhaustive_search(t, spec.epsilon, e.max_length);
    if (word.empty())
        // Above threshold the contract promises a non-empty word.
        throw std::runtime_error("synthesis returned empty word above threshold");
    return word;
}

GateSet ft_gate_set() {
    return {GateKind::X,    GateKind::Z,   GateKind::H,    GateKind::S,
            GateKind::Sdg,  GateKind::T,   GateKind::Tdg,  GateKind::CNOT,
            GateKind::PrepZ, GateKind::MeasZ};
}

qasm::Program lower_gateset(const qasm::Program& p, const GateSet& target,
                            const DecomposeSpec& spec) {
    spec.check();
    qasm::Program out;
    out.entry = p.entry;
    out.structured = p.structured;
    for (const auto& [name, m] : p.modules) {
        qasm::ModuleDef lowered;
        lowered.name = m.name;
        lowered.params = m.params;
        lowered.locals = m.locals;
        for (const auto& ins : m.body) {
            const auto* g = std::get_if<qasm::Gate>(&ins);
            if (!g || target.count(g->kind)) {
                lowered.body.push_back(ins);
                continue;
            }
            if (g->kind == GateKind::Rz) {
                for (GateKind k : decompose_rz(g->angle, spec))
                    lowered.body.push_back(qasm::Gate{k, 0.0, g->operands});
                continue;
            }
            if (g->kind == GateKind::SWAP && target.count(GateKind::CNOT)) {
                const auto& a = g->operands[0];
                const auto& b = g->operands[1];
                lowered.body.push_back(qasm::Gate{GateKind::CNOT, 0.0, {a, b}});
                lowered.body.push_back(qasm::Gate{GateKind::CNOT, 0.0, {b, a}});
                lowered.body.push_back(qasm::Gate{GateKind::CNOT, 0.0, {a, b}});
                continue;
            }
            throw std::runtime_error(std::string("gate ") + qasm::gate_name(g->kind) +
                                     " not lowerable to target set");
        }
        out.modules.emplace(name, std::move(lowered));
    }
    return out;
}

ControlledRnCost expand_controlled_rn(ControlledRnVariant variant) {
    switch (variant) {
        case ControlledRnVariant::Standard35: return {35, 0};
        case ControlledRnVariant::Ancilla21: return {21, 1};
    }
    throw std::invalid_argument("unknown controlled-Rn variant");
}

}  // namespace qre::lowering
