#include <random>
#include <stdexcept>

#include "limtdd/circuit.hpp"

namespace limtdd {

namespace {

Circuit blank(int n, std::string name) {
    if (n < 1) throw std::invalid_argument("generator needs at least one qubit");
    Circuit c;
    c.n_qubits = n;
    c.name = std::move(name);
    return c;
}

// QFT over `qs`, most significant qubit first. The closing swaps are
// written as three CX each.
void append_qft(Circuit& c, const std::vector<int>& qs, bool swaps) {
    const int n = int(qs.size());
    for (int a = 0; a < n; ++a) {
        c.add(GateKind::H, {qs[a]});
        for (int b = a + 1; b < n; ++b) c.add(GateKind::CP, {qs[b], qs[a]}, Angle{1, std::int64_t{1} << (b - a)});
    }
    for (int a = 0; swaps && a < n / 2; ++a) {
        const int u = qs[a], v = qs[n - 1 - a];
        c.add(GateKind::CX, {u, v});
        c.add(GateKind::CX, {v, u});
        c.add(GateKind::CX, {u, v});
    }
}

}  // namespace

Circuit gen_ghz(int n) {
    Circuit c = blank(n, "ghz_" + std::to_string(n));
    c.add(GateKind::H, {n - 1});
    for (int q = n - 1; q > 0; --q) c.add(GateKind::CX, {q, q - 1});
    return c;
}

Circuit gen_qft(int n) {
    Circuit c = blank(n, "qft_" + std::to_string(n));
    std::vector<int> qs;
    for (int q = n - 1; q >= 0; --q) qs.push_back(q);
    append_qft(c, qs, true);
    return c;
}

Circuit gen_fig9(int n) {
    Circuit c = blank(2 * n, "fig9_" + std::to_string(n));
    for (int i = n - 1; i >= 0; --i) {
        c.add(GateKind::H, {i});
        c.add(GateKind::CX, {i, n + i});
    }
    // the upper register's lowest qubit is the transform's most significant
    std::vector<int> qs;
    for (int q = n; q < 2 * n; ++q) qs.push_back(q);
    append_qft(c, qs, false);
    return c;
}

Circuit gen_remark2(int n) {
    Circuit c = blank(n, "remark2_" + std::to_string(n));
    for (int q = n - 1; q >= 0; --q) c.add(GateKind::H, {q});
    // CP_M has phase 2 pi / M; M = 2^{k-1} gives angle pi / 2^{k-2}.
    for (int k = 2; k <= n; ++k) c.add(GateKind::CP, {k - 1, 0}, Angle{2, std::int64_t{1} << (k - 1)});
    return c;
}

Circuit gen_random_cliffordt(int n, int gates, double t_prob, std::uint64_t seed) {
    Circuit c = blank(n, "cliffordt_" + std::to_string(n) + "_" + std::to_string(seed));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    const GateKind clifford[] = {GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::H, GateKind::CX};
    const int kinds = n > 1 ? 6 : 5;
    std::uniform_int_distribution<int> pick(0, kinds - 1);
    for (int i = 0; i < gates; ++i) {
        if (coin(rng) < t_prob) {
            c.add(GateKind::T, {qubit(rng)});
            continue;
        }
        const GateKind k = clifford[pick(rng)];
        if (k == GateKind::CX) {
            const int a = qubit(rng);
            int b = qubit(rng);
            while (b == a) b = qubit(rng);
            c.add(k, {a, b});
        } else {
            c.add(k, {qubit(rng)});
        }
    }
    return c;
}

Circuit gen_random_from(int n, int gates, const std::vector<GateKind>& kinds, std::uint64_t seed, Angle cp_angle) {
    if (kinds.empty()) throw std::invalid_argument("empty gate set");
    Circuit c = blank(n, "random_" + std::to_string(n) + "_" + std::to_string(seed));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> qubit(0, n - 1);
    std::uniform_int_distribution<std::size_t> pick(0, kinds.size() - 1);
    for (int i = 0; i < gates; ++i) {
        const GateKind k = kinds[pick(rng)];
        if (gate_arity(k) == 2) {
            if (n < 2) continue;
            const int a = qubit(rng);
            int b = qubit(rng);
            while (b == a) b = qubit(rng);
            c.add(k, {a, b}, cp_angle);
        } else {
            c.add(k, {qubit(rng)});
        }
    }
    return c;
}

Circuit generate_named(std::string_view name, int n, std::uint64_t seed, int gates, double t_prob) {
    if (name == "ghz") return gen_ghz(n);
    if (name == "qft") return gen_qft(n);
    if (name == "fig9") return gen_fig9(n);
    if (name == "remark2") return gen_remark2(n);
    if (name == "cliffordt") return gen_random_cliffordt(n, gates, t_prob, seed);
    throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

}  // namespace limtdd
