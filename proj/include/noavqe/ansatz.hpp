#pragma once

#include <string>
#include <utility>
#include <vector>

#include "noavqe/core.hpp"
#include "noavqe/simulator.hpp"

namespace noavqe {

/// Gate of a template; param_index lists the parameter slots feeding its angles.
struct GateSlot {
    GateKind kind = GateKind::X;
    std::vector<int> qubits;
    std::vector<int> param_index;
    Generator generator;
};

/// Ordered parameterized gate list. The first `frozen_prefix` parameters are held
/// fixed by the optimizer.
struct CircuitTemplate {
    std::string name;
    int m = 0;
    std::vector<GateSlot> gates;
    int n_params = 0;
    int frozen_prefix = 0;
    /// Qubits set to |1> by the fixed X gates (the reference Fock state).
    std::vector<int> occupied;

    int free_params() const { return n_params - frozen_prefix; }

    void validate() const {
        if (frozen_prefix < 0 || frozen_prefix > n_params) throw ConfigError("CircuitTemplate: bad frozen prefix");
        std::vector<int> uses(static_cast<std::size_t>(n_params), 0);
        for (const auto &g : gates) {
            detail::check_qubits(g.qubits, m);
            for (int p : g.param_index) {
                if (p < 0 || p >= n_params) throw ConfigError("CircuitTemplate: parameter slot out of range");
                ++uses[static_cast<std::size_t>(p)];
            }
        }
        for (int u : uses)
            if (u == 0) throw ConfigError("CircuitTemplate: unused parameter slot");
    }

    std::vector<GateOp> bind(const std::vector<double> &params) const {
        if (static_cast<int>(params.size()) != n_params) {
            throw DimensionError("CircuitTemplate '" + name + "': expected " + std::to_string(n_params) +
                                 " parameters, got " + std::to_string(params.size()));
        }
        std::vector<GateOp> out;
        out.reserve(gates.size());
        for (const auto &g : gates) {
            GateOp op{g.kind, g.qubits, {}, g.generator};
            for (int p : g.param_index) op.params.push_back(params[static_cast<std::size_t>(p)]);
            out.push_back(std::move(op));
        }
        return out;
    }

    /// Appends exp(i theta G) with a fresh parameter slot and returns that slot.
    int append_rotation(const Generator &g) {
        GateSlot s;
        s.kind = GateKind::PauliRotation;
        s.qubits = detail::support_qubits(g);
        s.param_index = {n_params};
        s.generator = g;
        gates.push_back(std::move(s));
        return n_params++;
    }
};

inline QuantumState simulate(const CircuitTemplate &c, const std::vector<double> &params, const NoiseModel &noise,
                             bool force_mixed = false) {
    return run_circuit(c.m, c.bind(params), noise, force_mixed);
}

namespace detail {

// One fermion per site with alternating spin: qubit 2i + (i mod 2) for sites i < m/2.
inline std::vector<int> neel_occupation(int m) {
    std::vector<int> out;
    for (int i = 0; i < m / 2; ++i) out.push_back(2 * i + (i % 2));
    return out;
}

inline void add_fixed_excitations(CircuitTemplate &c) {
    c.occupied = neel_occupation(c.m);
    for (int q : c.occupied) c.gates.push_back({GateKind::X, {q}, {}, {}});
}

// Nearest-neighbour pairs of one sublayer: even (0,1),(2,3),... or odd (1,2),(3,4),...
inline std::vector<std::pair<int, int>> sublayer_pairs(int m, bool odd) {
    std::vector<std::pair<int, int>> out;
    for (int a = odd ? 1 : 0; a + 1 < m; a += 2) out.emplace_back(a, a + 1);
    return out;
}

// Brickwork pairs of one layer: even sublayer then odd sublayer.
inline std::vector<std::pair<int, int>> brickwork_pairs(int m) {
    auto out = sublayer_pairs(m, false);
    for (auto p : sublayer_pairs(m, true)) out.push_back(p);
    return out;
}

// One LDCA cycle: m - 1 alternating sublayers, starting with the even one.
inline std::vector<std::pair<int, int>> ldca_cycle_pairs(int m) {
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l < m - 1; ++l)
        for (auto p : sublayer_pairs(m, l % 2 == 1)) out.push_back(p);
    return out;
}

inline void require_even(int m, const char *what) {
    if (m < 2 || m % 2 != 0) throw ConfigError(std::string(what) + " ansatz needs an even qubit count >= 2");
}

} // namespace detail

/// One RY per qubit.
inline CircuitTemplate build_product(int m) {
    if (m < 1) throw ConfigError("product ansatz needs at least one qubit");
    CircuitTemplate c;
    c.name = "product";
    c.m = m;
    for (int q = 0; q < m; ++q) c.gates.push_back({GateKind::RY, {q}, {q}, {}});
    c.n_params = m;
    return c;
}

/// Neel-pattern X gates, then `layers` brickwork layers of fSim(theta, phi).
inline CircuitTemplate build_fsim(int m, int layers = 1) {
    detail::require_even(m, "fsim");
    if (layers < 1) throw ConfigError("fsim ansatz needs at least one layer");
    CircuitTemplate c;
    c.name = "fsim";
    c.m = m;
    detail::add_fixed_excitations(c);
    for (int l = 0; l < layers; ++l)
        for (auto [a, b] : detail::brickwork_pairs(m)) {
            c.gates.push_back({GateKind::FSim, {a, b}, {c.n_params, c.n_params + 1}, {}});
            c.n_params += 2;
        }
    return c;
}

/// Neel-pattern X gates, then `cycles` cycles of 5-parameter two-qubit blocks, each cycle
/// being m - 1 alternating even/odd sublayers.
inline CircuitTemplate build_ldca(int m, int cycles = 1) {
    detail::require_even(m, "ldca");
    if (cycles < 1) throw ConfigError("ldca ansatz needs at least one cycle");
    CircuitTemplate c;
    c.name = "ldca";
    c.m = m;
    detail::add_fixed_excitations(c);
    for (int l = 0; l < cycles; ++l)
        for (auto [a, b] : detail::ldca_cycle_pairs(m)) {
            GateSlot s{GateKind::LdcaBlock, {a, b}, {}, {}};
            for (int k = 0; k < 5; ++k) s.param_index.push_back(c.n_params++);
            c.gates.push_back(std::move(s));
        }
    return c;
}

inline CircuitTemplate build_ansatz(const std::string &name, int m) {
    if (name == "product") return build_product(m);
    if (name == "fsim") return build_fsim(m);
    if (name == "ldca") return build_ldca(m);
    throw ConfigError("unknown ansatz '" + name + "' (expected product | fsim | ldca)");
}

/// exp(i theta G) as a gate.
inline GateOp pauli_rotation(const Generator &g, double theta) {
    if (g.empty()) throw ConfigError("pauli_rotation: empty generator");
    for (const auto &[c, p] : g)
        if (p.is_identity()) throw ConfigError("pauli_rotation: identity string has no rotation");
    return {GateKind::PauliRotation, detail::support_qubits(g), {theta}, g};
}

inline GateOp pauli_rotation(const PauliString &p, double theta) { return pauli_rotation(Generator{{1.0, p}}, theta); }

} // namespace noavqe
