#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "noavqe/ansatz.hpp"
#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/noization.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"
#include "noavqe/vqe.hpp"

namespace noavqe {

/// Qubit-ADAPT operator pool, enumerated in this order:
///   X_iX_j + Y_iY_j  for i < j
///   Z_iZ_j           for i < j
///   X_iY_j           for all ordered pairs i != j (row-major in (i, j))
///   X_i, Y_i, Z_i    for every qubit i
/// Size: 2*C(m,2) + m(m-1) + 3m = 2m(m-1) + 3m.
struct OperatorPool {
    int m = 0;
    std::vector<Generator> generators;
    std::vector<std::string> labels;

    std::size_t size() const { return generators.size(); }

    static std::size_t expected_size(int m) { return static_cast<std::size_t>(2 * m * (m - 1) + 3 * m); }
};

inline OperatorPool build_pool(int m) {
    OperatorPool pool;
    pool.m = m;
    auto pair = [&](int i, char a, int j, char b) {
        std::string s(m, 'I');
        s[i] = a;
        s[j] = b;
        return PauliString::parse(s);
    };
    auto label = [](char a, int i, char b, int j) {
        return std::string(1, a) + std::to_string(i) + std::string(1, b) + std::to_string(j);
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            pool.generators.push_back({{1.0, pair(i, 'X', j, 'X')}, {1.0, pair(i, 'Y', j, 'Y')}});
            pool.labels.push_back(label('X', i, 'X', j) + "+" + label('Y', i, 'Y', j));
        }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            pool.generators.push_back({{1.0, pair(i, 'Z', j, 'Z')}});
            pool.labels.push_back(label('Z', i, 'Z', j));
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            pool.generators.push_back({{1.0, pair(i, 'X', j, 'Y')}});
            pool.labels.push_back(label('X', i, 'Y', j));
        }
    for (int i = 0; i < m; ++i)
        for (char c : {'X', 'Y', 'Z'}) {
            pool.generators.push_back({{1.0, PauliString::single(m, i, c)}});
            pool.labels.push_back(std::string(1, c) + std::to_string(i));
        }
    return pool;
}

/// Evaluates G_k = |<[H, P_k]>| for every pool member from precompiled i[H, P_k].
class PoolGradients {
  public:
    PoolGradients(const PauliSum &h, const OperatorPool &pool) {
        if (h.m != pool.m) throw DimensionError("pool_gradients: Hamiltonian and pool sizes differ");
        commutators_.reserve(pool.size());
        for (const auto &g : pool.generators) commutators_.emplace_back(commutator_i(h, g));
    }

    std::vector<double> operator()(const QuantumState &s) const {
        std::vector<double> out;
        out.reserve(commutators_.size());
        for (const auto &c : commutators_) out.push_back(std::abs(c.expectation(s)));
        return out;
    }

  private:
    std::vector<CompiledObservable> commutators_;
};

inline std::vector<double> pool_gradients(const QuantumState &s, const PauliSum &h, const OperatorPool &pool) {
    return PoolGradients(h, pool)(s);
}

struct AdaptReference {
    CircuitTemplate circuit; // product circuit, all parameters frozen
    VqeResult result;
};

/// Optimizes the product RY circuit; the returned template freezes those m parameters.
inline AdaptReference build_reference(int m, const PauliSum &h, const ShotBudget &budget, const NoiseModel &noise,
                                      std::uint64_t seed) {
    AdaptReference ref;
    ref.circuit = build_product(m);
    ref.circuit.name = "adapt";
    ref.result = run_vqe(h, ref.circuit, budget, noise, seed);
    ref.circuit.frozen_prefix = m;
    return ref;
}

struct AdaptStepRecord {
    std::size_t pool_index = 0;
    std::string label;
    double max_gradient = 0.0;
    double energy = 0.0; // after re-optimization
};

struct AdaptResult {
    CircuitTemplate circuit;
    VqeResult result;
    std::vector<AdaptStepRecord> steps;
    double last_max_gradient = 0.0;
    std::string stop_reason;
};

inline constexpr double kAdaptGradientThreshold = 1e-4;

/// Grows the circuit one pool rotation at a time (largest gradient, lowest index on ties),
/// re-optimizing all non-reference angles warm-started from the previous optimum with the
/// new angle at 0. Stops after max_ops additions or when the largest gradient drops below
/// kAdaptGradientThreshold.
inline AdaptResult adapt_vqe(const PauliSum &h, const AdaptReference &reference, const OperatorPool &pool, int max_ops,
                             const ShotBudget &budget, const NoiseModel &noise, std::uint64_t seed) {
    if (max_ops < 0) throw ConfigError("adapt_vqe: max_ops must be non-negative");
    AdaptResult out;
    out.circuit = reference.circuit;
    out.result = reference.result;
    out.stop_reason = "max_ops";
    const PoolGradients gradients(h, pool);
    std::vector<double> params = reference.result.best_params;
    for (int n = 0; n < max_ops; ++n) {
        const QuantumState s = simulate(out.circuit, params, noise);
        const std::vector<double> g = gradients(s);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < g.size(); ++k)
            if (g[k] > g[arg]) arg = k;
        out.last_max_gradient = g.empty() ? 0.0 : g[arg];
        if (g.empty() || g[arg] < kAdaptGradientThreshold) {
            out.stop_reason = "gradient";
            break;
        }
        out.circuit.append_rotation(pool.generators[arg]);
        params.push_back(0.0);
        VqeOptions opt;
        opt.base_params = params;
        opt.warm_start = true;
        opt.repeats = 1;
        // Tight initial trust radius around the warm start.
        opt.rho_begin = 0.5;
        VqeResult r = run_vqe(h, out.circuit, budget, noise, mix_seed(seed, static_cast<std::uint64_t>(n)), opt);
        r.evaluations_used += out.result.evaluations_used;
        params = r.best_params;
        out.result = std::move(r);
        out.steps.push_back({arg, pool.labels[arg], g[arg], out.result.best_energy});
    }
    return out;
}

/// Natural-orbitalizing adaptive VQE: K rounds of {reference, ADAPT growth, 1-RDM, rotation},
/// rebuilding the circuit from scratch each round.
inline NoizationTrace noa_vqe(const FermionTensors &h0, int k_steps, int max_ops, const ShotBudget &budget,
                              const NoiseModel &noise, std::uint64_t seed, const NoizationOptions &opt = {}) {
    if (k_steps < 1) throw ConfigError("noa_vqe: K must be at least 1");
    NoizationTrace trace;
    trace.method = "noa-vqe";
    const OperatorPool pool = build_pool(h0.m);
    FermionTensors h = h0;
    OrbitalRotation cumulative = OrbitalRotation::identity(h0.m);
    for (int k = 0; k < k_steps; ++k) {
        const std::uint64_t kseed = mix_seed(seed, static_cast<std::uint64_t>(k));
        const PauliSum pauli = jordan_wigner(h);
        const AdaptReference ref = build_reference(h.m, pauli, budget, noise, mix_seed(kseed, 1));
        const AdaptResult ad = adapt_vqe(pauli, ref, pool, max_ops, budget, noise, mix_seed(kseed, 2));
        NoizationStep st;
        st.step = k;
        st.vqe = ad.result;
        st.energy = ad.result.best_energy;
        st.reference_energy = ref.result.best_energy;
        for (const auto &a : ad.steps) {
            st.operators.push_back(a.label);
            st.max_gradients.push_back(a.max_gradient);
            st.adapt_energies.push_back(a.energy);
        }
        const QuantumState s = simulate(ad.circuit, ad.result.best_params, noise);
        const OneRdm rdm = detail::measure_step_rdm(s, budget, opt, mix_seed(kseed, 3));
        detail::fill_step(st, pauli, rdm, cumulative, ad.circuit.occupied, opt.spin_resolved);
        cumulative = st.cumulative_rotation;
        h = rotate_tensors(h, st.rotation);
        trace.steps.push_back(std::move(st));
    }
    trace.final_tensors = std::move(h);
    return trace;
}

} // namespace noavqe
