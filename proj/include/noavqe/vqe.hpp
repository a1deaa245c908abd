#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "noavqe/ansatz.hpp"
#include "noavqe/cobyla.hpp"
#include "noavqe/core.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"

namespace noavqe {

/// Measurement budget of a whole run. Every energy evaluation receives
///   total / (n_iter * n_repeats * k_steps)
/// shots; k_steps is the NOization step count and 1 for a direct VQE run.
struct ShotBudget {
    long long total = 0;
    int n_iter = 1000;
    int n_repeats = 1;
    int k_steps = 1;
    bool exact_mode = true;

    static ShotBudget exact(int n_iter = 1000, int n_repeats = 1) {
        ShotBudget b;
        b.n_iter = n_iter;
        b.n_repeats = n_repeats;
        return b;
    }

    static ShotBudget sampled(long long total, int n_iter, int n_repeats, int k_steps = 1) {
        return {total, n_iter, n_repeats, k_steps, false};
    }

    long long shots_per_evaluation() const {
        if (exact_mode) return 0;
        return total / (static_cast<long long>(n_iter) * n_repeats * k_steps);
    }

    /// Throws ConfigError if the counts are invalid or per-evaluation shots cannot cover every term.
    void validate(std::size_t term_count) const {
        if (n_iter < 1 || n_repeats < 1 || k_steps < 1) {
            throw ConfigError("ShotBudget: n_iter, n_repeats and k_steps must be positive");
        }
        if (exact_mode) return;
        if (total < 1) throw ConfigError("ShotBudget: total shots must be positive in sampled mode");
        const long long per = shots_per_evaluation();
        if (per < static_cast<long long>(term_count)) {
            throw ConfigError("ShotBudget: " + std::to_string(per) + " shots per evaluation cannot cover " +
                              std::to_string(term_count) + " Pauli terms");
        }
    }
};

/// Splits n shots over the terms proportionally to |coefficient| (largest-remainder rounding);
/// every term receives at least one shot and the counts sum to n.
inline std::vector<long long> allocate_shots(const PauliSum &o, long long n) {
    const std::size_t t = o.size();
    if (t == 0) throw AllocationError("allocate_shots: observable has no terms");
    if (n < static_cast<long long>(t)) {
        throw AllocationError("allocate_shots: " + std::to_string(n) + " shots for " + std::to_string(t) + " terms");
    }
    const double norm = one_norm(o);
    std::vector<long long> out(t);
    std::vector<double> rem(t);
    long long used = 0;
    for (std::size_t i = 0; i < t; ++i) {
        const double quota = static_cast<double>(n) * std::abs(o.terms[i].coeff) / norm;
        out[i] = static_cast<long long>(std::floor(quota));
        rem[i] = quota - static_cast<double>(out[i]);
        used += out[i];
    }
    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; used < n; k = (k + 1) % t, ++used) ++out[order[k]];
    // Lift empty terms to one shot, taking from the largest allocations.
    for (std::size_t i = 0; i < t; ++i) {
        if (out[i] > 0) continue;
        const auto donor = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
        --out[donor];
        out[i] = 1;
    }
    return out;
}

struct VqeResult {
    std::vector<double> best_params;
    double best_energy = 0.0;
    std::vector<double> trace; // evaluations of the selected restart
    int evaluations_used = 0;
    bool sampled = false; // best_energy is a fresh finite-shot estimate
    std::vector<double> restart_energies;
    std::string method = kOptimizerName;
};

struct VqeOptions {
    /// Values of all parameters; the frozen prefix is always read from here, and with
    /// warm_start the free part seeds the first restart.
    std::vector<double> base_params;
    bool warm_start = false;
    /// Overrides budget.n_repeats when positive.
    int repeats = 0;
    double rho_begin = 1.0;
    double rho_end = 1e-6;
};

/// Energy functional of a bound circuit, exact or finite-shot.
class EnergyEstimator {
  public:
    EnergyEstimator(const PauliSum &h, const CircuitTemplate &c, const NoiseModel &noise, long long shots)
        : h_(h), compiled_(h), circuit_(c), noise_(noise), shots_(shots) {
        if (h.m != c.m) throw DimensionError("VQE: Hamiltonian and circuit qubit counts differ");
        if (shots_ > 0 && !h_.empty()) alloc_ = allocate_shots(h_, shots_);
    }

    bool sampled() const { return shots_ > 0 && !h_.empty(); }

    double operator()(const std::vector<double> &params, std::uint64_t seed) const {
        const QuantumState s = simulate(circuit_, params, noise_);
        if (!sampled()) return compiled_.expectation(s);
        return sampled_expectation(s, h_, alloc_, seed);
    }

    double exact(const std::vector<double> &params) const {
        return compiled_.expectation(simulate(circuit_, params, noise_));
    }

  private:
    const PauliSum &h_;
    CompiledObservable compiled_;
    const CircuitTemplate &circuit_;
    NoiseModel noise_;
    long long shots_;
    std::vector<long long> alloc_;
};

/// Minimizes f from x0 within max_iter evaluations (COBYLA family).
inline MinimizeResult minimize(const std::function<double(const std::vector<double> &)> &f,
                               const std::vector<double> &x0, int max_iter) {
    MinimizeOptions opt;
    opt.max_evaluations = max_iter;
    return minimize(f, x0, opt);
}

/// Multi-start VQE: n_repeats starts (uniform in [-pi, pi] for the free parameters),
/// each minimized, the lowest final energy kept (ties to the earlier restart).
/// In sampled mode the final energy of each restart is a fresh estimate at its best point.
inline VqeResult run_vqe(const PauliSum &h, const CircuitTemplate &c, const ShotBudget &budget,
                         const NoiseModel &noise, std::uint64_t seed, const VqeOptions &opt = {}) {
    c.validate();
    noise.validate();
    budget.validate(h.size());
    if (!opt.base_params.empty() && static_cast<int>(opt.base_params.size()) != c.n_params) {
        throw DimensionError("run_vqe: base_params size does not match the circuit");
    }
    if (c.frozen_prefix > 0 && opt.base_params.empty()) {
        throw ConfigError("run_vqe: frozen parameters need base_params");
    }
    const EnergyEstimator energy(h, c, noise, budget.shots_per_evaluation());
    const int repeats = opt.repeats > 0 ? opt.repeats : budget.n_repeats;
    const int nfree = c.free_params();

    VqeResult best;
    best.sampled = energy.sampled();
    bool have = false;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t rseed = mix_seed(seed, static_cast<std::uint64_t>(r));
        std::vector<double> full = opt.base_params.empty() ? std::vector<double>(c.n_params, 0.0) : opt.base_params;
        std::vector<double> x0(full.begin() + c.frozen_prefix, full.end());
        if (!(opt.warm_start && r == 0)) {
            std::mt19937_64 rng(rseed);
            std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
            for (auto &v : x0) v = angle(rng);
        }
        std::uint64_t counter = 0;
        auto objective = [&](const std::vector<double> &x) {
            std::copy(x.begin(), x.end(), full.begin() + c.frozen_prefix);
            return energy(full, mix_seed(rseed, ++counter));
        };
        MinimizeOptions mo;
        mo.max_evaluations = budget.n_iter;
        mo.rho_begin = opt.rho_begin;
        mo.rho_end = opt.rho_end;
        const MinimizeResult mr = nfree > 0 ? minimize(objective, x0, mo) : minimize(objective, x0, MinimizeOptions{1});
        std::copy(mr.x.begin(), mr.x.end(), full.begin() + c.frozen_prefix);
        const double final_e = energy.sampled() ? energy(full, mix_seed(rseed, 0xF17A1ULL)) : energy.exact(full);
        best.evaluations_used += mr.evaluations;
        best.restart_energies.push_back(final_e);
        if (!have || final_e < best.best_energy) {
            have = true;
            best.best_energy = final_e;
            best.best_params = full;
            best.trace = mr.trace;
        }
    }
    return best;
}

} // namespace noavqe
