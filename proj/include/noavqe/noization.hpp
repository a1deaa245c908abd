#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "noavqe/ansatz.hpp"
#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"
#include "noavqe/vqe.hpp"

namespace noavqe {

/// One-particle reduced density matrix D[p,q] = <c+_p c_q>.
struct OneRdm {
    CMatrix d;

    int dim() const { return static_cast<int>(d.rows()); }
    double trace() const { return d.trace().real(); }
};

enum class RdmMode { Exact, Sampled };

/// Hermitizes D and clips its eigenvalues to [0, 1].
inline OneRdm project_1rdm(const CMatrix &raw) {
    const CMatrix herm = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    RVector n = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    return {es.eigenvectors() * n.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint()};
}

/// Measures D from the Jordan-Wigner images of the bilinears c+_p c_q. In sampled
/// mode every real/imaginary observable gets `shots_per_element` shots split over its terms.
inline OneRdm measure_1rdm(const QuantumState &s, RdmMode mode = RdmMode::Exact, long long shots_per_element = 0,
                           std::uint64_t seed = 0) {
    const int m = s.qubits();
    CMatrix raw = CMatrix::Zero(m, m);
    std::uint64_t stream = 0;
    auto measure = [&](const PauliSum &o) {
        if (o.empty()) return o.offset;
        if (mode == RdmMode::Exact) return expectation(s, o);
        return sampled_expectation(s, o, allocate_shots(o, shots_per_element), mix_seed(seed, stream++));
    };
    for (int p = 0; p < m; ++p)
        for (int q = p; q < m; ++q) {
            const BilinearObservables obs = expectation_pauli_of_bilinear(p, q, m);
            const cplx v{measure(obs.real_part), measure(obs.imag_part)};
            raw(p, q) = v;
            raw(q, p) = std::conj(v);
        }
    return project_1rdm(raw);
}

/// -sum_p D_pp log D_pp with 0 log 0 = 0.
inline double correlation_entropy(const CMatrix &d) {
    double s = 0.0;
    for (Eigen::Index p = 0; p < d.rows(); ++p) {
        const double x = d(p, p).real();
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}

inline double correlation_entropy(const OneRdm &d) { return correlation_entropy(d.d); }

struct NaturalOrbitals {
    OrbitalRotation rotation; // columns are natural orbitals in the current basis
    std::vector<double> noons; // descending
};

inline constexpr double kDegeneracyTolerance = 1e-8;

namespace detail {

// Column phase: the largest-magnitude component (first one on ties) becomes real positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(big)) + 1e-12) big = i;
    if (std::abs(v(big)) > 0.0) v *= std::abs(v(big)) / v(big);
}

// Deterministic orthonormal basis of span(q): Gram-Schmidt on the projections of the
// unit vectors e_p, greedily taking the largest residual (lowest p on ties), then
// ordered by pivot index.
inline CMatrix canonical_subspace_basis(const CMatrix &q) {
    const Eigen::Index m = q.rows(), k = q.cols();
    const CMatrix proj = q * q.adjoint();
    std::vector<std::pair<Eigen::Index, CVector>> chosen;
    for (Eigen::Index step = 0; step < k; ++step) {
        Eigen::Index pivot = -1;
        double best = -1.0;
        CVector best_v;
        for (Eigen::Index p = 0; p < m; ++p) {
            CVector v = proj.col(p);
            for (const auto &[_, c] : chosen) v -= c * c.dot(v);
            const double nv = v.norm();
            if (nv > best + 1e-9) {
                best = nv;
                pivot = p;
                best_v = v;
            }
        }
        chosen.emplace_back(pivot, best_v / best);
    }
    std::sort(chosen.begin(), chosen.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    CMatrix out(m, k);
    for (Eigen::Index j = 0; j < k; ++j) out.col(j) = chosen[static_cast<std::size_t>(j)].second;
    return out;
}

} // namespace detail

/// D = V diag(n) V+ with n descending. Degenerate blocks (within kDegeneracyTolerance)
/// get a canonical basis and every column gets a fixed phase.
inline NaturalOrbitals natural_orbital_transform(const OneRdm &rdm) {
    const CMatrix herm = 0.5 * (rdm.d + rdm.d.adjoint());
    const Eigen::Index m = herm.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    NaturalOrbitals out;
    out.rotation.v = CMatrix(m, m);
    // SelfAdjointEigenSolver sorts ascending; walk it backwards.
    Eigen::Index col = 0;
    for (Eigen::Index hi = m - 1; hi >= 0;) {
        Eigen::Index lo = hi;
        while (lo > 0 && std::abs(es.eigenvalues()(lo - 1) - es.eigenvalues()(hi)) < kDegeneracyTolerance) --lo;
        const Eigen::Index k = hi - lo + 1;
        CMatrix block = es.eigenvectors().middleCols(lo, k);
        if (k > 1) block = detail::canonical_subspace_basis(block);
        for (Eigen::Index j = 0; j < k; ++j) {
            CVector v = block.col(j);
            detail::fix_phase(v);
            out.rotation.v.col(col) = v;
            // Degenerate values are reported as their block mean.
            out.noons.push_back(es.eigenvalues().segment(lo, k).mean());
            ++col;
        }
        hi = lo - 1;
    }
    return out;
}

/// Qubit slot of each natural orbital: the k most-occupied orbitals go to `occupied`
/// (in the given order), the others to the remaining qubits in ascending order.
inline std::vector<int> orbital_slots(int m, const std::vector<int> &occupied) {
    std::vector<int> slots;
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    for (int q : occupied) {
        if (q < 0 || q >= m || taken[static_cast<std::size_t>(q)]) {
            throw ConfigError("orbital_slots: occupied qubits must be distinct and in range");
        }
        taken[static_cast<std::size_t>(q)] = true;
        slots.push_back(q);
    }
    for (int q = 0; q < m; ++q)
        if (!taken[static_cast<std::size_t>(q)]) slots.push_back(q);
    return slots;
}

/// Basis update whose column slots[j] is the j-th natural orbital, so the ansatz's reference
/// Fock state fills the most-occupied orbitals.
inline OrbitalRotation arrange_orbitals(const NaturalOrbitals &no, const std::vector<int> &slots) {
    OrbitalRotation r;
    r.v = CMatrix(no.rotation.v.rows(), no.rotation.v.cols());
    for (std::size_t j = 0; j < slots.size(); ++j) r.v.col(slots[j]) = no.rotation.v.col(static_cast<Eigen::Index>(j));
    return r;
}

/// One entry of a NOization (or NOA-VQE) run.
struct NoizationStep {
    int step = 0;
    double energy = 0.0;        // converged energy in this step's basis
    double one_norm = 0.0;      // of this step's Pauli Hamiltonian
    std::size_t term_count = 0; // non-identity Pauli terms
    std::vector<double> weights; // sorted |coefficients|
    VqeResult vqe;
    OneRdm rdm;
    std::vector<double> noons; // descending
    std::vector<int> orbital_slots; // qubit receiving the j-th natural orbital
    double correlation_entropy = 0.0;
    OrbitalRotation rotation;            // basis update computed at this step
    OrbitalRotation cumulative_rotation; // from the original basis, after this step's update

    // Adaptive runs only.
    double reference_energy = 0.0;
    std::vector<std::string> operators;
    std::vector<double> max_gradients;
    std::vector<double> adapt_energies;
};

struct NoizationTrace {
    std::string method;
    std::vector<NoizationStep> steps;
    bool early_stopped = false;
    FermionTensors final_tensors; // after the last basis update

    double final_energy() const { return steps.empty() ? 0.0 : steps.back().energy; }
};

struct NoizationOptions {
    RdmMode rdm_mode = RdmMode::Exact;
    /// Drop 1-RDM elements between orbitals of opposite spin before diagonalizing, so
    /// every basis update stays within the spin sectors.
    bool spin_resolved = true;
    long long rdm_shots = 0; // per element in sampled mode; 0 = shots per energy evaluation
    double early_stop = 1e-6;
    VqeOptions vqe;
};

/// Spin label (0 = up, 1 = down) of every current orbital, read off the cumulative
/// rotation from the site-spin basis (even original index = up).
inline std::vector<int> orbital_spins(const OrbitalRotation &cumulative) {
    const Eigen::Index m = cumulative.v.rows();
    std::vector<int> out(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        double up = 0.0;
        for (Eigen::Index p = 0; p < m; p += 2) up += std::norm(cumulative.v(p, j));
        out[static_cast<std::size_t>(j)] = up >= 0.5 ? 0 : 1;
    }
    return out;
}

/// Zeroes D[p,q] whenever orbitals p and q carry opposite spin.
inline OneRdm spin_block(const OneRdm &rdm, const std::vector<int> &spins) {
    if (static_cast<int>(spins.size()) != rdm.dim()) throw DimensionError("spin_block: label count mismatch");
    OneRdm out = rdm;
    for (int p = 0; p < rdm.dim(); ++p)
        for (int q = 0; q < rdm.dim(); ++q)
            if (spins[static_cast<std::size_t>(p)] != spins[static_cast<std::size_t>(q)]) out.d(p, q) = 0.0;
    return out;
}

namespace detail {

inline OneRdm measure_step_rdm(const QuantumState &s, const ShotBudget &budget, const NoizationOptions &opt,
                               std::uint64_t seed) {
    if (opt.rdm_mode == RdmMode::Exact) return measure_1rdm(s);
    const long long shots = opt.rdm_shots > 0 ? opt.rdm_shots : budget.shots_per_evaluation();
    if (shots < 2) throw ConfigError("sampled 1-RDM needs at least two shots per element");
    return measure_1rdm(s, RdmMode::Sampled, shots, seed);
}

inline void fill_step(NoizationStep &st, const PauliSum &pauli, const OneRdm &rdm, const OrbitalRotation &prev,
                      const std::vector<int> &occupied, bool spin_resolved) {
    st.one_norm = one_norm(pauli);
    st.term_count = pauli.size();
    st.weights = weight_distribution(pauli);
    st.rdm = rdm;
    const NaturalOrbitals no = natural_orbital_transform(spin_resolved ? spin_block(rdm, orbital_spins(prev)) : rdm);
    st.noons = no.noons;
    st.correlation_entropy = correlation_entropy(rdm);
    st.orbital_slots = orbital_slots(rdm.dim(), occupied);
    st.rotation = arrange_orbitals(no, st.orbital_slots);
    st.cumulative_rotation = prev.then(st.rotation);
}

} // namespace detail

/// VQE on the current tensors, 1-RDM of the best state, rotation to its natural orbitals
/// (arranged so the ansatz's fixed excitations occupy the most-occupied ones).
inline std::pair<FermionTensors, NoizationStep> noize_step(const FermionTensors &h, const CircuitTemplate &ansatz,
                                                           const ShotBudget &budget, const NoiseModel &noise,
                                                           std::uint64_t seed, const NoizationOptions &opt = {},
                                                           const OrbitalRotation *cumulative = nullptr) {
    const PauliSum pauli = jordan_wigner(h);
    NoizationStep st;
    st.vqe = run_vqe(pauli, ansatz, budget, noise, mix_seed(seed, 1), opt.vqe);
    st.energy = st.vqe.best_energy;
    const QuantumState s = simulate(ansatz, st.vqe.best_params, noise);
    const OneRdm rdm = detail::measure_step_rdm(s, budget, opt, mix_seed(seed, 2));
    detail::fill_step(st, pauli, rdm, cumulative ? *cumulative : OrbitalRotation::identity(h.m), ansatz.occupied,
                      opt.spin_resolved);
    return {rotate_tensors(h, st.rotation), std::move(st)};
}

/// K interleaved VQE runs and natural-orbital basis updates. In noiseless exact mode the
/// loop stops early once consecutive converged energies differ by less than opt.early_stop.
inline NoizationTrace noization_loop(const FermionTensors &h0, const CircuitTemplate &ansatz, int k_steps,
                                     const ShotBudget &budget, const NoiseModel &noise, std::uint64_t seed,
                                     const NoizationOptions &opt = {}) {
    if (k_steps < 1) throw ConfigError("noization_loop: K must be at least 1");
    NoizationTrace trace;
    trace.method = "noization";
    FermionTensors h = h0;
    OrbitalRotation cumulative = OrbitalRotation::identity(h0.m);
    const bool deterministic = budget.exact_mode && !noise.active();
    for (int k = 0; k < k_steps; ++k) {
        auto [next, st] = noize_step(h, ansatz, budget, noise, mix_seed(seed, static_cast<std::uint64_t>(k)), opt,
                                     &cumulative);
        st.step = k;
        cumulative = st.cumulative_rotation;
        h = std::move(next);
        trace.steps.push_back(std::move(st));
        if (deterministic && k > 0 &&
            std::abs(trace.steps[k].energy - trace.steps[k - 1].energy) < opt.early_stop) {
            trace.early_stopped = k + 1 < k_steps;
            break;
        }
    }
    trace.final_tensors = std::move(h);
    return trace;
}

} // namespace noavqe
