#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"
#include "noavqe/pauli.hpp"
#include "noavqe/simulator.hpp"

/// Brute-force references: dense many-body operators, exact diagonalization and
/// exact one-particle density matrices. Nothing here goes through the Pauli algebra
/// except assemble_pauli, which exists to be compared against assemble_fermionic.
namespace noavqe::oracle {

inline constexpr int kMaxModes = 10;

namespace detail {

// c_p (dagger = false) or c+_p on basis state `state`; returns the sign and the new
// state, or nullopt when the result vanishes. The sign is (-1)^{occupied modes below p}.
inline std::optional<std::pair<double, std::uint64_t>> ladder(int p, bool dagger, std::uint64_t state) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    const bool occ = state & bit;
    if (occ == dagger) return std::nullopt;
    const double sign = (popcount(state & (bit - 1)) % 2) ? -1.0 : 1.0;
    return std::make_pair(sign, state ^ bit);
}

inline void check_modes(int m) {
    if (m < 1 || m > kMaxModes) throw DimensionError("oracle: mode count must be in [1, 10]");
}

} // namespace detail

/// Dense matrix of c_p (or c+_p) on the 2^m Fock space.
inline CMatrix ladder_matrix(int p, int m, bool dagger) {
    detail::check_modes(m);
    const Eigen::Index dim = Eigen::Index{1} << m;
    CMatrix out = CMatrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s)
        if (auto r = detail::ladder(p, dagger, s)) out(static_cast<Eigen::Index>(r->second), static_cast<Eigen::Index>(s)) = r->first;
    return out;
}

/// Dense Hamiltonian built directly from the second-quantized tensors.
inline CMatrix assemble_fermionic(const FermionTensors &h) {
    detail::check_modes(h.m);
    const int m = h.m;
    const Eigen::Index dim = Eigen::Index{1} << m;
    CMatrix out = h.offset * CMatrix::Identity(dim, dim);
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s) {
        const auto col = static_cast<Eigen::Index>(s);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
                const cplx c = h.h1(p, q);
                if (c == cplx{}) continue;
                auto a = detail::ladder(q, false, s);
                if (!a) continue;
                auto b = detail::ladder(p, true, a->second);
                if (!b) continue;
                out(static_cast<Eigen::Index>(b->second), col) += c * a->first * b->first;
            }
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                for (int r = 0; r < m; ++r)
                    for (int t = 0; t < m; ++t) {
                        const cplx c = h.h2(p, q, r, t);
                        if (c == cplx{}) continue;
                        auto a = detail::ladder(t, false, s);
                        if (!a) continue;
                        auto b = detail::ladder(r, false, a->second);
                        if (!b) continue;
                        auto d = detail::ladder(q, true, b->second);
                        if (!d) continue;
                        auto e = detail::ladder(p, true, d->second);
                        if (!e) continue;
                        out(static_cast<Eigen::Index>(e->second), col) +=
                            0.5 * c * a->first * b->first * d->first * e->first;
                    }
    }
    return out;
}

/// Dense matrix of a Pauli sum (qubit q = bit q of the basis index).
inline CMatrix assemble_pauli(const PauliSum &o) {
    detail::check_modes(o.m);
    const Eigen::Index dim = Eigen::Index{1} << o.m;
    CMatrix out = o.offset * CMatrix::Identity(dim, dim);
    for (const auto &t : o.terms) {
        std::vector<int> all(static_cast<std::size_t>(o.m));
        for (int q = 0; q < o.m; ++q) all[static_cast<std::size_t>(q)] = q;
        out += t.coeff * noavqe::detail::local_pauli_matrix(t.string, all);
    }
    return out;
}

struct GroundState {
    double energy = 0.0;
    CVector state;
};

/// Lowest eigenpair of a Hermitian operator, optionally restricted to the sector with
/// `particles` set bits. The eigenvector phase makes its largest-magnitude entry real positive.
inline GroundState exact_ground_state(const CMatrix &op, std::optional<int> particles = std::nullopt) {
    if (op.rows() != op.cols()) throw DimensionError("exact_ground_state: operator is not square");
    if (op.rows() > 1024) throw DimensionError("exact_ground_state: dimension above 1024");
    std::vector<Eigen::Index> basis;
    for (Eigen::Index i = 0; i < op.rows(); ++i)
        if (!particles || popcount(static_cast<std::uint64_t>(i)) == *particles) basis.push_back(i);
    if (basis.empty()) throw ConfigError("exact_ground_state: requested particle sector is empty");
    const auto n = static_cast<Eigen::Index>(basis.size());
    CMatrix sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = op(basis[a], basis[b]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
    GroundState gs;
    gs.energy = es.eigenvalues()(0);
    gs.state = CVector::Zero(op.rows());
    for (Eigen::Index a = 0; a < n; ++a) gs.state(basis[a]) = es.eigenvectors()(a, 0);
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < gs.state.size(); ++i)
        if (std::abs(gs.state(i)) > std::abs(gs.state(big)) + 1e-12) big = i;
    gs.state *= std::abs(gs.state(big)) / gs.state(big);
    return gs;
}

/// All eigenvalues in ascending order.
inline RVector spectrum(const CMatrix &op) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(op, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Ground energy of the tensors, optionally restricted to a particle-number sector.
inline double ground_energy(const FermionTensors &h, std::optional<int> particles = std::nullopt) {
    return exact_ground_state(assemble_fermionic(h), particles).energy;
}

/// D[p,q] = <c+_p c_q> by direct action of the ladder operators on basis states.
inline CMatrix exact_1rdm(const QuantumState &s) {
    const int m = s.qubits();
    detail::check_modes(m);
    const auto dim = static_cast<std::uint64_t>(s.dim());
    CMatrix d = CMatrix::Zero(m, m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (std::uint64_t k = 0; k < dim; ++k) {
                auto a = detail::ladder(q, false, k);
                if (!a) continue;
                auto b = detail::ladder(p, true, a->second);
                if (!b) continue;
                const double sign = a->first * b->first;
                const auto row = static_cast<Eigen::Index>(b->second), col = static_cast<Eigen::Index>(k);
                // <psi| c+_p c_q |psi> = sum_k conj(psi[row]) sign psi[k];  Tr(rho O) = sum_k O[row,k] rho[k,row].
                if (s.is_pure()) {
                    d(p, q) += std::conj(s.amplitudes()(row)) * sign * s.amplitudes()(col);
                } else {
                    d(p, q) += sign * s.density()(col, row);
                }
            }
    return d;
}

inline CMatrix exact_1rdm(const CVector &psi) { return exact_1rdm(QuantumState::from_amplitudes(psi)); }

} // namespace noavqe::oracle
