#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Eigenvalues>

#include "noavqe/core.hpp"
#include "noavqe/pauli.hpp"

namespace noavqe {

/// Register of m qubits, either a statevector or a density matrix.
/// Qubit q is bit q of the computational-basis index; |1> means the mode is occupied.
class QuantumState {
  public:
    enum class Kind { Pure, Mixed };

    static QuantumState zero(int m, Kind kind) {
        check_size(m);
        QuantumState s;
        s.m_ = m;
        s.kind_ = kind;
        const Eigen::Index dim = Eigen::Index{1} << m;
        if (kind == Kind::Pure) {
            s.amp_ = CVector::Zero(dim);
            s.amp_(0) = 1.0;
        } else {
            s.rho_ = CMatrix::Zero(dim, dim);
            s.rho_(0, 0) = 1.0;
        }
        return s;
    }

    static QuantumState basis(int m, std::uint64_t index, Kind kind = Kind::Pure) {
        QuantumState s = zero(m, kind);
        if (kind == Kind::Pure) {
            s.amp_(0) = 0.0;
            s.amp_(static_cast<Eigen::Index>(index)) = 1.0;
        } else {
            s.rho_(0, 0) = 0.0;
            s.rho_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
        }
        return s;
    }

    static QuantumState from_amplitudes(CVector amp) {
        const int m = qubits_for(amp.size());
        QuantumState s;
        s.m_ = m;
        s.kind_ = Kind::Pure;
        s.amp_ = std::move(amp);
        return s;
    }

    static QuantumState from_density(CMatrix rho) {
        if (rho.rows() != rho.cols()) throw DimensionError("QuantumState: density matrix is not square");
        const int m = qubits_for(rho.rows());
        QuantumState s;
        s.m_ = m;
        s.kind_ = Kind::Mixed;
        s.rho_ = std::move(rho);
        return s;
    }

    static QuantumState maximally_mixed(int m) {
        check_size(m);
        const Eigen::Index dim = Eigen::Index{1} << m;
        return from_density(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    int qubits() const { return m_; }
    Kind kind() const { return kind_; }
    bool is_pure() const { return kind_ == Kind::Pure; }
    Eigen::Index dim() const { return Eigen::Index{1} << m_; }

    const CVector &amplitudes() const { return amp_; }
    CVector &amplitudes() { return amp_; }
    const CMatrix &density() const { return rho_; }
    CMatrix &density() { return rho_; }

    QuantumState to_mixed() const {
        if (!is_pure()) return *this;
        return from_density(amp_ * amp_.adjoint());
    }

    /// Throws ConsistencyError when normalization, Hermiticity or positivity is violated.
    void validate(double tol = 1e-10) const {
        if (is_pure()) {
            if (std::abs(amp_.norm() - 1.0) > tol) throw ConsistencyError("QuantumState: statevector not normalized");
            return;
        }
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw ConsistencyError("QuantumState: density matrix not Hermitian");
        if (std::abs(rho_.trace() - cplx{1.0}) > tol) throw ConsistencyError("QuantumState: trace is not 1");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9) throw ConsistencyError("QuantumState: density matrix not PSD");
    }

  private:
    static void check_size(int m) {
        if (m < 1 || m > 12) throw DimensionError("QuantumState: qubit count must be in [1, 12]");
    }
    static int qubits_for(Eigen::Index dim) {
        int m = 0;
        while ((Eigen::Index{1} << m) < dim) ++m;
        if ((Eigen::Index{1} << m) != dim || m < 1) throw DimensionError("QuantumState: dimension is not a power of two");
        check_size(m);
        return m;
    }

    int m_ = 0;
    Kind kind_ = Kind::Pure;
    CVector amp_;
    CMatrix rho_;
};

enum class GateKind { RY, X, FSim, LdcaBlock, PauliRotation };

inline std::string to_string(GateKind k) {
    switch (k) {
    case GateKind::RY: return "ry";
    case GateKind::X: return "x";
    case GateKind::FSim: return "fsim";
    case GateKind::LdcaBlock: return "ldca-block";
    case GateKind::PauliRotation: return "pauli-rotation";
    }
    return "?";
}

/// Hermitian generator for exp(i theta G), as a real combination of Pauli strings.
using Generator = std::vector<std::pair<double, PauliString>>;

/// A gate with concrete angles.
///  - RY(theta) on one qubit; X on one qubit.
///  - FSim(theta, phi) on two qubits.
///  - LdcaBlock(t1..t5): exp(-i t1 ZZ/2) exp(-i t2 XX/2) exp(-i t3 YY/2) exp(-i t4 XY/2) exp(-i t5 YX/2),
///    applied left to right in that order, X/Y letters ordered as (qubits[0], qubits[1]).
///  - PauliRotation(theta): exp(i theta G) with `generator` G.
struct GateOp {
    GateKind kind = GateKind::X;
    std::vector<int> qubits;
    std::vector<double> params;
    Generator generator;
};

/// Depolarizing noise: single-qubit channel with p1 after one-qubit gates,
/// E_{p2} (x) E_{p2} after two-qubit gates.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    bool enabled = false;

    static NoiseModel none() { return {}; }

    void validate() const {
        if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
            throw DomainError("NoiseModel: probabilities must lie in [0, 1]");
        }
    }

    bool active() const { return enabled && (p1 > 0.0 || p2 > 0.0); }
};

/// Randomized-benchmarking error rates of the reference superconducting device.
inline constexpr double kReferenceEps1 = 0.0016;
inline constexpr double kReferenceEps2 = 0.006;

/// p1 = 3/2 eps1,  p2 = 1 - sqrt(1 - 5/4 eps2).
inline NoiseModel rb_to_depolarizing(double eps1, double eps2) {
    if (eps1 < 0.0 || eps2 < 0.0) throw DomainError("rb_to_depolarizing: error rates must be non-negative");
    if (eps2 > 0.8) throw DomainError("rb_to_depolarizing: eps2 > 0.8 makes the two-qubit radicand negative");
    NoiseModel n;
    n.p1 = 1.5 * eps1;
    n.p2 = 1.0 - std::sqrt(1.0 - 1.25 * eps2);
    n.enabled = true;
    n.validate();
    return n;
}

/// Reference device noise scaled by the ratio r applied to both RB error rates.
inline NoiseModel scaled_reference_noise(double r) {
    if (r < 0.0) throw DomainError("noise ratio must be non-negative");
    return rb_to_depolarizing(r * kReferenceEps1, r * kReferenceEps2);
}

namespace detail {

struct LocalUnitary {
    std::vector<int> qubits;
    CMatrix u; // local index bit k <-> qubits[k]
};

// Dense matrix of a Pauli string restricted to `qubits` (local bit k <-> qubits[k]).
inline CMatrix local_pauli_matrix(const PauliString &p, const std::vector<int> &qubits) {
    const int k = static_cast<int>(qubits.size());
    const Eigen::Index dim = Eigen::Index{1} << k;
    std::uint64_t lx = 0, lz = 0;
    for (int b = 0; b < k; ++b) {
        if ((p.x >> qubits[b]) & 1U) lx |= std::uint64_t{1} << b;
        if ((p.z >> qubits[b]) & 1U) lz |= std::uint64_t{1} << b;
    }
    static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx ybase = kPow[popcount(lx & lz) % 4];
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double sign = (popcount(static_cast<std::uint64_t>(i) & lz) % 2) ? -1.0 : 1.0;
        out(static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) ^ lx), i) = ybase * sign;
    }
    return out;
}

inline std::vector<int> support_qubits(const Generator &g) {
    std::uint64_t mask = 0;
    for (const auto &[c, p] : g) mask |= p.support();
    std::vector<int> q;
    for (int b = 0; b < 64; ++b)
        if ((mask >> b) & 1U) q.push_back(b);
    return q;
}

/// exp(i theta G) on the generator support. Single strings use cos + i sin P;
/// sums are exponentiated through their spectral decomposition.
inline LocalUnitary pauli_rotation_unitary(const Generator &g, double theta) {
    LocalUnitary lu;
    lu.qubits = support_qubits(g);
    const Eigen::Index dim = Eigen::Index{1} << lu.qubits.size();
    if (g.size() == 1) {
        const CMatrix p = local_pauli_matrix(g[0].second, lu.qubits);
        const double a = theta * g[0].first;
        lu.u = std::cos(a) * CMatrix::Identity(dim, dim) + kI * std::sin(a) * p;
        return lu;
    }
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto &[c, p] : g) h += c * local_pauli_matrix(p, lu.qubits);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    CVector phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i) phases(i) = std::exp(kI * theta * es.eigenvalues()(i));
    lu.u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return lu;
}

inline void check_qubits(const std::vector<int> &qubits, int m) {
    for (std::size_t a = 0; a < qubits.size(); ++a) {
        if (qubits[a] < 0 || qubits[a] >= m) {
            throw DimensionError("gate qubit index " + std::to_string(qubits[a]) + " out of range for " +
                                 std::to_string(m) + " qubits");
        }
        for (std::size_t b = a + 1; b < qubits.size(); ++b)
            if (qubits[a] == qubits[b]) throw DimensionError("gate acts twice on qubit " + std::to_string(qubits[a]));
    }
}

/// Decomposes a gate into the elementary unitaries after each of which noise is applied.
inline std::vector<LocalUnitary> elementary_unitaries(const GateOp &g) {
    auto need = [&](std::size_t nq, std::size_t np) {
        if (g.qubits.size() != nq || g.params.size() != np) {
            throw DimensionError(to_string(g.kind) + " gate expects " + std::to_string(nq) + " qubits and " +
                                 std::to_string(np) + " parameters");
        }
    };
    switch (g.kind) {
    case GateKind::X: {
        need(1, 0);
        CMatrix u(2, 2);
        u << 0, 1, 1, 0;
        return {{g.qubits, u}};
    }
    case GateKind::RY: {
        need(1, 1);
        const double c = std::cos(g.params[0] / 2), s = std::sin(g.params[0] / 2);
        CMatrix u(2, 2);
        u << c, -s, s, c;
        return {{g.qubits, u}};
    }
    case GateKind::FSim: {
        need(2, 2);
        const double th = g.params[0], ph = g.params[1];
        CMatrix u = CMatrix::Zero(4, 4);
        u(0, 0) = 1.0;
        u(1, 1) = std::cos(th);
        u(2, 2) = std::cos(th);
        u(1, 2) = -kI * std::sin(th);
        u(2, 1) = -kI * std::sin(th);
        u(3, 3) = std::exp(-kI * ph);
        return {{g.qubits, u}};
    }
    case GateKind::LdcaBlock: {
        need(2, 5);
        if (g.qubits[0] == g.qubits[1]) throw DimensionError("ldca-block needs two distinct qubits");
        const int m = std::max(g.qubits[0], g.qubits[1]) + 1;
        static const char *kPairs[5] = {"ZZ", "XX", "YY", "XY", "YX"};
        std::vector<LocalUnitary> out;
        for (int k = 0; k < 5; ++k) {
            std::string s(m, 'I');
            s[g.qubits[0]] = kPairs[k][0];
            s[g.qubits[1]] = kPairs[k][1];
            out.push_back(pauli_rotation_unitary({{1.0, PauliString::parse(s)}}, -g.params[k] / 2.0));
        }
        return out;
    }
    case GateKind::PauliRotation: {
        if (g.params.size() != 1) throw DimensionError("pauli-rotation gate expects one parameter");
        if (g.generator.empty()) throw ConfigError("pauli-rotation gate has an empty generator");
        return {pauli_rotation_unitary(g.generator, g.params[0])};
    }
    }
    throw ConfigError("unknown gate kind");
}

// Applies the local unitary to every fibre of a strided register view of 2^m entries.
inline void apply_local(cplx *data, Eigen::Index stride, int m, const LocalUnitary &lu) {
    const int k = static_cast<int>(lu.qubits.size());
    const std::size_t dim = std::size_t{1} << m;
    const std::size_t local = std::size_t{1} << k;
    std::uint64_t mask = 0;
    std::vector<std::uint64_t> offs(local, 0);
    for (int b = 0; b < k; ++b) mask |= std::uint64_t{1} << lu.qubits[b];
    for (std::size_t l = 0; l < local; ++l)
        for (int b = 0; b < k; ++b)
            if ((l >> b) & 1U) offs[l] |= std::uint64_t{1} << lu.qubits[b];
    std::vector<cplx> in(local), out(local);
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & mask) continue;
        for (std::size_t l = 0; l < local; ++l) in[l] = data[(base | offs[l]) * stride];
        for (std::size_t r = 0; r < local; ++r) {
            cplx acc{};
            for (std::size_t c = 0; c < local; ++c) acc += lu.u(r, c) * in[c];
            out[r] = acc;
        }
        for (std::size_t l = 0; l < local; ++l) data[(base | offs[l]) * stride] = out[l];
    }
}

inline void apply_unitary(QuantumState &s, const LocalUnitary &lu) {
    const int m = s.qubits();
    if (s.is_pure()) {
        apply_local(s.amplitudes().data(), 1, m, lu);
        return;
    }
    CMatrix &rho = s.density();
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index c = 0; c < dim; ++c) apply_local(rho.col(c).data(), 1, m, lu);
    LocalUnitary conj{lu.qubits, lu.u.conjugate()};
    for (Eigen::Index r = 0; r < dim; ++r) apply_local(rho.data() + r, dim, m, conj);
}

} // namespace detail

/// Single-qubit depolarizing channel (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on qubit q.
inline void depolarize(QuantumState &s, int q, double p) {
    if (s.is_pure()) throw ConfigError("depolarize: noise requires a mixed (density-matrix) state");
    if (p == 0.0) return;
    CMatrix &rho = s.density();
    const Eigen::Index dim = rho.rows();
    const Eigen::Index bit = Eigen::Index{1} << q;
    const double keep = 1.0 - 2.0 * p / 3.0, swap = 2.0 * p / 3.0, coh = 1.0 - 4.0 * p / 3.0;
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (c & bit) continue;
        for (Eigen::Index r = 0; r < dim; ++r) {
            if (r & bit) continue;
            const cplx a = rho(r, c), b = rho(r | bit, c | bit);
            rho(r, c) = keep * a + swap * b;
            rho(r | bit, c | bit) = keep * b + swap * a;
            rho(r, c | bit) *= coh;
            rho(r | bit, c) *= coh;
        }
    }
}

/// Applies g, followed by the depolarizing channel on the touched qubits when noise is enabled.
/// Composite gates are decomposed first and every elementary piece is followed by its own channel.
inline void apply_gate(QuantumState &s, const GateOp &g, const NoiseModel &noise) {
    detail::check_qubits(g.qubits, s.qubits());
    if (g.kind == GateKind::PauliRotation) {
        for (const auto &[c, p] : g.generator)
            if (p.m > s.qubits() || (p.support() >> s.qubits()) != 0)
                throw DimensionError("pauli-rotation generator acts outside the register");
    }
    const bool noisy = noise.active();
    if (noisy && s.is_pure()) throw ConfigError("apply_gate: noisy simulation requires a mixed state");
    for (const auto &lu : detail::elementary_unitaries(g)) {
        detail::apply_unitary(s, lu);
        if (!noisy) continue;
        const double p = lu.qubits.size() == 1 ? noise.p1 : noise.p2;
        for (int q : lu.qubits) depolarize(s, q, p);
    }
}

inline QuantumState apply_gate(const QuantumState &s, const GateOp &g, const NoiseModel &noise) {
    QuantumState out = s;
    apply_gate(out, g, noise);
    return out;
}

/// Runs a bound gate list from |0...0>. A density matrix is used when noise is active.
inline QuantumState run_circuit(int m, const std::vector<GateOp> &gates, const NoiseModel &noise,
                                bool force_mixed = false) {
    const auto kind = (noise.active() || force_mixed) ? QuantumState::Kind::Mixed : QuantumState::Kind::Pure;
    QuantumState s = QuantumState::zero(m, kind);
    for (const auto &g : gates) apply_gate(s, g, noise);
    return s;
}

/// PauliSum pre-grouped by X mask for fast dense evaluation:
///   P|i> = i^{|x&z|} (-1)^{|i&z|} |i^x>.
class CompiledObservable {
  public:
    CompiledObservable() = default;

    explicit CompiledObservable(const PauliSum &o) : m_(o.m), offset_(o.offset) {
        const std::size_t dim = std::size_t{1} << m_;
        std::unordered_map<std::uint64_t, std::size_t> where;
        for (const auto &t : o.terms) {
            auto it = where.find(t.string.x);
            if (it == where.end()) {
                it = where.emplace(t.string.x, groups_.size()).first;
                groups_.push_back({t.string.x, CVector::Zero(static_cast<Eigen::Index>(dim))});
            }
            CVector &c = groups_[it->second].coeff;
            const cplx base = ipow(popcount(t.string.x & t.string.z)) * t.coeff;
            for (std::size_t i = 0; i < dim; ++i)
                c(static_cast<Eigen::Index>(i)) += (popcount(i & t.string.z) % 2) ? -base : base;
        }
    }

    int qubits() const { return m_; }
    double offset() const { return offset_; }

    double expectation(const QuantumState &s) const {
        check(s);
        const Eigen::Index dim = s.dim();
        cplx acc{};
        if (s.is_pure()) {
            const CVector &a = s.amplitudes();
            for (const auto &g : groups_) {
                const auto x = static_cast<Eigen::Index>(g.x);
                for (Eigen::Index i = 0; i < dim; ++i) acc += std::conj(a(i ^ x)) * g.coeff(i) * a(i);
            }
        } else {
            const CMatrix &rho = s.density();
            for (const auto &g : groups_) {
                const auto x = static_cast<Eigen::Index>(g.x);
                for (Eigen::Index i = 0; i < dim; ++i) acc += g.coeff(i) * rho(i, i ^ x);
            }
        }
        return offset_ + acc.real();
    }

    /// O|psi> including the offset.
    CVector apply(const CVector &psi) const {
        CVector out = offset_ * psi;
        for (const auto &g : groups_) {
            const auto x = static_cast<Eigen::Index>(g.x);
            for (Eigen::Index i = 0; i < psi.size(); ++i) out(i ^ x) += g.coeff(i) * psi(i);
        }
        return out;
    }

  private:
    struct Group {
        std::uint64_t x;
        CVector coeff;
    };

    static cplx ipow(int e) {
        static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return kPow[e % 4];
    }

    void check(const QuantumState &s) const {
        if (s.qubits() != m_) {
            throw DimensionError("observable acts on " + std::to_string(m_) + " qubits, state has " +
                                 std::to_string(s.qubits()));
        }
    }

    int m_ = 0;
    double offset_ = 0.0;
    std::vector<Group> groups_;
};

/// <P> for a single Pauli string.
inline double pauli_expectation(const QuantumState &s, const PauliString &p) {
    const Eigen::Index dim = s.dim();
    const auto x = static_cast<Eigen::Index>(p.x);
    static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = kPow[popcount(p.x & p.z) % 4];
    cplx acc{};
    if (s.is_pure()) {
        const CVector &a = s.amplitudes();
        for (Eigen::Index i = 0; i < dim; ++i) {
            const cplx v = std::conj(a(i ^ x)) * a(i);
            acc += (popcount(static_cast<std::uint64_t>(i) & p.z) % 2) ? -v : v;
        }
    } else {
        const CMatrix &rho = s.density();
        for (Eigen::Index i = 0; i < dim; ++i) {
            const cplx v = rho(i, i ^ x);
            acc += (popcount(static_cast<std::uint64_t>(i) & p.z) % 2) ? -v : v;
        }
    }
    return (base * acc).real();
}

/// Exact <o>, including the identity offset.
inline double expectation(const QuantumState &s, const PauliSum &o) {
    if (o.m != s.qubits()) throw DimensionError("expectation: observable and state sizes differ");
    return CompiledObservable(o).expectation(s);
}

/// Finite-shot estimate: each term i is measured alloc[i] times as a +-1 variable,
///   k ~ Binomial(n_i, (1 + <P_i>)/2),  <P_i> ~= 2k/n_i - 1.
/// Uses std::mt19937_64 seeded with `seed` and std::binomial_distribution.
inline double sampled_expectation(const QuantumState &s, const PauliSum &o, const std::vector<long long> &alloc,
                                  std::uint64_t seed) {
    if (o.m != s.qubits()) throw DimensionError("sampled_expectation: observable and state sizes differ");
    if (alloc.size() != o.size()) {
        throw AllocationError("sampled_expectation: allocation has " + std::to_string(alloc.size()) +
                              " entries for " + std::to_string(o.size()) + " terms");
    }
    std::mt19937_64 rng(seed);
    double acc = o.offset;
    for (std::size_t i = 0; i < o.size(); ++i) {
        if (alloc[i] < 1) throw AllocationError("sampled_expectation: term " + std::to_string(i) + " has no shots");
        const double e = std::clamp(pauli_expectation(s, o.terms[i].string), -1.0, 1.0);
        std::binomial_distribution<long long> bin(alloc[i], (1.0 + e) / 2.0);
        const long long k = bin(rng);
        acc += o.terms[i].coeff * (2.0 * static_cast<double>(k) / static_cast<double>(alloc[i]) - 1.0);
    }
    return acc;
}

} // namespace noavqe
