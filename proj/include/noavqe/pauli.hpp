#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "noavqe/core.hpp"
#include "noavqe/hamiltonian.hpp"

namespace noavqe {

/// Tensor product of single-qubit Paulis on m qubits in symplectic form.
/// Bit q of x/z is set for X/Z on qubit q; Y sets both (Y = i X Z).
struct PauliString {
    int m = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    PauliString() = default;
    PauliString(int m_, std::uint64_t x_, std::uint64_t z_) : m(m_), x(x_), z(z_) {}

    /// Letters in qubit order, qubit 0 first: "XZXI" is X0 Z1 X2.
    static PauliString parse(const std::string &letters) {
        PauliString p;
        p.m = static_cast<int>(letters.size());
        for (int q = 0; q < p.m; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (letters[q]) {
            case 'I': break;
            case 'X': p.x |= bit; break;
            case 'Y': p.x |= bit; p.z |= bit; break;
            case 'Z': p.z |= bit; break;
            default: throw ConfigError("PauliString: invalid letter in '" + letters + "'");
            }
        }
        return p;
    }

    /// Single letter `letter` on qubit q, identity elsewhere.
    static PauliString single(int m, int q, char letter) {
        std::string s(m, 'I');
        s[q] = letter;
        return parse(s);
    }

    char letter(int q) const {
        const bool bx = (x >> q) & 1U, bz = (z >> q) & 1U;
        if (bx && bz) return 'Y';
        if (bx) return 'X';
        if (bz) return 'Z';
        return 'I';
    }

    std::string str() const {
        std::string s(m, 'I');
        for (int q = 0; q < m; ++q) s[q] = letter(q);
        return s;
    }

    bool is_identity() const { return x == 0 && z == 0; }
    int weight() const { return popcount(x | z); }
    std::uint64_t support() const { return x | z; }

    bool commutes_with(const PauliString &o) const {
        return (popcount(x & o.z) + popcount(z & o.x)) % 2 == 0;
    }

    friend bool operator==(const PauliString &a, const PauliString &b) {
        return a.m == b.m && a.x == b.x && a.z == b.z;
    }
    friend bool operator<(const PauliString &a, const PauliString &b) { return a.str() < b.str(); }
};

/// a * b = phase * result.
inline std::pair<cplx, PauliString> multiply(const PauliString &a, const PauliString &b) {
    PauliString c(a.m, a.x ^ b.x, a.z ^ b.z);
    int e = popcount(a.x & a.z) + popcount(b.x & b.z) + 2 * popcount(a.z & b.x) - popcount(c.x & c.z);
    e = ((e % 4) + 4) % 4;
    static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {kPow[e], c};
}

/// Real-weighted sum of non-identity Pauli strings plus an identity offset.
struct PauliSum {
    struct Term {
        double coeff;
        PauliString string;
    };

    int m = 0;
    std::vector<Term> terms;
    double offset = 0.0;

    std::size_t size() const { return terms.size(); }
    bool empty() const { return terms.empty(); }
};

inline constexpr double kPruneThreshold = 1e-12;
inline constexpr double kImagTolerance = 1e-10;

/// Accumulator for complex-weighted Pauli strings, keyed by symplectic masks.
class PauliAccumulator {
  public:
    explicit PauliAccumulator(int m) : m_(m) {}

    void add(const PauliString &p, cplx c) {
        if (c == cplx{}) return;
        acc_[{p.x, p.z}] += c;
    }

    void add_product(const std::vector<std::pair<cplx, PauliString>> &lhs,
                     const std::vector<std::pair<cplx, PauliString>> &rhs, cplx scale) {
        for (const auto &[ca, pa] : lhs)
            for (const auto &[cb, pb] : rhs) {
                auto [ph, pc] = multiply(pa, pb);
                add(pc, scale * ca * cb * ph);
            }
    }

    /// Collapses to a Hermitian PauliSum. Throws ConsistencyError if any
    /// coefficient keeps an imaginary part above kImagTolerance.
    PauliSum to_hermitian(double prune = kPruneThreshold) const {
        PauliSum out;
        out.m = m_;
        for (const auto &[key, c] : acc_) {
            if (std::abs(c.imag()) > kImagTolerance) {
                throw ConsistencyError("Pauli decomposition has imaginary coefficient " +
                                       std::to_string(c.imag()) + " on " +
                                       PauliString(m_, key.first, key.second).str() +
                                       "; operator is not Hermitian");
            }
            if (key.first == 0 && key.second == 0) {
                out.offset += c.real();
            } else if (std::abs(c.real()) >= prune) {
                out.terms.push_back({c.real(), PauliString(m_, key.first, key.second)});
            }
        }
        std::sort(out.terms.begin(), out.terms.end(),
                  [](const PauliSum::Term &a, const PauliSum::Term &b) { return a.string < b.string; });
        return out;
    }

  private:
    int m_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> acc_;
};

/// Jordan-Wigner image of a ladder operator on mode p:
///   c+_p -> Z_0..Z_{p-1} (X_p - iY_p)/2,   c_p -> Z_0..Z_{p-1} (X_p + iY_p)/2.
inline std::vector<std::pair<cplx, PauliString>> jw_ladder(int p, int m, bool dagger) {
    const std::uint64_t zstring = (std::uint64_t{1} << p) - 1;
    const std::uint64_t bit = std::uint64_t{1} << p;
    const double sy = dagger ? -0.5 : 0.5;
    return {{cplx{0.5, 0.0}, PauliString(m, bit, zstring)},
            {cplx{0.0, sy}, PauliString(m, bit, zstring | bit)}};
}

inline std::vector<std::pair<cplx, PauliString>>
jw_product(const std::vector<std::pair<int, bool>> &ops, int m) {
    std::vector<std::pair<cplx, PauliString>> acc{{cplx{1.0, 0.0}, PauliString(m, 0, 0)}};
    for (auto [p, dagger] : ops) {
        std::vector<std::pair<cplx, PauliString>> next;
        for (const auto &[ca, pa] : acc)
            for (const auto &[cb, pb] : jw_ladder(p, m, dagger)) {
                auto [ph, pc] = multiply(pa, pb);
                next.emplace_back(ca * cb * ph, pc);
            }
        acc = std::move(next);
    }
    return acc;
}

inline PauliSum jordan_wigner(const FermionTensors &h) {
    const int m = h.m;
    PauliAccumulator acc(m);
    acc.add(PauliString(m, 0, 0), h.offset);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            const cplx c = h.h1(p, q);
            if (std::abs(c) < kPruneThreshold) continue;
            for (const auto &[w, s] : jw_product({{p, true}, {q, false}}, m)) acc.add(s, c * w);
        }
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) {
                    const cplx c = h.h2(p, q, r, s);
                    if (std::abs(c) < kPruneThreshold) continue;
                    for (const auto &[w, str] : jw_product({{p, true}, {q, true}, {r, false}, {s, false}}, m))
                        acc.add(str, 0.5 * c * w);
                }
    return acc.to_hermitian();
}

/// Sum of |coefficient| over non-identity terms.
inline double one_norm(const PauliSum &p) {
    double s = 0.0;
    for (const auto &t : p.terms) s += std::abs(t.coeff);
    return s;
}

/// |coefficients| sorted in descending order.
inline std::vector<double> weight_distribution(const PauliSum &p) {
    std::vector<double> w;
    w.reserve(p.size());
    for (const auto &t : p.terms) w.push_back(std::abs(t.coeff));
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

/// Hermitian observables whose expectations give the real and imaginary parts of <c+_p c_q>.
struct BilinearObservables {
    PauliSum real_part;
    PauliSum imag_part;
};

inline BilinearObservables expectation_pauli_of_bilinear(int p, int q, int m) {
    if (p < 0 || q < 0 || p >= m || q >= m) {
        throw DimensionError("expectation_pauli_of_bilinear: mode index out of range");
    }
    const auto pq = jw_product({{p, true}, {q, false}}, m);
    const auto qp = jw_product({{q, true}, {p, false}}, m);
    // Re part: (c+_p c_q + c+_q c_p)/2;  Im part: (c+_p c_q - c+_q c_p)/(2i).
    PauliAccumulator re(m), im(m);
    for (const auto &[c, s] : pq) {
        re.add(s, 0.5 * c);
        im.add(s, -0.5 * kI * c);
    }
    for (const auto &[c, s] : qp) {
        re.add(s, 0.5 * c);
        im.add(s, 0.5 * kI * c);
    }
    return {re.to_hermitian(), im.to_hermitian()};
}

/// i[A, B] for Hermitian A and B, returned as a Hermitian PauliSum (identity parts drop out).
inline PauliSum commutator_i(const PauliSum &a, const std::vector<std::pair<double, PauliString>> &b) {
    PauliAccumulator acc(a.m);
    for (const auto &ta : a.terms)
        for (const auto &[cb, pb] : b) {
            if (ta.string.commutes_with(pb)) continue;
            // [P, Q] = 2 P Q for anticommuting strings.
            auto [ph, pc] = multiply(ta.string, pb);
            acc.add(pc, kI * 2.0 * ta.coeff * cb * ph);
        }
    return acc.to_hermitian();
}

} // namespace noavqe
