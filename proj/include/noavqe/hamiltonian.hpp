#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noavqe/core.hpp"

namespace noavqe {

/// Dense rank-4 complex tensor over m spin-orbitals, row-major in (p,q,r,s).
class Tensor4 {
  public:
    Tensor4() = default;
    explicit Tensor4(int m) : m_(m), data_(static_cast<std::size_t>(m) * m * m * m, cplx{}) {}

    int dim() const { return m_; }

    cplx &operator()(int p, int q, int r, int s) { return data_[index(p, q, r, s)]; }
    const cplx &operator()(int p, int q, int r, int s) const { return data_[index(p, q, r, s)]; }

    const std::vector<cplx> &data() const { return data_; }
    std::vector<cplx> &data() { return data_; }

  private:
    std::size_t index(int p, int q, int r, int s) const {
        return ((static_cast<std::size_t>(p) * m_ + q) * m_ + r) * m_ + s;
    }

    int m_ = 0;
    std::vector<cplx> data_;
};

/// Second-quantized Hamiltonian
///   H = offset + sum_pq h1[p,q] c+_p c_q + 1/2 sum_pqrs h2[p,q,r,s] c+_p c+_q c_r c_s
/// over m spin-orbitals. Spin-orbital index is p = 2*site + spin with spin 0 = up.
struct FermionTensors {
    int m = 0;
    CMatrix h1;
    Tensor4 h2;
    double offset = 0.0;

    static FermionTensors zeros(int m) {
        FermionTensors h;
        h.m = m;
        h.h1 = CMatrix::Zero(m, m);
        h.h2 = Tensor4(m);
        return h;
    }

    /// Throws ConsistencyError when a Hermiticity invariant is broken by more than tol.
    void validate(double tol = 1e-12) const {
        if (m <= 0 || m % 2 != 0) {
            throw ConfigError("FermionTensors: spin-orbital count must be positive and even, got " +
                              std::to_string(m));
        }
        if (h1.rows() != m || h1.cols() != m || h2.dim() != m) {
            throw DimensionError("FermionTensors: tensor shapes do not match m");
        }
        for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
                if (std::abs(h1(p, q) - std::conj(h1(q, p))) > tol) {
                    throw ConsistencyError("FermionTensors: h1 is not Hermitian");
                }
            }
        }
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                for (int r = 0; r < m; ++r)
                    for (int s = 0; s < m; ++s)
                        if (std::abs(h2(p, q, r, s) - std::conj(h2(s, r, q, p))) > tol) {
                            throw ConsistencyError("FermionTensors: h2 violates two-body Hermiticity");
                        }
    }
};

enum class Geometry { Chain, SquarePlaquette };

inline std::string to_string(Geometry g) {
    return g == Geometry::Chain ? "chain" : "square-plaquette";
}

inline Geometry geometry_from_string(const std::string &s) {
    if (s == "chain") return Geometry::Chain;
    if (s == "square-plaquette" || s == "square" || s == "plaquette") return Geometry::SquarePlaquette;
    throw ConfigError("unknown geometry '" + s + "' (expected chain | square-plaquette)");
}

/// Fermi-Hubbard model parameters. When mu is unset the half-filling value u/2 is used.
struct HubbardSpec {
    int n_sites = 2;
    double t = 1.0;
    double u = 0.0;
    std::optional<double> mu;
    Geometry geometry = Geometry::Chain;

    double chemical_potential() const { return mu.value_or(u / 2.0); }

    void validate() const {
        if (n_sites != 2 && n_sites != 4) {
            throw ConfigError("HubbardSpec.n_sites: only 2 or 4 sites are supported, got " +
                              std::to_string(n_sites));
        }
        if (geometry == Geometry::SquarePlaquette && n_sites != 4) {
            throw ConfigError("HubbardSpec.geometry: square-plaquette requires n_sites = 4");
        }
        if (!std::isfinite(t) || !std::isfinite(u) || !std::isfinite(chemical_potential())) {
            throw ConfigError("HubbardSpec: t, u and mu must be finite");
        }
    }

    /// Nearest-neighbour bonds (i < j).
    std::vector<std::pair<int, int>> bonds() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i + 1 < n_sites; ++i) out.emplace_back(i, i + 1);
        if (geometry == Geometry::SquarePlaquette) out.emplace_back(0, n_sites - 1);
        return out;
    }
};

inline int spin_orbital(int site, int spin) { return 2 * site + spin; }

inline FermionTensors build_hubbard(const HubbardSpec &spec) {
    spec.validate();
    const int m = 2 * spec.n_sites;
    const double mu = spec.chemical_potential();
    FermionTensors h = FermionTensors::zeros(m);
    for (auto [i, j] : spec.bonds()) {
        for (int s = 0; s < 2; ++s) {
            const int a = spin_orbital(i, s);
            const int b = spin_orbital(j, s);
            h.h1(a, b) += -spec.t;
            h.h1(b, a) += -spec.t;
        }
    }
    for (int i = 0; i < spec.n_sites; ++i) {
        const int up = spin_orbital(i, 0);
        const int dn = spin_orbital(i, 1);
        h.h1(up, up) += -mu;
        h.h1(dn, dn) += -mu;
        // U n_up n_dn = U c+_up c+_dn c_dn c_up, split symmetrically over the 1/2 prefactor.
        h.h2(up, dn, dn, up) += spec.u;
        h.h2(dn, up, up, dn) += spec.u;
    }
    return h;
}

/// Single-particle basis change. Column a of v holds the new mode a expanded in the old modes.
struct OrbitalRotation {
    CMatrix v;

    static OrbitalRotation identity(int m) { return {CMatrix::Identity(m, m)}; }

    int dim() const { return static_cast<int>(v.rows()); }

    void validate(double tol = 1e-10) const {
        if (v.rows() != v.cols()) throw DimensionError("OrbitalRotation: matrix is not square");
        const double dev = (v.adjoint() * v - CMatrix::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff();
        if (dev > tol) throw ConsistencyError("OrbitalRotation: matrix is not unitary");
    }

    /// Rotation equivalent to applying *this and then next.
    OrbitalRotation then(const OrbitalRotation &next) const { return {v * next.v}; }
};

namespace detail {

// out[.., a, ..] = sum_b coef(b, a) * in[.., b, ..] along tensor axis `axis`.
inline Tensor4 transform_axis(const Tensor4 &in, const CMatrix &coef, int axis) {
    const int m = in.dim();
    Tensor4 out(m);
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < m; ++idx[0])
        for (idx[1] = 0; idx[1] < m; ++idx[1])
            for (idx[2] = 0; idx[2] < m; ++idx[2])
                for (idx[3] = 0; idx[3] < m; ++idx[3]) {
                    const cplx x = in(idx[0], idx[1], idx[2], idx[3]);
                    if (x == cplx{}) continue;
                    std::array<int, 4> o = idx;
                    const int b = idx[axis];
                    for (int a = 0; a < m; ++a) {
                        o[axis] = a;
                        out(o[0], o[1], o[2], o[3]) += coef(b, a) * x;
                    }
                }
    return out;
}

} // namespace detail

/// Re-expresses the tensors in the rotated modes c~_a = sum_p v[p,a] c_p:
///   h1'[p,q]      = sum v[p',p] h1[p',q'] conj(v[q',q])
///   h2'[p,q,r,s]  = sum v[p',p] v[q',q] h2[p',q',r',s'] conj(v[r',r]) conj(v[s',s])
/// The many-body spectrum is unchanged.
inline FermionTensors rotate_tensors(const FermionTensors &h, const OrbitalRotation &r) {
    if (r.dim() != h.m || r.v.cols() != h.m) {
        throw DimensionError("rotate_tensors: rotation is " + std::to_string(r.dim()) + "x" +
                             std::to_string(r.v.cols()) + " but tensors have m = " + std::to_string(h.m));
    }
    const CMatrix &v = r.v;
    const CMatrix vc = v.conjugate();
    FermionTensors out;
    out.m = h.m;
    out.offset = h.offset;
    out.h1 = v.transpose() * h.h1 * vc;
    Tensor4 t = detail::transform_axis(h.h2, v, 0);
    t = detail::transform_axis(t, v, 1);
    t = detail::transform_axis(t, vc, 2);
    out.h2 = detail::transform_axis(t, vc, 3);
    return out;
}

} // namespace noavqe
