#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/QR>

#include "json.hpp"
#include "noavqe/noavqe.hpp"

namespace testing_helpers {

using namespace noavqe;

inline const nlohmann::json &golden() {
    static const nlohmann::json g = [] {
        std::ifstream in(std::string(NOAVQE_FIXTURE_DIR) + "/golden.json");
        return nlohmann::json::parse(in);
    }();
    return g;
}

inline FermionTensors hubbard(int n_sites, double u, double t = 1.0) {
    HubbardSpec s;
    s.n_sites = n_sites;
    s.t = t;
    s.u = u;
    if (n_sites == 4) s.geometry = Geometry::SquarePlaquette;
    return build_hubbard(s);
}

inline CMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cplx{g(rng), g(rng)};
    return a;
}

/// Haar-ish unitary from the QR factorization of a complex Gaussian matrix.
inline CMatrix random_unitary(int n, std::mt19937_64 &rng) {
    Eigen::HouseholderQR<CMatrix> qr(random_gaussian(n, n, rng));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

inline QuantumState random_pure(int m, std::mt19937_64 &rng) {
    CVector v = random_gaussian(Eigen::Index{1} << m, 1, rng).col(0);
    return QuantumState::from_amplitudes(v / v.norm());
}

inline QuantumState random_mixed(int m, std::mt19937_64 &rng) {
    const Eigen::Index dim = Eigen::Index{1} << m;
    CMatrix a = random_gaussian(dim, dim, rng);
    CMatrix rho = a * a.adjoint();
    return QuantumState::from_density(rho / rho.trace().real());
}

inline double max_abs_diff(const CMatrix &a, const CMatrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Dense matrix of a bound gate list acting on every basis state.
inline CMatrix circuit_unitary(int m, const std::vector<GateOp> &gates) {
    const Eigen::Index dim = Eigen::Index{1} << m;
    CMatrix u(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        QuantumState s = QuantumState::basis(m, static_cast<std::uint64_t>(k));
        for (const auto &g : gates) apply_gate(s, g, NoiseModel::none());
        u.col(k) = s.amplitudes();
    }
    return u;
}

} // namespace testing_helpers
