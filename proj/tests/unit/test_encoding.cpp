#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "helpers.hpp"

using namespace noavqe;
using namespace testing_helpers;

namespace {

std::map<std::string, double> as_map(const PauliSum &p) {
    std::map<std::string, double> out;
    for (const auto &t : p.terms) out[t.string.str()] = t.coeff;
    return out;
}

FermionTensors random_tensors(int m, std::mt19937_64 &rng) {
    FermionTensors h = FermionTensors::zeros(m);
    const CMatrix a = random_gaussian(m, m, rng);
    h.h1 = 0.5 * (a + a.adjoint());
    std::normal_distribution<double> g;
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) {
                    const cplx x{g(rng), g(rng)};
                    h.h2(p, q, r, s) += x;
                    h.h2(s, r, q, p) += std::conj(x);
                }
    h.offset = 0.3;
    return h;
}

} // namespace

TEST(PauliString, ParseAndPrintRoundTrip) {
    const PauliString p = PauliString::parse("XZYI");
    EXPECT_EQ(p.str(), "XZYI");
    EXPECT_EQ(p.letter(0), 'X');
    EXPECT_EQ(p.letter(2), 'Y');
    EXPECT_EQ(p.weight(), 3);
    EXPECT_THROW(PauliString::parse("XQ"), ConfigError);
}

TEST(PauliString, MultiplicationPhases) {
    auto [ph, pc] = multiply(PauliString::parse("X"), PauliString::parse("Y"));
    EXPECT_EQ(pc.str(), "Z");
    EXPECT_EQ(ph, cplx(0.0, 1.0));
    auto [ph2, pc2] = multiply(PauliString::parse("YX"), PauliString::parse("XY"));
    EXPECT_EQ(pc2.str(), "ZZ");
    EXPECT_EQ(ph2, cplx(1.0, 0.0));
    EXPECT_TRUE(PauliString::parse("XX").commutes_with(PauliString::parse("YY")));
    EXPECT_FALSE(PauliString::parse("XI").commutes_with(PauliString::parse("ZZ")));
}

TEST(JordanWigner, ZeroTensorsGiveEmptySum) {
    const PauliSum p = jordan_wigner(FermionTensors::zeros(4));
    EXPECT_TRUE(p.empty());
    EXPECT_EQ(p.offset, 0.0);
}

TEST(JordanWigner, DimerTermsMatchGoldenFixture) {
    const PauliSum p = jordan_wigner(hubbard(2, 1.0));
    const auto &g = golden()["jordan_wigner_dimer_u1"];
    ASSERT_EQ(p.size(), g["terms"].size());
    const auto got = as_map(p);
    for (const auto &t : g["terms"]) {
        const std::string s = t[1].get<std::string>();
        ASSERT_TRUE(got.count(s)) << s;
        EXPECT_EQ(got.at(s), t[0].get<double>()) << s;
    }
    EXPECT_EQ(p.offset, g["offset"].get<double>());
    EXPECT_EQ(one_norm(p), 2.5);
}

TEST(JordanWigner, SingleHoppingTerm) {
    const double t = 0.7;
    FermionTensors h = FermionTensors::zeros(2);
    h.h1(0, 1) = -t;
    h.h1(1, 0) = -t;
    const auto got = as_map(jordan_wigner(h));
    ASSERT_EQ(got.size(), 2u);
    EXPECT_NEAR(got.at("XX"), -t / 2, 1e-15);
    EXPECT_NEAR(got.at("YY"), -t / 2, 1e-15);
}

TEST(JordanWigner, NoDuplicateOrIdentityTerms) {
    std::mt19937_64 rng(3);
    const PauliSum p = jordan_wigner(random_tensors(4, rng));
    std::map<std::string, int> seen;
    for (const auto &t : p.terms) {
        EXPECT_FALSE(t.string.is_identity());
        EXPECT_GE(std::abs(t.coeff), kPruneThreshold);
        EXPECT_EQ(++seen[t.string.str()], 1);
    }
}

TEST(JordanWigner, DenseOperatorMatchesFermionicAlgebra) {
    std::mt19937_64 rng(4);
    for (int m : {2, 4}) {
        const FermionTensors h = random_tensors(m, rng);
        EXPECT_LT(max_abs_diff(oracle::assemble_pauli(jordan_wigner(h)), oracle::assemble_fermionic(h)), 1e-10);
    }
}

TEST(JordanWigner, NonHermitianInputIsAConsistencyError) {
    FermionTensors h = FermionTensors::zeros(2);
    h.h1(0, 1) = cplx{0.0, 1.0};
    h.h1(1, 0) = cplx{0.0, 1.0};
    EXPECT_THROW(jordan_wigner(h), ConsistencyError);
}

TEST(OneNorm, EmptyAndDimer) {
    EXPECT_EQ(one_norm(PauliSum{}), 0.0);
    EXPECT_TRUE(weight_distribution(PauliSum{}).empty());
    const std::vector<double> w = weight_distribution(jordan_wigner(hubbard(2, 1.0)));
    EXPECT_EQ(w, (std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.25, 0.25}));
}

TEST(OneNorm, IdentityOffsetExcluded) {
    PauliSum p;
    p.m = 1;
    p.offset = 10.0;
    p.terms.push_back({-0.5, PauliString::parse("Z")});
    EXPECT_EQ(one_norm(p), 0.5);
}

TEST(OneNorm, ExactNaturalOrbitalBasisIsConcentrated) {
    const FermionTensors h = hubbard(2, 1.0);
    const auto gs = oracle::exact_ground_state(oracle::assemble_fermionic(h));
    const NaturalOrbitals no = natural_orbital_transform({oracle::exact_1rdm(gs.state)});
    const OrbitalRotation r = arrange_orbitals(no, orbital_slots(4, build_fsim(4).occupied));
    const PauliSum p = jordan_wigner(rotate_tensors(h, r));
    const auto &g = golden()["dimer_u1_exact_no_basis"];
    EXPECT_EQ(p.size(), g["term_count"].get<std::size_t>());
    EXPECT_NEAR(one_norm(p), g["one_norm"].get<double>(), 1e-10);
    const std::vector<double> w = weight_distribution(p);
    const double top6 = std::accumulate(w.begin(), w.begin() + 6, 0.0) / one_norm(p);
    EXPECT_NEAR(top6, g["top6_fraction"].get<double>(), 1e-10);
    EXPECT_GE(top6, 0.7);
    EXPECT_GT(one_norm(p), 2.5);
    EXPECT_LE(one_norm(p), 2.0 * 2.5 * 1.25);
    EXPECT_TRUE(std::is_sorted(w.begin(), w.end(), std::greater<>()));
}

TEST(OneNorm, ContinuousUnderSmallRotations) {
    const FermionTensors h = hubbard(2, 1.0);
    const double base = one_norm(jordan_wigner(h));
    std::mt19937_64 rng(5);
    const CMatrix a = random_gaussian(4, 4, rng);
    const CMatrix gen = 0.5 * (a - a.adjoint());
    for (double eps : {1e-3, 1e-4}) {
        CMatrix v = CMatrix::Identity(4, 4) + eps * gen;
        Eigen::HouseholderQR<CMatrix> qr(v);
        CMatrix q = qr.householderQ() * CMatrix::Identity(4, 4);
        // Undo the sign freedom of QR so q stays near the identity.
        for (int j = 0; j < 4; ++j) q.col(j) *= std::abs(q(j, j)) / q(j, j);
        const double delta = std::abs(one_norm(jordan_wigner(rotate_tensors(h, {q}))) - base);
        EXPECT_LT(delta, 200.0 * eps);
    }
}

TEST(Bilinear, NumberOperator) {
    const BilinearObservables b = expectation_pauli_of_bilinear(0, 0, 2);
    EXPECT_DOUBLE_EQ(b.real_part.offset, 0.5);
    ASSERT_EQ(b.real_part.size(), 1u);
    EXPECT_EQ(b.real_part.terms[0].string.str(), "ZI");
    EXPECT_DOUBLE_EQ(b.real_part.terms[0].coeff, -0.5);
    EXPECT_TRUE(b.imag_part.empty());
    EXPECT_EQ(b.imag_part.offset, 0.0);
}

TEST(Bilinear, NeighbourHopping) {
    const BilinearObservables b = expectation_pauli_of_bilinear(0, 1, 2);
    const auto re = as_map(b.real_part), im = as_map(b.imag_part);
    ASSERT_EQ(re.size(), 2u);
    EXPECT_DOUBLE_EQ(re.at("XX"), 0.25);
    EXPECT_DOUBLE_EQ(re.at("YY"), 0.25);
    ASSERT_EQ(im.size(), 2u);
    EXPECT_DOUBLE_EQ(im.at("XY"), -im.at("YX"));
    EXPECT_DOUBLE_EQ(std::abs(im.at("XY")), 0.25);
}

TEST(Bilinear, ImaginaryPartIsAntisymmetric) {
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
            const auto a = as_map(expectation_pauli_of_bilinear(p, q, 4).imag_part);
            const auto b = as_map(expectation_pauli_of_bilinear(q, p, 4).imag_part);
            ASSERT_EQ(a.size(), b.size());
            for (const auto &[s, c] : a) EXPECT_DOUBLE_EQ(c, -b.at(s));
        }
}

TEST(Bilinear, ReproducesOracleOneRdm) {
    std::mt19937_64 rng(6);
    const QuantumState s = random_pure(4, rng);
    const CMatrix exact = oracle::exact_1rdm(s);
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
            const BilinearObservables b = expectation_pauli_of_bilinear(p, q, 4);
            const cplx v{expectation(s, b.real_part), expectation(s, b.imag_part)};
            EXPECT_LT(std::abs(v - exact(p, q)), 1e-12);
        }
}

TEST(Bilinear, OutOfRangeIndexThrows) {
    EXPECT_THROW(expectation_pauli_of_bilinear(0, 4, 4), DimensionError);
}

TEST(Commutator, SingleQubitPair) {
    PauliSum z;
    z.m = 1;
    z.terms.push_back({1.0, PauliString::parse("Z")});
    // i[Z, X] = i * 2iY = -2Y.
    const PauliSum c = commutator_i(z, {{1.0, PauliString::parse("X")}});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.terms[0].string.str(), "Y");
    EXPECT_DOUBLE_EQ(c.terms[0].coeff, -2.0);
    EXPECT_TRUE(commutator_i(z, {{1.0, PauliString::parse("Z")}}).empty());
}
