#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace noavqe;
using namespace testing_helpers;

namespace {

OrbitalRotation bonding_rotation() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix v = CMatrix::Zero(4, 4);
    for (int spin = 0; spin < 2; ++spin) {
        const int a = spin_orbital(0, spin), b = spin_orbital(1, spin);
        v(a, spin) = s;
        v(b, spin) = s;
        v(a, 2 + spin) = s;
        v(b, 2 + spin) = -s;
    }
    return {v};
}

} // namespace

TEST(BuildHubbard, NoninteractingDimerHasOnlyHopping) {
    HubbardSpec s;
    s.n_sites = 2;
    s.u = 0.0;
    const FermionTensors h = build_hubbard(s);
    EXPECT_EQ(h.m, 4);
    for (const cplx &x : h.h2.data()) EXPECT_EQ(x, cplx{});
    for (int spin = 0; spin < 2; ++spin) {
        const int a = spin_orbital(0, spin), b = spin_orbital(1, spin);
        EXPECT_EQ(h.h1(a, a), cplx{});
        EXPECT_EQ(h.h1(b, b), cplx{});
        EXPECT_EQ(h.h1(a, b), cplx(-1.0));
        EXPECT_EQ(h.h1(b, a), cplx(-1.0));
    }
    EXPECT_EQ(h.h1(0, 1), cplx{});
    EXPECT_EQ(h.offset, 0.0);
}

TEST(BuildHubbard, HalfFillingChemicalPotentialDefault) {
    HubbardSpec s;
    s.u = 1.0;
    EXPECT_DOUBLE_EQ(s.chemical_potential(), 0.5);
    const FermionTensors h = build_hubbard(s);
    for (int p = 0; p < h.m; ++p) EXPECT_DOUBLE_EQ(h.h1(p, p).real(), -0.5);
    s.mu = 0.2;
    EXPECT_DOUBLE_EQ(build_hubbard(s).h1(0, 0).real(), -0.2);
}

TEST(BuildHubbard, DimerGroundEnergyMatchesClosedForm) {
    const double e0 = oracle::ground_energy(hubbard(2, 1.0));
    EXPECT_NEAR(e0, (1.0 - std::sqrt(17.0)) / 2.0 - 1.0, 1e-9);
    EXPECT_NEAR(e0, golden()["ground_energy"]["dimer_u1"].get<double>(), 1e-9);
}

TEST(BuildHubbard, PlaquetteSitesHaveTwoNeighbours) {
    const FermionTensors h = hubbard(4, 1.0);
    for (int site = 0; site < 4; ++site) {
        int neighbours = 0;
        for (int other = 0; other < 4; ++other)
            if (other != site && h.h1(spin_orbital(site, 0), spin_orbital(other, 0)) != cplx{}) ++neighbours;
        EXPECT_EQ(neighbours, 2) << "site " << site;
    }
    EXPECT_NEAR(oracle::ground_energy(h), golden()["ground_energy"]["plaquette_u1"].get<double>(), 1e-9);
}

TEST(BuildHubbard, InteractionReproducesDoubleOccupancyEnergy) {
    const FermionTensors h = hubbard(2, 3.0);
    // |up, down> on site 0: U n_up n_down - mu (n_up + n_down) = 3 - 1.5 * 2.
    const CMatrix op = oracle::assemble_fermionic(h);
    const Eigen::Index idx = (1 << spin_orbital(0, 0)) | (1 << spin_orbital(0, 1));
    EXPECT_NEAR(op(idx, idx).real(), 0.0, 1e-12);
    const Eigen::Index single = 1 << spin_orbital(1, 1);
    EXPECT_NEAR(op(single, single).real(), -1.5, 1e-12);
}

TEST(BuildHubbard, RejectsUnsupportedModels) {
    HubbardSpec s;
    s.n_sites = 3;
    EXPECT_THROW(build_hubbard(s), ConfigError);
    s.n_sites = 2;
    s.geometry = Geometry::SquarePlaquette;
    EXPECT_THROW(build_hubbard(s), ConfigError);
    s.geometry = Geometry::Chain;
    s.u = std::nan("");
    EXPECT_THROW(build_hubbard(s), ConfigError);
}

TEST(BuildHubbard, TensorsSatisfyHermiticity) {
    for (int n : {2, 4})
        for (double u : {0.0, 1.0, 4.0}) EXPECT_NO_THROW(hubbard(n, u).validate());
}

TEST(FermionTensors, ValidateRejectsNonHermitian) {
    FermionTensors h = FermionTensors::zeros(2);
    h.h1(0, 1) = 1.0;
    EXPECT_THROW(h.validate(), ConsistencyError);
    FermionTensors odd = FermionTensors::zeros(3);
    EXPECT_THROW(odd.validate(), ConfigError);
}

TEST(RotateTensors, IdentityLeavesTensorsUnchanged) {
    const FermionTensors h = hubbard(2, 1.0);
    const FermionTensors r = rotate_tensors(h, OrbitalRotation::identity(4));
    EXPECT_LT(max_abs_diff(r.h1, h.h1), 1e-15);
    for (std::size_t i = 0; i < h.h2.data().size(); ++i) EXPECT_LT(std::abs(r.h2.data()[i] - h.h2.data()[i]), 1e-15);
    EXPECT_EQ(r.offset, h.offset);
}

TEST(RotateTensors, BondingBasisDiagonalizesFreeDimer) {
    HubbardSpec s;
    s.u = 0.0;
    s.mu = 0.3;
    const FermionTensors r = rotate_tensors(build_hubbard(s), bonding_rotation());
    CMatrix expected = CMatrix::Zero(4, 4);
    expected.diagonal() << -1.3, -1.3, 0.7, 0.7;
    EXPECT_LT(max_abs_diff(r.h1, expected), 1e-12);
}

TEST(RotateTensors, SpectrumInvariantUnderRandomRotations) {
    std::mt19937_64 rng(11);
    for (int n : {2, 4}) {
        const FermionTensors h = hubbard(n, 1.0);
        const RVector before = oracle::spectrum(oracle::assemble_fermionic(h));
        for (int trial = 0; trial < 3; ++trial) {
            const FermionTensors r = rotate_tensors(h, {random_unitary(h.m, rng)});
            EXPECT_NO_THROW(r.validate(1e-10));
            const RVector after = oracle::spectrum(oracle::assemble_fermionic(r));
            EXPECT_LT((after - before).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(RotateTensors, ComposesAsMatrixProduct) {
    std::mt19937_64 rng(12);
    const FermionTensors h = hubbard(2, 1.0);
    const OrbitalRotation r1{random_unitary(4, rng)}, r2{random_unitary(4, rng)};
    const FermionTensors a = rotate_tensors(rotate_tensors(h, r1), r2);
    const FermionTensors b = rotate_tensors(h, r1.then(r2));
    EXPECT_LT(max_abs_diff(a.h1, b.h1), 1e-10);
    for (std::size_t i = 0; i < a.h2.data().size(); ++i) EXPECT_LT(std::abs(a.h2.data()[i] - b.h2.data()[i]), 1e-10);
}

TEST(RotateTensors, DimensionMismatchThrows) {
    EXPECT_THROW(rotate_tensors(hubbard(2, 1.0), OrbitalRotation::identity(8)), DimensionError);
}

TEST(OrbitalRotation, ValidateDetectsNonUnitary) {
    OrbitalRotation r = OrbitalRotation::identity(4);
    EXPECT_NO_THROW(r.validate());
    r.v(0, 0) = 2.0;
    EXPECT_THROW(r.validate(), ConsistencyError);
}
