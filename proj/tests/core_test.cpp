// Copyright 2026 The nlamp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlamp/core.hpp"
#include "test_util.hpp"

namespace nlamp {
namespace {

TEST(AnnihilationOp, LadderEntries) {
    const auto a2 = annihilation_op(FockSpace(2));
    EXPECT_DOUBLE_EQ(a2.matrix(0, 1).real(), 1.0);
    EXPECT_EQ(a2.matrix(1, 0), cplx(0.0));

    const auto a8 = annihilation_op(FockSpace(8));
    EXPECT_NEAR(a8.matrix(2, 3).real(), std::sqrt(3.0), 1e-15);
}

TEST(AnnihilationOp, CommutatorHoldsBelowCutoff) {
    const FockSpace s(8);
    const auto a = annihilation_op(s);
    const CMatrix c = commutator(a, a.adjoint()).matrix;
    const CMatrix p = low_level_projector(8, 7);
    EXPECT_LT(max_abs(p * c * p - p), 1e-14);
    // The top level carries the truncation defect -(N-1).
    EXPECT_NEAR(c(7, 7).real(), -7.0, 1e-14);
}

TEST(AnnihilationOp, GuardedCommutatorInvariant) {
    for (int dim : {4, 9, 16, 33}) {
        const auto a = annihilation_op(FockSpace(dim));
        const CMatrix c = commutator(a, a.adjoint()).matrix - CMatrix::Identity(dim, dim);
        EXPECT_LT(guarded_max_abs(c, {dim}), 1e-12) << dim;
    }
}

TEST(FockSpace, RejectsTinyDims) { EXPECT_THROW(FockSpace(1), DimensionMismatch); }

TEST(QuadratureOps, VacuumVarianceAndCommutator) {
    const FockSpace s(12);
    const auto [x, p] = quadrature_ops(s);
    EXPECT_LT(hermiticity_residual(x), 1e-14);
    EXPECT_LT(hermiticity_residual(p), 1e-14);
    const auto vac = vacuum_state(s);
    EXPECT_NEAR(expectation(vac, x * x).real(), 0.5, 1e-15);
    const CMatrix proj = low_level_projector(12, 10);
    EXPECT_LT(max_abs(proj * commutator(x, p).matrix * proj - kI * proj), 1e-14);
}

TEST(MakeState, GaussianMeterWithUnitWidthIsVacuum) {
    const FockSpace s(20);
    EXPECT_GT(fidelity(gaussian_meter_state(s, 1.0), vacuum_state(s)), 1.0 - 1e-10);
}

TEST(MakeState, SqueezedVacuumVariance) {
    const FockSpace s(24);
    const auto sq = make_state(s, state_kind::SqueezedVacuum{0.5, 0.0});
    const auto [x, p] = quadrature_ops(s);
    EXPECT_NEAR(variance(sq, x), std::exp(-1.0) / 2.0, 1e-6);
    EXPECT_NEAR(variance(sq, p), std::exp(1.0) / 2.0, 1e-6);
}

TEST(MakeState, SqueezedVacuumMatchesGeneratorExponential) {
    // Oracle: exp[(r/2)(b^2 e^{-2i phi} - b^dag^2 e^{2i phi})] on a large space, applied to vacuum.
    const int big = 80, small = 24;
    const double r = 0.6, phi = 0.3;
    const FockSpace sb(big);
    const CMatrix b = annihilation_op(sb).matrix;
    const CMatrix gen = 0.5 * r * (std::polar(1.0, -2 * phi) * b * b - std::polar(1.0, 2 * phi) * b.adjoint() * b.adjoint());
    // exp(G) with G anti-Hermitian equals exp(-i H) for H = i G.
    const auto u = unitary_from_generator(Operator(sb, kI * gen), 1.0);
    const CVector oracle = u.matrix.col(0);
    const auto sq = squeezed_vacuum_state(FockSpace(small), r, phi);
    EXPECT_LT(max_abs(sq.ket() - oracle.head(small) / oracle.head(small).norm()), 1e-9);
}

TEST(MakeState, CoherentState) {
    const FockSpace s(24);
    const auto coh = make_state(s, state_kind::Coherent{cplx(1.0, 0.0)});
    EXPECT_NEAR(std::abs(expectation(coh, annihilation_op(s)) - cplx(1.0, 0.0)), 0.0, 1e-10);
    EXPECT_GE(coh.renormalization(), 1.0);
    EXPECT_LT(coh.renormalization() - 1.0, 1e-12);
    EXPECT_FALSE(coh.truncation_warning());
}

TEST(MakeState, TruncationErrorWhenTailTooHeavy) {
    EXPECT_THROW(coherent_state(FockSpace(10), cplx(4.0, 0.0)), TruncationError);
    EXPECT_THROW(squeezed_vacuum_state(FockSpace(20), 2.0), TruncationError);
    EXPECT_THROW(fock_state(FockSpace(4), 4), TruncationError);
    // Warn without failing when the top levels are lightly occupied.
    const auto warm = coherent_state(FockSpace(16), cplx(1.5, 0.0), 1e-3);
    EXPECT_TRUE(warm.truncation_warning());
}

TEST(MakeState, GaussianMeterSecondMoment) {
    const FockSpace s(40);
    const auto [x, p] = quadrature_ops(s);
    for (double eps : {0.6, 1.0, 1.4}) {
        const auto m = gaussian_meter_state(s, eps);
        EXPECT_NEAR(expectation(m, x * x).real(), eps * eps / 2.0, 1e-8) << eps;
    }
}

TEST(StateInvariants, RejectsBadStates) {
    CVector v = CVector::Zero(3);
    v(0) = 1.1;
    EXPECT_THROW(State::from_ket({3}, v), Error);
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 1.5;
    rho(1, 1) = -0.5;
    EXPECT_THROW(State::from_density({2}, rho), Error);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    rho(0, 1) = 0.1;
    EXPECT_THROW(State::from_density({2}, rho), Error);
}

TEST(UnitaryFromGenerator, TrivialCases) {
    const FockSpace s(10);
    const auto zero = Operator(s, CMatrix::Zero(10, 10));
    EXPECT_LT(max_abs(unitary_from_generator(zero, 3.0).matrix - CMatrix::Identity(10, 10)), 1e-15);
    const auto [x, p] = quadrature_ops(s);
    EXPECT_LT(max_abs(unitary_from_generator(x, 0.0).matrix - CMatrix::Identity(10, 10)), 1e-14);
}

TEST(UnitaryFromGenerator, DisplacementIdentity) {
    const int dim = 48;
    const FockSpace s(dim);
    const auto [x, p] = quadrature_ops(s);
    const auto u = unitary_from_generator(x, 1.0);
    // e^{ix} p e^{-ix} = p - 1 on the low levels.
    const CMatrix moved = u.matrix.adjoint() * p.matrix * u.matrix;
    const CMatrix proj = low_level_projector(dim, 12);
    EXPECT_LT(max_abs(proj * (moved - p.matrix + CMatrix::Identity(dim, dim)) * proj), 1e-8);
}

TEST(UnitaryFromGenerator, RejectsNonHermitian) {
    const FockSpace s(6);
    EXPECT_THROW(unitary_from_generator(annihilation_op(s), 1.0), NotHermitian);
}

TEST(UnitaryFromGenerator, UnitarityProperty) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial;
        const auto h = Operator(Dims{n}, testing::random_hermitian(rng, n));
        const auto u = unitary_from_generator(h, 0.1 * trial + 0.3);
        EXPECT_LT(unitarity_residual(u), 1e-10);
    }
}

TEST(QuadratureBasisTest, DiagonalizesTruncatedPosition) {
    for (int dim : {5, 40, 700}) {
        const auto basis = quadrature_basis(dim);
        const RMatrix q = basis->vectors;
        EXPECT_LT(max_abs(q.transpose() * q - RMatrix::Identity(dim, dim)), 1e-11) << dim;
        const auto [x, p] = quadrature_ops(FockSpace(dim));
        const RMatrix rebuilt = q * basis->nodes.asDiagonal() * q.transpose();
        EXPECT_LT(max_abs(rebuilt - x.matrix.real()), 1e-13 * dim) << dim;
    }
}

TEST(QuadratureBasisTest, ShiftMatchesDenseExponential) {
    const int dim = 30;
    const FockSpace s(dim);
    const auto [x, p] = quadrature_ops(s);
    std::mt19937_64 rng(3);
    const CVector v = testing::random_ket(rng, dim, 8);
    const ShiftPropagator prop(quadrature_basis(dim), v);
    for (double shift : {-1.3, 0.0, 0.7, 2.5}) {
        const CVector dense = unitary_from_generator(p, shift).matrix * v;
        EXPECT_LT(max_abs(prop.shifted(shift) - dense), 1e-11) << shift;
    }
}

TEST(QuadratureBasisTest, DisplacedVacuumIsCoherent) {
    const FockSpace s(60);
    const cplx alpha(2.0, 1.0);
    const CVector d = displace(vacuum_state(s).ket(), alpha);
    EXPECT_LT(max_abs(d - coherent_state(s, alpha).ket()), 1e-10);
}

TEST(NormalDecompose, NumberOperator) {
    const FockSpace s(6);
    const auto d = normal_decompose(number_op(s));
    for (int k = 0; k < 6; ++k) {
        EXPECT_NEAR(std::abs(d.eigenvalues(k) - cplx(k, 0.0)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(d.eigenvectors(k, k)), 1.0, 1e-12);
    }
    EXPECT_LT(d.residual, 1e-12);
}

TEST(NormalDecompose, RejectsLadderOperator) {
    EXPECT_THROW(normal_decompose(annihilation_op(FockSpace(8))), NotNormal);
}

TEST(NormalDecompose, PositionSquaredIsPositiveAndInterlaces) {
    const int dim = 16;
    const FockSpace s(dim);
    const CMatrix a = annihilation_op(s).matrix;
    const CMatrix ad = a.adjoint();
    // f_+ = (a^2 + a^dag^2)/2 + a^dag a + 1/2
    const CMatrix fplus = 0.5 * (a * a + ad * ad) + ad * a + 0.5 * CMatrix::Identity(dim, dim);
    const auto d = normal_decompose(Operator(s, fplus));
    for (int k = 0; k < dim; ++k) {
        EXPECT_LT(std::abs(d.eigenvalues(k).imag()), 1e-10);
        EXPECT_GT(d.eigenvalues(k).real(), -1e-8);
    }
    // f_+ differs from x_t^2 by the rank-one (N/2)|N-1><N-1|, so their spectra interlace.
    const auto [x, p] = quadrature_ops(s);
    CMatrix defect = fplus - x.matrix * x.matrix;
    CMatrix expected = CMatrix::Zero(dim, dim);
    expected(dim - 1, dim - 1) = dim / 2.0;
    EXPECT_LT(max_abs(defect - expected), 1e-12);
    const auto basis = quadrature_basis(dim);
    std::vector<double> xsq(basis->nodes.data(), basis->nodes.data() + dim);
    for (auto& v : xsq) v *= v;
    std::sort(xsq.begin(), xsq.end());
    for (int k = 0; k < dim; ++k) {
        EXPECT_GE(d.eigenvalues(k).real(), xsq[k] - 1e-9);
        if (k + 1 < dim) EXPECT_LE(d.eigenvalues(k).real(), xsq[k + 1] + 1e-9);
    }
}

TEST(NormalDecompose, ReconstructionPropertyOnRandomNormals) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 2 + trial;
        const CMatrix u = testing::random_unitary(rng, n);
        CVector vals(n);
        for (int k = 0; k < n; ++k) vals(k) = cplx(nd(rng), nd(rng));
        if (n > 3) vals(1) = vals(0);  // force a degenerate cluster
        const CMatrix f = u * vals.asDiagonal() * u.adjoint();
        const auto d = normal_decompose(Operator(Dims{n}, f));
        EXPECT_LT(d.residual, 1e-9 * std::max(1.0, max_abs(f)));
        EXPECT_LT(max_abs(d.eigenvectors.adjoint() * d.eigenvectors - CMatrix::Identity(n, n)), 1e-10);
    }
}

TEST(NormalDecompose, UnitaryParityPhase) {
    const auto d = normal_decompose(rotation_op(FockSpace(4), kPi / 2));
    EXPECT_NEAR(std::abs(d.eigenvalues(0) - cplx(-1, 0)), 0.0, 1e-12);
    EXPECT_EQ(eigenvalue_clusters(d.eigenvalues).size(), 4u);
}

TEST(SymmetrizedMoment, Examples) {
    const FockSpace s(32);
    const auto a = annihilation_op(s);
    EXPECT_NEAR(symmetrized_moment(vacuum_state(s), a), 0.5, 1e-14);
    EXPECT_NEAR(symmetrized_moment(fock_state(s, 2), number_op(s)), 0.0, 1e-14);
    const auto coh = coherent_state(s, cplx(std::sqrt(2.0), 0.0));
    const auto oracle = testing::poisson_moments(2.0, 200);
    EXPECT_NEAR(symmetrized_moment(coh, number_op(s)), oracle.variance, 1e-6);
    EXPECT_NEAR(oracle.variance, 2.0, 1e-12);
}

TEST(SymmetrizedMoment, NonNegativeAndMatchesVarianceForHermitian) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 6;
        const auto st = State::from_ket({n}, testing::random_ket(rng, n, n));
        const auto op = Operator(Dims{n}, testing::random_matrix(rng, n));
        EXPECT_GE(symmetrized_moment(st, op), 0.0);
        const auto herm = Operator(Dims{n}, testing::random_hermitian(rng, n));
        EXPECT_NEAR(symmetrized_moment(st, herm), variance(st, herm), 1e-12);
    }
}

TEST(Tensor, SwapPartialTraceAndEmbed) {
    const FockSpace s(4);
    const auto ket = tensor({fock_state(s, 2), fock_state(s, 0)});
    const auto swap = cv_swap({4, 4}, 0, 1);
    const CVector swapped = swap.matrix * ket.ket();
    EXPECT_LT(max_abs(swapped - tensor({fock_state(s, 0), fock_state(s, 2)}).ket()), 1e-15);
    EXPECT_LT(max_abs(swap.matrix * swap.matrix - CMatrix::Identity(16, 16)), 1e-15);
    EXPECT_THROW(cv_swap({3, 4}, 0, 1), DimensionMismatch);

    const auto coh = coherent_state(FockSpace(5), cplx(0.3, 0.2), 1e-3);
    const auto sq = squeezed_vacuum_state(FockSpace(6), 0.2, 0.0, 1e-4);
    const auto prod = tensor({coh, sq});
    EXPECT_LT(max_abs(partial_trace(prod, {0}).density() - coh.density()), 1e-14);
    EXPECT_LT(max_abs(partial_trace(prod, {1}).density() - sq.density()), 1e-14);
    const auto mixed = State::from_density(prod.dims(), prod.density());
    EXPECT_LT(max_abs(partial_trace(mixed, {1}).density() - sq.density()), 1e-14);

    const auto a6 = annihilation_op(FockSpace(6));
    const auto ea = embed(a6, 0, {6, 6});
    const auto eb = embed(a6, 1, {6, 6});
    EXPECT_LT(max_abs(commutator(ea, eb).matrix), 1e-15);
    EXPECT_LT(max_abs(commutator(ea, eb.adjoint()).matrix), 1e-15);
}

TEST(Tensor, ApplyOnSlotMatchesEmbedding) {
    std::mt19937_64 rng(2);
    const Dims dims{3, 4, 5};
    const CVector v = testing::random_ket(rng, 60, 60);
    for (std::size_t slot = 0; slot < 3; ++slot) {
        const auto op = Operator(Dims{dims[slot]}, testing::random_matrix(rng, dims[slot]));
        EXPECT_LT(max_abs(apply_on_slot(op.matrix, slot, dims, v) - embed(op, slot, dims).matrix * v), 1e-12);
    }
}

TEST(Hermite, LowOrderClosedForms) {
    for (double x : {-2.0, -0.3, 0.0, 1.1, 3.7}) {
        const RVector h = hermite_functions(3, x);
        const double h0 = std::pow(kPi, -0.25) * std::exp(-x * x / 2);
        EXPECT_NEAR(h(0), h0, 1e-15);
        EXPECT_NEAR(h(1), std::sqrt(2.0) * x * h0, 1e-15);
        EXPECT_NEAR(h(2), (2 * x * x - 1) / std::sqrt(2.0) * h0, 1e-14);
    }
}

TEST(Hermite, HighOrderStaysNormalized) {
    // h_1000 reaches past |x| = 40 where e^{-x^2/2} alone underflows.
    const auto grid = uniform_grid(-50.0, 50.0, 0.01);
    double norm = 0.0;
    for (double x : grid) norm += std::pow(hermite_functions(1001, x)(1000), 2) * 0.01;
    EXPECT_NEAR(norm, 1.0, 1e-6);
    EXPECT_GT(std::abs(hermite_functions(1001, 40.0)(1000)), 1e-3);
}

TEST(QuadratureAmplitudes, Examples) {
    const FockSpace s(24);
    const std::vector<double> zero{0.0};
    EXPECT_NEAR(quadrature_amplitudes(vacuum_state(s), zero)[0].real(), std::pow(kPi, -0.25), 1e-15);
    EXPECT_NEAR(std::abs(quadrature_amplitudes(fock_state(s, 1), zero)[0]), 0.0, 1e-15);

    const auto grid = uniform_grid(-3.0, 3.0, 0.05);
    for (double eps : {0.8, 1.0, 1.25}) {
        const auto amp = quadrature_amplitudes(gaussian_meter_state(s, eps), grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double x = grid[k];
            const double exact = std::exp(-x * x / (eps * eps)) / std::sqrt(kPi * eps * eps);
            worst = std::max(worst, std::abs(std::norm(amp[k]) - exact));
        }
        EXPECT_LT(worst, 1e-6) << eps;
    }
}

TEST(QuadratureAmplitudes, NormalizationProperty) {
    const int dim = 24;
    const FockSpace s(dim);
    const auto grid = uniform_grid(-8.0, 8.0, 0.01);
    std::vector<State> states{vacuum_state(s), fock_state(s, 3), fock_state(s, 6), coherent_state(s, cplx(1.2, -1.0)),
                              squeezed_vacuum_state(s, 0.4)};
    std::mt19937_64 rng(9);
    states.push_back(State::from_ket({dim}, testing::random_ket(rng, dim, 5)));
    for (const auto& st : states) {
        const auto amp = quadrature_amplitudes(st, grid);
        double total = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double w = (k == 0 || k + 1 == grid.size()) ? 0.005 : 0.01;
            total += w * std::norm(amp[k]);
        }
        EXPECT_NEAR(total, 1.0, 1e-6);
        // Mixed path returns the same density.
        const auto dens = quadrature_amplitudes(State::from_density(st.dims(), st.density()), grid);
        EXPECT_NEAR(dens[400].real(), std::norm(amp[400]), 1e-12);
    }
}

TEST(QuadratureDensity, CompositeSlotMatchesReducedState) {
    const auto prod = tensor({coherent_state(FockSpace(6), cplx(0.4, 0.1), 1e-3), squeezed_vacuum_state(FockSpace(14), 0.3)});
    const auto grid = uniform_grid(-3.0, 3.0, 0.5);
    const RVector q = quadrature_density(prod, 1, grid);
    const auto reduced = quadrature_amplitudes(partial_trace(prod, {1}), grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(q(static_cast<Eigen::Index>(k)), reduced[k].real(), 1e-13);
}

}  // namespace
}  // namespace nlamp
