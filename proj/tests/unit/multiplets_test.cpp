// Copyright 2026 The ssprep Authors
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

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "core/multiplets.hpp"
#include "core/sampler.hpp"
#include "support/oracles.hpp"

namespace ssprep {
namespace {

// D_J = n(M = J) - n(M = J + 1), with n(M) counted directly over the product basis.
std::map<int, std::uint64_t> counting_oracle(int particles, int two_j) {
    const EnsembleShape shape(particles, two_j);
    std::map<int, std::uint64_t> n;
    for (std::size_t i = 0; i < shape.dim(); ++i)
        ++n[shape.magnetization(i).twice];
    std::map<int, std::uint64_t> d;
    for (int t = shape.j_min().twice; t <= shape.j_max().twice; t += 2) {
        const std::uint64_t above = n.contains(t + 2) ? n[t + 2] : 0;
        if (n[t] > above)
            d[t] = n[t] - above;
    }
    return d;
}

TEST(MultipletCountTest, KnownSingletCounts) {
    EXPECT_EQ(multiplet_counts(EnsembleShape(4, 1)).count(HalfInteger::whole(0)), 2u);
    EXPECT_EQ(multiplet_counts(EnsembleShape(10, 1)).count(HalfInteger::whole(0)), 42u);
    EXPECT_EQ(multiplet_counts(EnsembleShape(3, 1)).count(HalfInteger::whole(0)), 0u);
}

TEST(MultipletCountTest, CatalanDifferenceForEvenQubitCounts) {
    for (int n = 2; n <= 12; n += 2) {
        const auto table = multiplet_counts(EnsembleShape(n, 1));
        for (int twice = 0; twice <= n; twice += 2)
            EXPECT_EQ(table.count(HalfInteger::from_twice(twice)), oracle::qubit_multiplets(n, twice))
                << "N=" << n << " 2J=" << twice;
        EXPECT_EQ(table.state_count(), std::uint64_t{1} << n);
    }
}

TEST(MultipletCountTest, MatchesBasisCountingForHigherSpin) {
    for (auto [n, two_j] : {std::pair{3, 2}, {4, 2}, {5, 2}, {3, 3}, {4, 3}, {6, 2}, {5, 1}, {7, 1}}) {
        const auto table = multiplet_counts(EnsembleShape(n, two_j));
        const auto expected = counting_oracle(n, two_j);
        for (const auto &[twice, count] : expected)
            EXPECT_EQ(table.count(HalfInteger::from_twice(twice)), count) << "N=" << n << " 2j=" << two_j;
        EXPECT_EQ(table.state_count(), EnsembleShape(n, two_j).dim());
    }
}

class SingletBasisTest : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(SingletBasisTest, OrthonormalNullSpaceOfCasimir) {
    const auto [n, two_j] = GetParam();
    const EnsembleShape shape(n, two_j);
    const auto basis = singlet_basis(shape);
    ASSERT_EQ(basis.size(), multiplet_counts(shape).count(HalfInteger::whole(0)));
    const auto c = oracle::casimir(two_j, n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const auto &va = basis.vectors[a].amplitudes();
        EXPECT_LT((c * va).norm(), 1e-9);
        for (std::size_t b = 0; b < basis.size(); ++b)
            EXPECT_NEAR(std::abs(va.dot(basis.vectors[b].amplitudes())), a == b ? 1.0 : 0.0, 1e-10);
    }
}

TEST_P(SingletBasisTest, TotalFidelityIsSingletProjection) {
    const auto [n, two_j] = GetParam();
    const EnsembleShape shape(n, two_j);
    const auto basis = singlet_basis(shape);
    RandomStream rng(3);
    StateVector v(static_cast<Eigen::Index>(shape.dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = Complex(rng.normal(), rng.normal());
    PureState psi(shape, v);
    psi.normalize();
    const auto p0 = oracle::eigenprojector(oracle::casimir(two_j, n), 0.0);
    const double expected = (psi.amplitudes().adjoint() * p0 * psi.amplitudes())(0, 0).real();
    EXPECT_NEAR(fidelities(psi, basis).total, expected, 1e-10);
    EXPECT_NEAR(fidelities(DensityOperator::from_pure(psi), basis).total, expected, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Shapes, SingletBasisTest,
                         ::testing::Values(std::pair{2, 1}, std::pair{4, 1}, std::pair{6, 1}, std::pair{2, 2},
                                           std::pair{3, 2}, std::pair{4, 2}));

TEST(SingletBasisTest, ExplicitFourQubitBasis) {
    using oracle::kron;
    using M = oracle::Matrix;
    const double r = 1.0 / std::sqrt(2.0);
    M up(2, 1), dn(2, 1);
    up << 1, 0;
    dn << 0, 1;
    const M phi_p = r * (kron(up, up) + kron(dn, dn));
    const M phi_m = r * (kron(up, up) - kron(dn, dn));
    const M psi_p = r * (kron(up, dn) + kron(dn, up));
    const M psi_m = r * (kron(up, dn) - kron(dn, up));
    const M s1 = (kron(phi_p, phi_p) - kron(phi_m, phi_m) - kron(psi_p, psi_p)) / std::sqrt(3.0);
    const M s2 = kron(psi_m, psi_m);

    const auto basis = singlet_basis(EnsembleShape(4, 1));
    EXPECT_EQ(basis.provenance, BasisProvenance::explicit_construction);
    ASSERT_EQ(basis.size(), 2u);
    EXPECT_LT((basis.vectors[0].amplitudes() - s1.col(0)).norm(), 1e-12);
    EXPECT_LT((basis.vectors[1].amplitudes() - s2.col(0)).norm(), 1e-12);
    // The explicit basis is orthonormal but S41 is not a product of pair singlets.
    EXPECT_NEAR(std::abs(s1.col(0).dot(s2.col(0))), 0.0, 1e-15);
}

TEST(SingletBasisTest, OddHalfIntegerTotalHasNoSinglets) {
    EXPECT_TRUE(singlet_basis(EnsembleShape(3, 1)).empty());
    EXPECT_TRUE(singlet_basis(EnsembleShape(11, 1)).empty());
}

TEST(SingletFixedPointTest, AlternatingProjectionsLeaveSingletsInvariant) {
    for (int n : {2, 4, 6}) {
        const EnsembleShape shape(n, 1);
        const auto basis = singlet_basis(shape);
        for (const auto &s : basis.vectors) {
            PureState state = s;
            for (int step = 0; step < 20; ++step) {
                const auto basis_kind = step % 2 == 0 ? MeasurementBasis::z : MeasurementBasis::x;
                auto out = apply_projection(state, basis_kind, HalfInteger::whole(0));
                EXPECT_NEAR(out.probability, 1.0, 1e-10);
                state = std::move(out.state);
            }
            EXPECT_NEAR(overlap_fidelity(state, s), 1.0, 1e-10);
        }
    }
}

TEST(SpinLengthTest, NormalizedTotalSpin) {
    const EnsembleShape shape(4, 1);
    EXPECT_NEAR(normalized_total_spin_squared(PureState::basis_state(shape, 0)), 1.0, 1e-12);
    // <J^2> of the mixed state is N j (j + 1) = 3; J_max (J_max + 1) = 6.
    EXPECT_NEAR(normalized_total_spin_squared(DensityOperator::completely_mixed(shape)), 0.5, 1e-12);
    const auto basis = singlet_basis(shape);
    EXPECT_NEAR(normalized_total_spin_squared(basis.vectors[0]), 0.0, 1e-12);
}

}  // namespace
}  // namespace ssprep
