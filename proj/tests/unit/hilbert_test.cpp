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
#include <numbers>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/hilbert.hpp"
#include "core/sampler.hpp"
#include "support/oracles.hpp"

namespace ssprep {
namespace {

double max_abs(const DenseMatrix &m) {
    return m.cwiseAbs().maxCoeff();
}

PureState random_state(const EnsembleShape &shape, std::uint64_t seed) {
    RandomStream rng(seed);
    StateVector v(static_cast<Eigen::Index>(shape.dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = Complex(rng.normal(), rng.normal());
    PureState s(shape, v);
    s.normalize();
    return s;
}

TEST(HalfIntegerTest, ParsesAndPrints) {
    EXPECT_EQ(HalfInteger::parse("1/2").twice, 1);
    EXPECT_EQ(HalfInteger::parse("-3/2").twice, -3);
    EXPECT_EQ(HalfInteger::parse("1.5").twice, 3);
    EXPECT_EQ(HalfInteger::parse("2").twice, 4);
    EXPECT_EQ(HalfInteger::from_twice(-3).to_string(), "-3/2");
    EXPECT_EQ(HalfInteger::whole(2).to_string(), "2");
    EXPECT_THROW(HalfInteger::parse("1/3"), Error);
    EXPECT_THROW(HalfInteger::parse("0.3"), Error);
    EXPECT_THROW(HalfInteger::parse(""), Error);
}

TEST(EnsembleShapeTest, DimensionAndCap) {
    EXPECT_EQ(EnsembleShape(4, 1).dim(), 16u);
    EXPECT_EQ(EnsembleShape(3, 2).dim(), 27u);
    EXPECT_EQ(EnsembleShape(16, 1).dim(), 65536u);
    EXPECT_THROW(EnsembleShape(17, 1), Error);
    // 11 spin-1 particles: 11 log2(3) = 17.4 qubit-equivalents.
    EXPECT_THROW(EnsembleShape(11, 2), Error);
    EXPECT_NO_THROW(EnsembleShape(11, 2, 18.0));
    EXPECT_THROW(EnsembleShape(0, 1), Error);
    EXPECT_THROW(EnsembleShape(2, 0), Error);
}

TEST(EnsembleShapeTest, MagnetizationBlocks) {
    const EnsembleShape shape(4, 1);
    EXPECT_EQ(shape.j_max().twice, 4);
    EXPECT_EQ(shape.magnetization_count(), 5u);
    EXPECT_EQ(shape.magnetization(0).twice, 4);    // all up
    EXPECT_EQ(shape.magnetization(15).twice, -4);  // all down
    EXPECT_EQ(shape.block(HalfInteger::whole(0)).size(), 6u);
    EXPECT_TRUE(shape.block(HalfInteger::from_twice(1)).empty());
    EXPECT_FALSE(shape.magnetization_slot(HalfInteger::from_twice(1)).has_value());
    const EnsembleShape odd(3, 1);
    EXPECT_EQ(odd.j_min().twice, 1);
    EXPECT_EQ(odd.block(HalfInteger::from_twice(-1)).size(), 3u);
}

TEST(SubensembleMaskTest, Validates) {
    const EnsembleShape shape(4, 1);
    EXPECT_THROW(SubensembleMask(shape, {0, 0}), Error);
    EXPECT_THROW(SubensembleMask(shape, {4}), Error);
    const SubensembleMask m(shape, {3, 1});
    EXPECT_EQ(m.members()[0], 1);
    EXPECT_TRUE(m.contains(3));
    EXPECT_EQ(SubensembleMask::first_half(shape).size(), 2u);
    EXPECT_EQ(SubensembleMask::first_half(EnsembleShape(5, 1)).size(), 2u);
}

struct ShapeCase {
    int particles;
    int two_j;
};

class CollectiveOperatorTest : public ::testing::TestWithParam<ShapeCase> {};

TEST_P(CollectiveOperatorTest, MatchesKroneckerOracle) {
    const auto [n, two_j] = GetParam();
    const EnsembleShape shape(n, two_j);
    for (auto [kind, axis] : {std::pair{ObservableKind::x, 'x'}, {ObservableKind::y, 'y'}, {ObservableKind::z, 'z'}})
        EXPECT_LT(max_abs(build_observable(shape, kind).dense() - oracle::collective(two_j, n, axis)), 1e-12);
    EXPECT_LT(max_abs(build_observable(shape, ObservableKind::casimir).dense() - oracle::casimir(two_j, n)), 1e-11);
}

TEST_P(CollectiveOperatorTest, CommutationRelations) {
    const auto [n, two_j] = GetParam();
    const EnsembleShape shape(n, two_j);
    const DenseMatrix x = build_observable(shape, ObservableKind::x).dense();
    const DenseMatrix y = build_observable(shape, ObservableKind::y).dense();
    const DenseMatrix z = build_observable(shape, ObservableKind::z).dense();
    EXPECT_LT(max_abs(x * y - y * x - Complex(0, 1) * z), 1e-11);
    const DenseMatrix c = build_observable(shape, ObservableKind::casimir).dense();
    EXPECT_LT(max_abs(c * z - z * c), 1e-10);
}

TEST_P(CollectiveOperatorTest, ProjectorsMatchSpectralOracle) {
    const auto [n, two_j] = GetParam();
    const EnsembleShape shape(n, two_j);
    const auto x = oracle::collective(two_j, n, 'x');
    const auto z = oracle::collective(two_j, n, 'z');
    DenseMatrix sum_z = DenseMatrix::Zero(static_cast<Eigen::Index>(shape.dim()), static_cast<Eigen::Index>(shape.dim()));
    DenseMatrix sum_x = sum_z;
    for (auto m : shape.magnetization_values()) {
        const DenseMatrix pz = projector(shape, MeasurementBasis::z, m);
        const DenseMatrix px = projector(shape, MeasurementBasis::x, m);
        EXPECT_LT(max_abs(pz - oracle::eigenprojector(z, m.value())), 1e-10);
        EXPECT_LT(max_abs(px - oracle::eigenprojector(x, m.value())), 1e-9);
        EXPECT_LT(max_abs(px * px - px), 1e-10);
        sum_z += pz;
        sum_x += px;
    }
    const auto id = DenseMatrix::Identity(sum_z.rows(), sum_z.cols());
    EXPECT_LT(max_abs(sum_z - id), 1e-12);
    EXPECT_LT(max_abs(sum_x - id), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Shapes, CollectiveOperatorTest,
                         ::testing::Values(ShapeCase{2, 1}, ShapeCase{3, 1}, ShapeCase{4, 1}, ShapeCase{2, 2},
                                           ShapeCase{3, 2}, ShapeCase{2, 3}));

TEST(LocalRotationTest, MatchesMatrixExponential) {
    for (int two_j : {1, 2, 3}) {
        for (auto [axis, name] : {std::pair{Axis::x, 'x'}, {Axis::y, 'y'}, {Axis::z, 'z'}}) {
            const double theta = 0.7318;
            EXPECT_LT(max_abs(local_rotation(two_j, axis, theta) - oracle::rotation(oracle::spin(two_j, name), theta)),
                      1e-12);
        }
    }
}

TEST(ApplyLocalTest, PureAndDensityMatchOracle) {
    const EnsembleShape shape(3, 2);
    const auto psi = random_state(shape, 11);
    const std::vector<int> sites{0, 2};
    const double theta = 1.234;
    oracle::Matrix u = oracle::Matrix::Identity(27, 27);
    for (int s : sites)
        u = oracle::embed(oracle::rotation(oracle::spin(2, 'y'), theta), s, 3) * u;

    PureState moved = psi;
    apply_rotation(moved, Axis::y, SubensembleMask(shape, sites), theta);
    EXPECT_LT((moved.amplitudes() - u * psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);

    DensityOperator rho = DensityOperator::from_pure(psi);
    apply_rotation(rho, Axis::y, SubensembleMask(shape, sites), theta);
    const DenseMatrix expected = u * psi.amplitudes() * psi.amplitudes().adjoint() * u.adjoint();
    EXPECT_LT(max_abs(rho.matrix() - expected), 1e-12);
}

TEST(MeasurementTest, MixedStateWeightsAreBinomial) {
    // Completely mixed N=4: P(m) = C(4, 2 - m) / 16 in either basis.
    const EnsembleShape shape(4, 1);
    const auto rho = DensityOperator::completely_mixed(shape);
    for (auto basis : {MeasurementBasis::z, MeasurementBasis::x}) {
        const auto w = outcome_weights(rho, basis);
        const auto ms = shape.magnetization_values();
        for (std::size_t i = 0; i < ms.size(); ++i)
            EXPECT_NEAR(w[i], oracle::binomial(4, 2 - ms[i].twice / 2) / 16.0, 1e-12);
    }
}

TEST(MeasurementTest, ProjectionMatchesDenseProjector) {
    const EnsembleShape shape(4, 1);
    const auto psi = random_state(shape, 5);
    for (auto basis : {MeasurementBasis::z, MeasurementBasis::x}) {
        const auto p = projector(shape, basis, HalfInteger::whole(1));
        const StateVector expected = p * psi.amplitudes();
        const auto out = apply_projection(psi, basis, HalfInteger::whole(1));
        EXPECT_NEAR(out.probability, expected.squaredNorm(), 1e-12);
        EXPECT_LT((out.state.amplitudes() - expected / expected.norm()).cwiseAbs().maxCoeff(), 1e-10);

        const auto rho = DensityOperator::from_pure(psi);
        const auto out_rho = apply_projection(rho, basis, HalfInteger::whole(1));
        EXPECT_NEAR(out_rho.probability, out.probability, 1e-12);
        EXPECT_NEAR(out_rho.state.trace(), 1.0, 1e-12);
    }
}

TEST(MeasurementTest, ImpossibleOutcomeLeavesStateUntouched) {
    const EnsembleShape shape(4, 1);
    PureState up = PureState::basis_state(shape, 0);
    const PureState before = up;
    try {
        project_z(up, HalfInteger::whole(0));
        FAIL() << "expected impossible_outcome";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::impossible_outcome);
    }
    EXPECT_EQ(up.amplitudes(), before.amplitudes());
    EXPECT_NEAR(project_z(up, HalfInteger::whole(2)), 1.0, 1e-15);
}

TEST(MeasurementTest, XFrameRoundTrip) {
    const EnsembleShape shape(3, 1);
    auto psi = random_state(shape, 9);
    const auto before = psi;
    to_x_frame(psi);
    // In the frame, the x-basis weights of the original become z weights.
    const auto zw = magnetization_weights(psi);
    const auto xw = outcome_weights(before, MeasurementBasis::x);
    for (std::size_t i = 0; i < zw.size(); ++i)
        EXPECT_NEAR(zw[i], xw[i], 1e-12);
    from_x_frame(psi);
    EXPECT_LT((psi.amplitudes() - before.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ObservableTest, VarianceAndExpectation) {
    const EnsembleShape shape(4, 1);
    const auto up = PureState::basis_state(shape, 0);
    EXPECT_NEAR(expectation(up, build_observable(shape, ObservableKind::z)), 2.0, 1e-14);
    EXPECT_NEAR(variance(up, Axis::z), 0.0, 1e-14);
    EXPECT_NEAR(variance(up, Axis::x), 1.0, 1e-12);  // N j / 2
    const auto rho = DensityOperator::completely_mixed(shape);
    EXPECT_NEAR(variance(rho, Axis::y), 1.0, 1e-12);  // N / 4
    EXPECT_NEAR(expectation(rho, build_observable(shape, ObservableKind::casimir)), 3.0, 1e-12);
}

TEST(ObservableTest, TraceDistance) {
    const EnsembleShape shape(2, 1);
    const auto a = PureState::basis_state(shape, 0);
    const auto b = PureState::basis_state(shape, 3);
    EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-12);
    EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-7);
    EXPECT_NEAR(trace_distance(DensityOperator::from_pure(a), DensityOperator::completely_mixed(shape)), 0.75, 1e-12);
    EXPECT_NEAR(overlap_fidelity(DensityOperator::completely_mixed(shape), a), 0.25, 1e-12);
}

}  // namespace
}  // namespace ssprep
