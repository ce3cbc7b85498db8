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
#include "core/multiplets.hpp"
#include "core/qnd.hpp"

namespace ssprep {
namespace {

OpticalSettings symmetric_settings(double amplitude, double gt) {
    OpticalSettings s;
    s.gamma = Complex(amplitude, 0.0);
    s.chi = Complex(amplitude, 0.0);
    s.gt = gt;
    return s;
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

TEST(QndClosedFormTest, SymmetricOutcomeHasZeroPeak) {
    for (double gt : {0.1, 0.3, 0.6283185307179586, 1.2})
        for (std::int64_t n : {1, 5, 100, 1800}) {
            const auto g = gaussian_posterior(symmetric_settings(30.0, gt), n, n);
            ASSERT_TRUE(g.has_value());
            EXPECT_EQ(g->m0, 0.0);
        }
}

TEST(QndClosedFormTest, SymmetricVarianceSimplification) {
    // n_c = n_d = n and eta = 0: sigma^2 = 1 / (g^2 t^2 n).
    for (double amplitude : {1.0, 10.0, 30.0})
        for (double gt : {0.05, 0.2, 0.7, 1.5})
            for (std::int64_t n : {1, 3, 50, 1000, 123456}) {
                const auto g = gaussian_posterior(symmetric_settings(amplitude, gt), n, n);
                ASSERT_TRUE(g.has_value());
                const double expected = 1.0 / (gt * gt * static_cast<double>(n));
                EXPECT_NEAR(g->sigma2, expected, 1e-9 * std::max(1.0, expected));
            }
}

TEST(QndClosedFormTest, UndefinedOutcomes) {
    const auto s = symmetric_settings(30.0, 0.5);
    EXPECT_FALSE(gaussian_posterior(s, 0, 10).has_value());
    EXPECT_FALSE(gaussian_posterior(s, 10, 0).has_value());
    OpticalSettings skew = s;
    skew.gamma = Complex(10.0, 0.0);  // |cos 2 eta| < 1
    const double c = std::cos(2.0 * skew.eta());
    // |n_d - n_c| / n beyond |cos 2 eta| has no real m0.
    const std::int64_t nc = 10;
    const auto nd = static_cast<std::int64_t>(std::ceil(nc * (1 + c) / (1 - c))) + 1;
    EXPECT_FALSE(gaussian_posterior(skew, nc, nd).has_value());
    const auto factors = posterior_factors(EnsembleShape(2, 1), skew, nc, nd);
    for (const auto &f : factors)
        EXPECT_EQ(f, Complex(0.0, 0.0));
}

TEST(QndClosedFormTest, EnvelopeRatio) {
    const EnsembleShape shape(4, 1);
    OpticalSettings s = symmetric_settings(5.0, 0.3);
    s.chi = std::polar(7.0, 0.2);
    s.gamma = std::polar(4.0, 0.1);
    s.phi_p = 0.05;
    const auto ms = shape.magnetization_values();
    for (auto [nc, nd] : {std::pair<std::int64_t, std::int64_t>{30, 35}, {40, 30}, {33, 33}}) {
        const auto g = gaussian_posterior(s, nc, nd);
        ASSERT_TRUE(g.has_value());
        const auto f = posterior_factors(shape, s, nc, nd);
        for (std::size_t a = 0; a < ms.size(); ++a)
            for (std::size_t b = 0; b < ms.size(); ++b) {
                const double da = ms[a].value() - g->m0, db = ms[b].value() - g->m0;
                const double expected = std::exp(-(da * da - db * db) / (2.0 * g->sigma2));
                EXPECT_NEAR(std::abs(f[a]) / std::abs(f[b]), expected, 1e-9 * std::max(1.0, expected));
            }
    }
}

TEST(QndClosedFormTest, VarianceShrinksWithLight) {
    const double gt = 0.3;
    double previous = std::numeric_limits<double>::infinity();
    for (double amplitude : {2.0, 5.0, 10.0, 20.0, 40.0}) {
        const auto s = symmetric_settings(amplitude, gt);
        const auto n = static_cast<std::int64_t>(std::round(s.photon_mean() / 2.0));
        const double sigma2 = gaussian_posterior(s, n, n)->sigma2;
        EXPECT_LT(sigma2, previous);
        previous = sigma2;
    }
}

TEST(QndClosedFormTest, PeakMapIsInjective) {
    // With the strong operating point the outcome means for distinct m are distinct.
    for (int n : {2, 4, 6}) {
        const EnsembleShape shape(n, 1);
        const auto s = OpticalSettings::strong(shape);
        double previous = -2.0;
        for (auto m : shape.magnetization_values()) {
            const double x = std::sin(s.gt * m.value());
            EXPECT_GT(x, previous);
            EXPECT_LE(std::abs(x), 1.0);
            previous = x;
        }
    }
}

TEST(QndClosedFormTest, VacuumSettings) {
    // Almost no light: the vacuum outcome carries nearly all the probability.
    const EnsembleShape shape(2, 1);
    const auto s = symmetric_settings(0.01, 0.5);
    const auto psi = random_state(shape, 4);
    const auto post = posterior_state(psi, s, 0, 0);
    EXPECT_NEAR(post.probability, std::exp(-s.photon_mean()), 1e-15);
    EXPECT_GT(post.probability, 0.9998);
}

TEST(QndMeasurementTest, NormalizationWithinTruncation) {
    const EnsembleShape shape(4, 1);
    const auto s = OpticalSettings::strong(shape);
    const QndMeasurement narrow(shape, s);
    const QndMeasurement wide(shape, s, Truncation{10.0, 1e-3});
    const auto a = narrow.mass_per_magnetization();
    const auto b = wide.mass_per_magnetization();
    for (std::size_t k = 0; k < a.size(); ++k) {
        // Truncation loss of the 6-sigma grid.
        EXPECT_NEAR(a[k], b[k], 1e-6);
        // Deviation of the Stirling-form prefactor from exact normalization is O(1 / photons).
        EXPECT_NEAR(b[k], 1.0, 1e-3);
    }
    const auto psi = random_state(shape, 8);
    double total = 0.0;
    for (const auto &o : narrow.distribution(magnetization_weights(psi)))
        total += o.probability;
    EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(QndMeasurementTest, SingletIsUntouched) {
    const EnsembleShape shape(4, 1);
    const auto singlet = singlet_basis(shape).vectors[0];
    const auto s = OpticalSettings::strong(shape);
    const QndMeasurement q(shape, s);
    RandomStream rng(6);
    for (int i = 0; i < 20; ++i) {
        const auto draw = q.sample(magnetization_weights(singlet), rng);
        EXPECT_EQ(draw.inferred_m.twice, 0);
        auto post = posterior_state(singlet, s, draw.outcome.n_c, draw.outcome.n_d);
        post.state.normalize();
        EXPECT_NEAR(overlap_fidelity(post.state, singlet), 1.0, 1e-12);
    }
}

TEST(QndMeasurementTest, StrongSettingsActAsProjector) {
    const EnsembleShape shape(4, 1);
    const auto report = effective_projector_check(shape, OpticalSettings::strong(shape), 3, 10, 30);
    EXPECT_LT(report.worst_trace_distance, 1e-3);
    EXPECT_EQ(report.regime, "projective");
}

TEST(QndMeasurementTest, WeakSettingsFlagSqueezing) {
    const EnsembleShape shape(4, 1);
    OpticalSettings weak = symmetric_settings(3.0, 0.05);
    const auto report = effective_projector_check(shape, weak, 3, 5, 20);
    EXPECT_GT(report.worst_trace_distance, 0.1);
    EXPECT_EQ(report.regime, "squeezing");
}

TEST(QndMeasurementTest, ValidationRejectsDarkSettings) {
    OpticalSettings s = symmetric_settings(0.0, 0.5);
    EXPECT_THROW(s.validate(), Error);
    s = symmetric_settings(1.0, 0.0);
    EXPECT_THROW(s.validate(), Error);
}

}  // namespace
}  // namespace ssprep
