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

#include "core/multiplets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace ssprep {

std::uint64_t MultipletTable::count(HalfInteger total_spin) const {
    auto it = counts.find(total_spin.twice);
    return it == counts.end() ? 0 : it->second;
}

std::uint64_t MultipletTable::state_count() const {
    std::uint64_t total = 0;
    for (const auto &[twice_j, d] : counts)
        total += d * static_cast<std::uint64_t>(twice_j + 1);
    return total;
}

MultipletTable multiplet_counts(const EnsembleShape &shape) {
    const int two_j = shape.two_j();
    std::map<int, std::uint64_t> current{{two_j, 1}};
    for (int n = 1; n < shape.particles(); ++n) {
        std::map<int, std::uint64_t> next;
        for (const auto &[twice_total, d] : current)
            for (int t = std::abs(twice_total - two_j); t <= twice_total + two_j; t += 2)
                next[t] += d;
        current = std::move(next);
    }
    return MultipletTable{shape, std::move(current)};
}

const char *provenance_name(BasisProvenance provenance) {
    return provenance == BasisProvenance::explicit_construction ? "explicit-construction" : "numerically-constructed";
}

namespace {

constexpr double kNullEigenvalue = 1e-8;

// Two-spin-1/2 states over (site a, site b), index = 2 * digit_a + digit_b.
StateVector bell(int which) {
    const double r = 1.0 / std::sqrt(2.0);
    StateVector v = StateVector::Zero(4);
    switch (which) {
    case 0:  // phi+
        v[0] = r;
        v[3] = r;
        break;
    case 1:  // phi-
        v[0] = r;
        v[3] = -r;
        break;
    case 2:  // psi+
        v[1] = r;
        v[2] = r;
        break;
    default:  // psi-
        v[1] = r;
        v[2] = -r;
        break;
    }
    return v;
}

StateVector kron(const StateVector &a, const StateVector &b) {
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

std::vector<PureState> explicit_singlets(const EnsembleShape &shape) {
    if (shape.two_j() != 1)
        return {};
    if (shape.particles() == 2)
        return {PureState(shape, bell(3))};
    if (shape.particles() == 4) {
        StateVector s1 = (kron(bell(0), bell(0)) - kron(bell(1), bell(1)) - kron(bell(2), bell(2))) / std::sqrt(3.0);
        StateVector s2 = kron(bell(3), bell(3));
        return {PureState(shape, std::move(s1)), PureState(shape, std::move(s2))};
    }
    return {};
}

void fix_phase(Eigen::VectorXcd &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > 1e-12) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
}

}  // namespace

SingletBasis singlet_basis(const EnsembleShape &shape) {
    SingletBasis basis{shape, {}, BasisProvenance::numerically_constructed, {}, {}};
    if ((shape.particles() * shape.two_j()) % 2 != 0)
        return basis;

    auto block = shape.block(HalfInteger::whole(0));
    basis.block_indices.assign(block.begin(), block.end());
    const auto b = static_cast<Eigen::Index>(block.size());

    auto vectors = explicit_singlets(shape);
    if (!vectors.empty()) {
        basis.provenance = BasisProvenance::explicit_construction;
    } else {
        std::vector<Eigen::Index> position(shape.dim(), -1);
        for (Eigen::Index r = 0; r < b; ++r)
            position[block[static_cast<std::size_t>(r)]] = r;
        const auto casimir = build_observable(shape, ObservableKind::casimir);
        // J^2 is real in the product basis and maps the m = 0 block to itself.
        Eigen::MatrixXd restricted = Eigen::MatrixXd::Zero(b, b);
        for (Eigen::Index r = 0; r < b; ++r) {
            const auto col = static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)]);
            for (SparseOperator::InnerIterator it(casimir.matrix(), col); it; ++it) {
                const Eigen::Index p = position[static_cast<std::size_t>(it.row())];
                if (p >= 0)
                    restricted(p, r) = it.value().real();
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restricted);
        std::vector<Eigen::VectorXcd> null_vectors;
        for (Eigen::Index k = 0; k < b; ++k)
            if (std::abs(eig.eigenvalues()[k]) < kNullEigenvalue) {
                Eigen::VectorXcd v = eig.eigenvectors().col(k).cast<Complex>();
                fix_phase(v);
                null_vectors.push_back(std::move(v));
            }
        auto peak = [](const Eigen::VectorXcd &v) {
            Eigen::Index idx = 0;
            v.cwiseAbs().maxCoeff(&idx);
            return idx;
        };
        std::stable_sort(null_vectors.begin(), null_vectors.end(),
                         [&](const auto &x, const auto &y) { return peak(x) < peak(y); });
        for (const auto &v : null_vectors) {
            StateVector full = StateVector::Zero(static_cast<Eigen::Index>(shape.dim()));
            for (Eigen::Index r = 0; r < b; ++r)
                full[static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)])] = v[r];
            vectors.emplace_back(shape, std::move(full));
        }
    }

    basis.block_coefficients.resize(b, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k)
        for (Eigen::Index r = 0; r < b; ++r)
            basis.block_coefficients(r, static_cast<Eigen::Index>(k)) =
                vectors[k].amplitudes()[static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)])];
    basis.vectors = std::move(vectors);
    return basis;
}

namespace {

void check_basis(const EnsembleShape &shape, const SingletBasis &basis) {
    if (!(shape == basis.shape))
        fail(ErrorCode::invalid_argument, "state and singlet basis belong to different ensembles");
}

Fidelities finish(std::vector<double> components) {
    Fidelities f;
    f.total = std::accumulate(components.begin(), components.end(), 0.0);
    f.components = std::move(components);
    return f;
}

}  // namespace

Fidelities fidelities(const PureState &state, const SingletBasis &basis) {
    check_basis(state.shape(), basis);
    const auto b = static_cast<Eigen::Index>(basis.block_indices.size());
    Eigen::VectorXcd restricted(b);
    for (Eigen::Index r = 0; r < b; ++r)
        restricted[r] = state.amplitudes()[static_cast<Eigen::Index>(basis.block_indices[static_cast<std::size_t>(r)])];
    std::vector<double> out;
    for (Eigen::Index k = 0; k < basis.block_coefficients.cols(); ++k)
        out.push_back(std::norm(basis.block_coefficients.col(k).dot(restricted)));
    return finish(std::move(out));
}

Fidelities fidelities(const DensityOperator &state, const SingletBasis &basis) {
    check_basis(state.shape(), basis);
    const auto b = static_cast<Eigen::Index>(basis.block_indices.size());
    DenseMatrix restricted(b, b);
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < b; ++r)
            restricted(r, c) = state.matrix()(static_cast<Eigen::Index>(basis.block_indices[static_cast<std::size_t>(r)]),
                                              static_cast<Eigen::Index>(basis.block_indices[static_cast<std::size_t>(c)]));
    std::vector<double> out;
    for (Eigen::Index k = 0; k < basis.block_coefficients.cols(); ++k) {
        const auto v = basis.block_coefficients.col(k);
        out.push_back(v.dot(restricted * v).real());
    }
    return finish(std::move(out));
}

namespace {

double casimir_norm(const EnsembleShape &shape) {
    const double jmax = shape.j_max().value();
    return jmax * (jmax + 1.0);
}

}  // namespace

double normalized_total_spin_squared(const PureState &state, const CollectiveObservable &casimir) {
    return expectation(state, casimir) / casimir_norm(state.shape());
}

double normalized_total_spin_squared(const DensityOperator &state, const CollectiveObservable &casimir) {
    return expectation(state, casimir) / casimir_norm(state.shape());
}

double normalized_total_spin_squared(const PureState &state) {
    return normalized_total_spin_squared(state, build_observable(state.shape(), ObservableKind::casimir));
}

double normalized_total_spin_squared(const DensityOperator &state) {
    return normalized_total_spin_squared(state, build_observable(state.shape(), ObservableKind::casimir));
}

}  // namespace ssprep
