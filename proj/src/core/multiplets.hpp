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

#ifndef SSPREP_CORE_MULTIPLETS_HPP
#define SSPREP_CORE_MULTIPLETS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "core/hilbert.hpp"

namespace ssprep {

/// Number of distinct total-spin-J multiplets D_J, keyed by 2J.
struct MultipletTable {
    EnsembleShape shape;
    std::map<int, std::uint64_t> counts;

    std::uint64_t count(HalfInteger total_spin) const;
    /// sum_J D_J (2J + 1); equals (2j+1)^N.
    std::uint64_t state_count() const;
};

/// Adds one spin j at a time: each J branches to |J - j|, ..., J + j.
MultipletTable multiplet_counts(const EnsembleShape &shape);

enum class BasisProvenance { explicit_construction, numerically_constructed };

const char *provenance_name(BasisProvenance provenance);

/// Orthonormal basis of the J = 0 sector. All vectors live in the m = 0
/// magnetization block; `block_coefficients` holds them restricted to it.
struct SingletBasis {
    EnsembleShape shape;
    std::vector<PureState> vectors;
    BasisProvenance provenance = BasisProvenance::numerically_constructed;
    std::vector<std::size_t> block_indices;
    DenseMatrix block_coefficients;

    std::size_t size() const {
        return vectors.size();
    }
    bool empty() const {
        return vectors.empty();
    }
};

/// For N = 2 and N = 4 spin-1/2 the explicit Bell-state constructions are
/// returned; otherwise the null space of J^2 on the m = 0 block, ordered by the
/// index of each vector's largest amplitude with the first nonzero amplitude
/// made real and positive. Empty when N * 2j is odd.
SingletBasis singlet_basis(const EnsembleShape &shape);

struct Fidelities {
    double total = 0.0;
    std::vector<double> components;
};

Fidelities fidelities(const PureState &state, const SingletBasis &basis);
Fidelities fidelities(const DensityOperator &state, const SingletBasis &basis);

/// <J^2> / (J_max (J_max + 1)).
double normalized_total_spin_squared(const PureState &state);
double normalized_total_spin_squared(const DensityOperator &state);
double normalized_total_spin_squared(const PureState &state, const CollectiveObservable &casimir);
double normalized_total_spin_squared(const DensityOperator &state, const CollectiveObservable &casimir);

}  // namespace ssprep

#endif
