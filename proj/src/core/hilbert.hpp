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

#ifndef SSPREP_CORE_HILBERT_HPP
#define SSPREP_CORE_HILBERT_HPP

// Dense representation of N spin-j particles in the product basis
// |m_1, ..., m_N>, with site 0 as the most significant digit. Digit 0 of a
// site is m = +j, digit 2j is m = -j.

#include <complex>
#include <concepts>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "core/half_integer.hpp"

namespace ssprep {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;
/// (2j+1) x (2j+1) operator on a single site.
using LocalMatrix = Eigen::MatrixXcd;

/// Outcomes with Born weight at or below this are treated as impossible.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kDefaultQubitCap = 16.0;

enum class Axis { x, y, z };
enum class MeasurementBasis { z, x };
enum class ObservableKind { x, y, z, casimir };

const char *axis_name(Axis axis);
const char *basis_name(MeasurementBasis basis);

class EnsembleShape {
  public:
    /// Rejects N * log2(2j+1) > qubit_cap.
    EnsembleShape(int particles, int two_j, double qubit_cap = kDefaultQubitCap);

    int particles() const {
        return particles_;
    }
    int two_j() const {
        return two_j_;
    }
    HalfInteger spin() const {
        return HalfInteger::from_twice(two_j_);
    }
    int local_dim() const {
        return two_j_ + 1;
    }
    std::size_t dim() const {
        return dim_;
    }
    HalfInteger j_max() const {
        return HalfInteger::from_twice(particles_ * two_j_);
    }
    HalfInteger j_min() const {
        return HalfInteger::from_twice((particles_ * two_j_) % 2);
    }

    /// Total z-magnetization of a product-basis index.
    HalfInteger magnetization(std::size_t index) const {
        return HalfInteger::from_twice(tables_->twice_m[index]);
    }
    std::span<const int> twice_magnetizations() const {
        return tables_->twice_m;
    }
    /// -J_max, -J_max + 1, ..., J_max.
    std::vector<HalfInteger> magnetization_values() const;
    std::size_t magnetization_count() const {
        return tables_->blocks.size();
    }
    /// Position of m in magnetization_values(), or nullopt if m is not reachable.
    std::optional<std::size_t> magnetization_slot(HalfInteger m) const;
    /// Basis indices whose total magnetization is m (empty if unreachable).
    std::span<const std::size_t> block(HalfInteger m) const;

    std::size_t site_stride(int site) const;
    int digit(std::size_t index, int site) const {
        return static_cast<int>((index / site_stride(site)) % static_cast<std::size_t>(local_dim()));
    }

    friend bool operator==(const EnsembleShape &a, const EnsembleShape &b) {
        return a.particles_ == b.particles_ && a.two_j_ == b.two_j_;
    }

  private:
    struct Tables {
        std::vector<int> twice_m;
        std::vector<std::vector<std::size_t>> blocks;
    };

    int particles_;
    int two_j_;
    std::size_t dim_;
    std::shared_ptr<const Tables> tables_;
};

/// Distinct particle indices in [0, N), kept sorted.
class SubensembleMask {
  public:
    SubensembleMask() = default;
    SubensembleMask(const EnsembleShape &shape, std::vector<int> members);

    static SubensembleMask all(const EnsembleShape &shape);
    static SubensembleMask first_half(const EnsembleShape &shape);

    std::span<const int> members() const {
        return members_;
    }
    std::size_t size() const {
        return members_.size();
    }
    bool contains(int site) const;

    friend bool operator==(const SubensembleMask &, const SubensembleMask &) = default;

  private:
    std::vector<int> members_;
};

class PureState {
  public:
    PureState(EnsembleShape shape, StateVector amplitudes);

    static PureState basis_state(const EnsembleShape &shape, std::size_t index);

    const EnsembleShape &shape() const {
        return shape_;
    }
    const StateVector &amplitudes() const {
        return amplitudes_;
    }
    StateVector &amplitudes() {
        return amplitudes_;
    }
    double squared_norm() const {
        return amplitudes_.squaredNorm();
    }
    /// Throws Error(invalid_argument) for a zero vector.
    void normalize();

  private:
    EnsembleShape shape_;
    StateVector amplitudes_;
};

class DensityOperator {
  public:
    DensityOperator(EnsembleShape shape, DenseMatrix matrix);

    static DensityOperator completely_mixed(const EnsembleShape &shape);
    static DensityOperator from_pure(const PureState &state);

    const EnsembleShape &shape() const {
        return shape_;
    }
    const DenseMatrix &matrix() const {
        return matrix_;
    }
    DenseMatrix &matrix() {
        return matrix_;
    }
    double trace() const {
        return matrix_.trace().real();
    }
    void normalize();

  private:
    EnsembleShape shape_;
    DenseMatrix matrix_;
};

template <class S>
concept QuantumState = std::same_as<S, PureState> || std::same_as<S, DensityOperator>;

class CollectiveObservable {
  public:
    CollectiveObservable(EnsembleShape shape, ObservableKind kind, std::optional<SubensembleMask> mask,
                         SparseOperator matrix)
        : shape_(std::move(shape)), kind_(kind), mask_(std::move(mask)), matrix_(std::move(matrix)) {
    }

    const EnsembleShape &shape() const {
        return shape_;
    }
    ObservableKind kind() const {
        return kind_;
    }
    const std::optional<SubensembleMask> &mask() const {
        return mask_;
    }
    const SparseOperator &matrix() const {
        return matrix_;
    }
    DenseMatrix dense() const {
        return DenseMatrix(matrix_);
    }

  private:
    EnsembleShape shape_;
    ObservableKind kind_;
    std::optional<SubensembleMask> mask_;
    SparseOperator matrix_;
};

// Single-site operators from the generic angular-momentum ladder elements.
LocalMatrix spin_matrix(int two_j, Axis axis);
/// exp(-i theta j^axis) on one site.
LocalMatrix local_rotation(int two_j, Axis axis, double theta);

/// Sum of single-site spin operators over the mask (all sites when absent);
/// kind == casimir gives (J^x)^2 + (J^y)^2 + (J^z)^2 over the same sites.
CollectiveObservable build_observable(const EnsembleShape &shape, ObservableKind kind,
                                      const std::optional<SubensembleMask> &mask = std::nullopt);

/// Dense P^z_m or P^x_m = U^y(pi/2) P^z_m U^y(pi/2)^dagger. Intended for checks
/// on small systems; the protocol never materializes projectors.
DenseMatrix projector(const EnsembleShape &shape, MeasurementBasis basis, HalfInteger m);

/// Applies the same local operator to each listed site (state -> U state, rho -> U rho U^dagger).
void apply_local(PureState &state, const LocalMatrix &op, std::span<const int> sites);
void apply_local(DensityOperator &state, const LocalMatrix &op, std::span<const int> sites);

/// U^axis_S(theta) = prod_{n in S} exp(-i theta j^axis_n); the whole ensemble when mask is absent.
template <QuantumState S>
void apply_rotation(S &state, Axis axis, const std::optional<SubensembleMask> &mask, double theta);

/// Multiplies every product-basis amplitude by a factor that depends only on its
/// total magnetization (indexed like magnetization_values()).
void apply_magnetization_diagonal(PureState &state, std::span<const Complex> factors);
void apply_magnetization_diagonal(DensityOperator &state, std::span<const Complex> factors);

/// Born weights of every z-magnetization outcome, aligned with magnetization_values().
std::vector<double> magnetization_weights(const PureState &state);
std::vector<double> magnetization_weights(const DensityOperator &state);

/// Born weights in the requested basis.
template <QuantumState S>
std::vector<double> outcome_weights(const S &state, MeasurementBasis basis);

/// In-place P^z_m followed by normalization. Returns the Born probability;
/// throws Error(impossible_outcome) when it is <= floor (state left untouched).
double project_z(PureState &state, HalfInteger m, double floor = kProbabilityFloor);
double project_z(DensityOperator &state, HalfInteger m, double floor = kProbabilityFloor);

// The x-frame is psi' = U^y(pi/2)^dagger psi, in which P^x_m acts as P^z_m.
template <QuantumState S>
void to_x_frame(S &state);
template <QuantumState S>
void from_x_frame(S &state);

template <QuantumState S>
struct Projected {
    S state;
    double probability;
};

template <QuantumState S>
Projected<S> apply_projection(const S &state, MeasurementBasis basis, HalfInteger m,
                              double floor = kProbabilityFloor);

double expectation(const PureState &state, const CollectiveObservable &observable);
double expectation(const DensityOperator &state, const CollectiveObservable &observable);
/// Real part of <psi|O|psi> or tr(O rho) for an operator already in the product basis.
double expectation(const PureState &state, const SparseOperator &op);
double expectation(const DensityOperator &state, const SparseOperator &op);

/// <(J^a)^2> - <J^a>^2 on the full ensemble, clamped at zero.
template <QuantumState S>
double variance(const S &state, Axis axis);

/// |<a|b>|^2 for pure states, <b|rho|b> when the first argument is mixed.
double overlap_fidelity(const PureState &a, const PureState &b);
double overlap_fidelity(const DensityOperator &a, const PureState &b);

/// Trace distance between the two (normalized) states.
double trace_distance(const PureState &a, const PureState &b);
double trace_distance(const DensityOperator &a, const DensityOperator &b);

}  // namespace ssprep

#endif
