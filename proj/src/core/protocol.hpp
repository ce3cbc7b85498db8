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

#ifndef SSPREP_CORE_PROTOCOL_HPP
#define SSPREP_CORE_PROTOCOL_HPP

// Supersinglet preparation by repeat-until-success projection sequences in
// alternating z and x bases. After an outcome |m| > m_cut, half of the spins
// are rotated about the axis conjugate to the measurement basis by theta_m and
// the measurement is repeated; a sequence ends on the first |m| <= m_cut.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "core/hilbert.hpp"
#include "core/multiplets.hpp"
#include "core/qnd.hpp"
#include "core/sampler.hpp"

namespace ssprep {

/// arcsin(m / sqrt(J_max (J_max + 1))). Throws Error(invalid_argument) for |m| > J_max.
double rotation_angle(HalfInteger m, HalfInteger j_max);

enum class RotationRuleKind { arcsin, custom_table };

struct RotationRule {
    RotationRuleKind kind = RotationRuleKind::arcsin;
    /// theta keyed by 2m; outcomes missing from the table are not rotated.
    std::map<int, double> table;

    double angle(HalfInteger m, HalfInteger j_max) const;
    friend bool operator==(const RotationRule &, const RotationRule &) = default;
};

enum class SubensemblePolicy { random_half, fixed_first_half };
enum class BackendKind { ideal, qnd };

const char *policy_name(SubensemblePolicy policy);
const char *backend_name(BackendKind backend);

struct ProtocolConfig {
    /// A sequence ends on the first outcome with |m| <= m_cut.
    HalfInteger m_cut{0};
    /// Good outcomes in a row (across both bases) that count as convergence.
    int convergence_streak = 5;
    /// Complete rounds to keep running after convergence is first detected;
    /// the trajectory stops once the unbroken streak reaches
    /// convergence_streak + 2 * settle_rounds. Zero stops at detection.
    int settle_rounds = 0;
    int max_rounds = 100;
    int max_sequence_steps = 10'000;
    RotationRule rotation_rule;
    SubensemblePolicy subensemble_policy = SubensemblePolicy::random_half;
    SamplerKind sampler = SamplerKind::exact;
    BackendKind backend = BackendKind::ideal;
    /// Used when backend == qnd.
    OpticalSettings optical;

    /// Throws Error(invalid_argument) describing the first violated constraint.
    void validate(const EnsembleShape &shape) const;
};

struct MeasurementEvent {
    int round = 0;
    MeasurementBasis basis = MeasurementBasis::z;
    HalfInteger m;
    double born_probability = 0.0;
    /// Zero when no rotation followed (always the case for the final event of a sequence).
    double applied_theta = 0.0;
    std::vector<int> subensemble;
    /// Photon counts (n_c, n_d) when the QND backend produced the outcome.
    std::optional<std::pair<std::int64_t, std::int64_t>> photon_counts;

    friend bool operator==(const MeasurementEvent &, const MeasurementEvent &) = default;
};

struct RoundObservables {
    /// 0 for the initial state.
    int round = 0;
    double jbar2 = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    double var_z = 0.0;
    /// Total J = 0 population.
    double fidelity = 0.0;
    /// Per-supersinglet populations; only filled for N <= 4 where the basis is canonical.
    std::vector<double> fidelity_components;
};

struct TrajectoryResult {
    ProtocolConfig config;
    std::uint64_t seed = 0;
    std::vector<MeasurementEvent> events;
    /// Event count of each repeat-until-success sequence, in execution order (z, x, z, x, ...).
    std::vector<int> sequence_lengths;
    RoundObservables initial;
    std::vector<RoundObservables> rounds;
    bool converged = false;
    /// Whether the settling rounds after detection also completed.
    bool settled = false;
    bool step_cap_hit = false;
    int rounds_used = 0;
    /// Round at whose end the final unbroken streak first reached convergence_streak.
    std::optional<int> converged_round;
};

/// Collective operators and the singlet basis for one ensemble; immutable and
/// shareable across trajectories.
class ObservableContext {
  public:
    explicit ObservableContext(const EnsembleShape &shape);

    const EnsembleShape &shape() const {
        return shape_;
    }
    const SingletBasis &singlets() const {
        return singlets_;
    }
    const CollectiveObservable &casimir() const {
        return casimir_;
    }
    /// True when per-supersinglet fidelities are reported (N <= 4).
    bool resolves_components() const;

    template <QuantumState S>
    RoundObservables measure(const S &state, int round) const;

  private:
    EnsembleShape shape_;
    SingletBasis singlets_;
    CollectiveObservable casimir_;
    SparseOperator components_[3];
    SparseOperator squares_[3];
};

enum class InitialStateKind { completely_mixed, y_polarized };

const char *initial_state_name(InitialStateKind kind);

using AnyState = std::variant<PureState, DensityOperator>;

/// Completely mixed: identity / dim. y-polarized: the all-up Dicke state rotated
/// about x by -pi/2, which has <J^y> = +J_max.
AnyState make_initial_state(InitialStateKind kind, const EnsembleShape &shape);

/// One member of the completely mixed ensemble: a uniformly drawn product basis state.
PureState sample_mixed_unraveling(const EnsembleShape &shape, RandomStream &rng);

struct SequenceOutcome {
    int steps = 0;
    bool completed = false;
};

/// Runs one repeat-until-success sequence in `basis`, appending its events.
/// `streak` is updated per outcome. For backend == qnd, `qnd` must be non-null.
template <QuantumState S>
SequenceOutcome run_sequence(S &state, MeasurementBasis basis, const ProtocolConfig &config, RandomStream &rng,
                             int round, std::vector<MeasurementEvent> &events, int &streak,
                             const QndMeasurement *qnd = nullptr);

/// Evolves `state` in place; on return it holds the final state of the trajectory.
template <QuantumState S>
TrajectoryResult run_procedure(S &state, const ProtocolConfig &config, RandomStream &rng,
                               const ObservableContext &context);

TrajectoryResult run_procedure(AnyState initial, const ProtocolConfig &config, RandomStream &rng,
                               const ObservableContext &context);

}  // namespace ssprep

#endif
