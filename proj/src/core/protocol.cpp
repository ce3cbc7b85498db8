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

#include "core/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace ssprep {

double rotation_angle(HalfInteger m, HalfInteger j_max) {
    if (m.abs() > j_max)
        fail(ErrorCode::invalid_argument, "|m| = " + m.abs().to_string() + " exceeds J_max = " + j_max.to_string());
    if (m.twice == 0)
        return 0.0;
    const double jm = j_max.value();
    return std::asin(m.value() / std::sqrt(jm * (jm + 1.0)));
}

double RotationRule::angle(HalfInteger m, HalfInteger j_max) const {
    if (kind == RotationRuleKind::arcsin)
        return rotation_angle(m, j_max);
    auto it = table.find(m.twice);
    return it == table.end() ? 0.0 : it->second;
}

const char *policy_name(SubensemblePolicy policy) {
    return policy == SubensemblePolicy::random_half ? "random-half" : "fixed-first-half";
}

const char *backend_name(BackendKind backend) {
    return backend == BackendKind::ideal ? "ideal" : "qnd";
}

const char *initial_state_name(InitialStateKind kind) {
    return kind == InitialStateKind::completely_mixed ? "completely-mixed" : "y-polarized";
}

void ProtocolConfig::validate(const EnsembleShape &shape) const {
    if (m_cut.twice < 0)
        fail(ErrorCode::invalid_argument, "m_cut must be nonnegative");
    if (!(m_cut < shape.j_max()))
        fail(ErrorCode::invalid_argument, "m_cut must be smaller than J_max");
    if (m_cut.twice < (shape.particles() * shape.two_j()) % 2)
        fail(ErrorCode::invalid_argument, "m_cut must be at least 1/2 when N * 2j is odd (no m = 0 outcome exists)");
    if (convergence_streak < 2)
        fail(ErrorCode::invalid_argument, "convergence_streak must be at least 2");
    if (settle_rounds < 0)
        fail(ErrorCode::invalid_argument, "settle_rounds must be nonnegative");
    if (max_rounds < 1 || max_sequence_steps < 1)
        fail(ErrorCode::invalid_argument, "round and sequence caps must be positive");
    if (shape.particles() < 2)
        fail(ErrorCode::invalid_argument, "the protocol needs at least two particles");
    if (backend == BackendKind::qnd)
        optical.validate();
}

// ---------------------------------------------------------------------------
// Observables

ObservableContext::ObservableContext(const EnsembleShape &shape)
    : shape_(shape), singlets_(singlet_basis(shape)), casimir_(build_observable(shape, ObservableKind::casimir)) {
    const ObservableKind kinds[3] = {ObservableKind::x, ObservableKind::y, ObservableKind::z};
    for (int a = 0; a < 3; ++a) {
        components_[a] = build_observable(shape, kinds[a]).matrix();
        squares_[a] = components_[a] * components_[a];
    }
}

bool ObservableContext::resolves_components() const {
    return shape_.particles() <= 4;
}

template <QuantumState S>
RoundObservables ObservableContext::measure(const S &state, int round) const {
    RoundObservables out;
    out.round = round;
    out.jbar2 = normalized_total_spin_squared(state, casimir_);
    double *vars[3] = {&out.var_x, &out.var_y, &out.var_z};
    for (int a = 0; a < 3; ++a) {
        const double mean = expectation(state, components_[a]);
        *vars[a] = std::max(expectation(state, squares_[a]) - mean * mean, 0.0);
    }
    if (!singlets_.empty()) {
        auto f = fidelities(state, singlets_);
        out.fidelity = f.total;
        if (resolves_components())
            out.fidelity_components = std::move(f.components);
    }
    return out;
}

template RoundObservables ObservableContext::measure(const PureState &, int) const;
template RoundObservables ObservableContext::measure(const DensityOperator &, int) const;

// ---------------------------------------------------------------------------
// Initial states

AnyState make_initial_state(InitialStateKind kind, const EnsembleShape &shape) {
    switch (kind) {
    case InitialStateKind::completely_mixed:
        return DensityOperator::completely_mixed(shape);
    case InitialStateKind::y_polarized: {
        PureState up = PureState::basis_state(shape, 0);
        apply_rotation(up, Axis::x, std::nullopt, -std::numbers::pi / 2);
        return up;
    }
    }
    fail(ErrorCode::invalid_argument, "unknown initial state kind");
}

PureState sample_mixed_unraveling(const EnsembleShape &shape, RandomStream &rng) {
    return PureState::basis_state(shape, rng.uniform_index(shape.dim()));
}

// ---------------------------------------------------------------------------
// Sequences

namespace {

std::vector<int> choose_subensemble(const EnsembleShape &shape, SubensemblePolicy policy, RandomStream &rng) {
    const int n = shape.particles();
    const int k = n / 2;
    std::vector<int> sites(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        sites[static_cast<std::size_t>(i)] = i;
    if (policy == SubensemblePolicy::random_half) {
        // Partial Fisher-Yates.
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(i) + rng.uniform_index(static_cast<std::size_t>(n - i));
            std::swap(sites[static_cast<std::size_t>(i)], sites[j]);
        }
    }
    sites.resize(static_cast<std::size_t>(k));
    std::sort(sites.begin(), sites.end());
    return sites;
}

// Normalizes after a QND posterior update.
template <QuantumState S>
void renormalize(S &state) {
    state.normalize();
}

}  // namespace

template <QuantumState S>
SequenceOutcome run_sequence(S &state, MeasurementBasis basis, const ProtocolConfig &config, RandomStream &rng,
                             int round, std::vector<MeasurementEvent> &events, int &streak,
                             const QndMeasurement *qnd) {
    const auto &shape = state.shape();
    const auto ms = shape.magnetization_values();
    if (config.backend == BackendKind::qnd && qnd == nullptr)
        fail(ErrorCode::invalid_argument, "QND backend selected without a QND measurement model");

    // In the x-frame psi' = U^y(pi/2)^dagger psi the x projectors are z projectors
    // and U^z_S(theta) becomes a product of u^dagger r_z(theta) u on the same sites.
    const bool x_basis = basis == MeasurementBasis::x;
    if (x_basis)
        to_x_frame(state);
    const LocalMatrix to_frame = local_rotation(shape.two_j(), Axis::y, -std::numbers::pi / 2);
    const LocalMatrix from_frame = local_rotation(shape.two_j(), Axis::y, std::numbers::pi / 2);

    SequenceOutcome outcome;
    while (outcome.steps < config.max_sequence_steps) {
        ++outcome.steps;
        MeasurementEvent event;
        event.round = round;
        event.basis = basis;

        const auto weights = magnetization_weights(state);
        if (config.backend == BackendKind::ideal) {
            const OutcomeDistribution dist(ms, weights);
            event.m = sample(dist, rng, config.sampler);
            event.born_probability = project_z(state, event.m);
        } else {
            const auto drawn = qnd->sample(weights, rng);
            event.m = drawn.inferred_m;
            event.photon_counts = std::pair{drawn.outcome.n_c, drawn.outcome.n_d};
            event.born_probability = weights[*shape.magnetization_slot(event.m)];
            apply_magnetization_diagonal(state,
                                         posterior_factors(shape, qnd->settings(), drawn.outcome.n_c, drawn.outcome.n_d));
            renormalize(state);
        }

        if (event.m.abs() <= config.m_cut) {
            ++streak;
            events.push_back(std::move(event));
            outcome.completed = true;
            break;
        }
        streak = 0;
        event.applied_theta = config.rotation_rule.angle(event.m, shape.j_max());
        event.subensemble = choose_subensemble(shape, config.subensemble_policy, rng);
        if (event.applied_theta != 0.0) {
            if (!x_basis) {
                apply_local(state, local_rotation(shape.two_j(), Axis::y, event.applied_theta), event.subensemble);
            } else {
                const LocalMatrix op =
                    to_frame * local_rotation(shape.two_j(), Axis::z, event.applied_theta) * from_frame;
                apply_local(state, op, event.subensemble);
            }
        }
        events.push_back(std::move(event));
    }
    if (x_basis)
        from_x_frame(state);
    return outcome;
}

template SequenceOutcome run_sequence(PureState &, MeasurementBasis, const ProtocolConfig &, RandomStream &, int,
                                      std::vector<MeasurementEvent> &, int &, const QndMeasurement *);
template SequenceOutcome run_sequence(DensityOperator &, MeasurementBasis, const ProtocolConfig &, RandomStream &,
                                      int, std::vector<MeasurementEvent> &, int &, const QndMeasurement *);

template <QuantumState S>
TrajectoryResult run_procedure(S &state, const ProtocolConfig &config, RandomStream &rng,
                               const ObservableContext &context) {
    const auto &shape = state.shape();
    if (!(shape == context.shape()))
        fail(ErrorCode::invalid_argument, "observable context built for a different ensemble");
    config.validate(shape);

    std::optional<QndMeasurement> qnd;
    if (config.backend == BackendKind::qnd)
        qnd.emplace(shape, config.optical);

    TrajectoryResult result;
    result.config = config;
    result.seed = rng.seed();
    result.initial = context.measure(state, 0);

    const int stop_streak = config.convergence_streak + 2 * config.settle_rounds;
    int streak = 0;
    std::optional<int> detected;
    for (int round = 1; round <= config.max_rounds; ++round) {
        for (MeasurementBasis basis : {MeasurementBasis::z, MeasurementBasis::x}) {
            const auto seq = run_sequence(state, basis, config, rng, round, result.events, streak,
                                          qnd ? &*qnd : nullptr);
            result.sequence_lengths.push_back(seq.steps);
            if (streak == 0)
                detected.reset();
            if (!seq.completed) {
                result.step_cap_hit = true;
                result.rounds_used = round;
                result.converged = false;
                return result;
            }
        }
        result.rounds.push_back(context.measure(state, round));
        result.rounds_used = round;
        if (streak >= config.convergence_streak && !detected)
            detected = round;
        if (streak >= stop_streak)
            break;
    }
    result.converged = detected.has_value();
    result.converged_round = detected;
    result.settled = streak >= stop_streak;
    return result;
}

template TrajectoryResult run_procedure(PureState &, const ProtocolConfig &, RandomStream &,
                                        const ObservableContext &);
template TrajectoryResult run_procedure(DensityOperator &, const ProtocolConfig &, RandomStream &,
                                        const ObservableContext &);

TrajectoryResult run_procedure(AnyState initial, const ProtocolConfig &config, RandomStream &rng,
                               const ObservableContext &context) {
    return std::visit([&](auto &state) { return run_procedure(state, config, rng, context); }, initial);
}

}  // namespace ssprep
