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

#ifndef SSPREP_CORE_QND_HPP
#define SSPREP_CORE_QND_HPP

// Optical QND realization of the collective z projector. Light in a coherent
// state |gamma> picks up a J^z-dependent phase through H = hbar g J^z n, is
// interfered with |chi> and both output ports are counted. After a Gaussian
// approximation the atomic amplitudes psi_m are multiplied by a factor that
// depends only on m and the counts (n_c, n_d).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/hilbert.hpp"
#include "core/sampler.hpp"

namespace ssprep {

struct OpticalSettings {
    Complex gamma{30.0, 0.0};
    Complex chi{30.0, 0.0};
    /// Dimensionless interaction phase g t.
    double gt = 0.6;
    double phi_p = 0.0;

    /// tan(eta) = (|chi| - |gamma|) / (|chi| + |gamma|).
    double eta() const;
    double photon_mean() const {
        return std::norm(gamma) + std::norm(chi);
    }
    /// Throws Error(invalid_argument) for zero light or a non-finite/zero gt.
    void validate() const;

    /// |gamma| = |chi| = amplitude, equal phases, phi_p = 0 and
    /// gt = pi / (2 J_max + 1) so that m -> m_0 is injective on [-J_max, J_max].
    static OpticalSettings strong(const EnsembleShape &shape, double amplitude = 30.0);
};

struct PhotonOutcome {
    std::int64_t n_c = 0;
    std::int64_t n_d = 0;
    double probability = 0.0;
};

struct GaussianPosterior {
    double m0;
    double sigma2;
};

/// Peak position and variance of the Gaussian envelope, or nullopt where the
/// approximation is undefined (a zero count, or |n_d - n_c| >= (n_c + n_d) |cos 2 eta|).
std::optional<GaussianPosterior> gaussian_posterior(const OpticalSettings &settings, std::int64_t n_c,
                                                    std::int64_t n_d);

/// Complex factor multiplying psi_m for each m of magnetization_values().
/// All zeros where the Gaussian approximation is undefined, except for the
/// vacuum outcome (0, 0), whose exact factor is exp(-(|gamma|^2 + |chi|^2) / 2).
std::vector<Complex> posterior_factors(const EnsembleShape &shape, const OpticalSettings &settings,
                                       std::int64_t n_c, std::int64_t n_d);

template <QuantumState S>
struct Posterior {
    S state;  // unnormalized
    double probability;
};

/// Applies the posterior factors; probability is the squared norm (trace) of the result.
template <QuantumState S>
Posterior<S> posterior_state(const S &state, const OpticalSettings &settings, std::int64_t n_c, std::int64_t n_d);

struct Truncation {
    /// Each mode is enumerated over mean +/- window_sigmas * sqrt(mean), for the
    /// mode means that put the posterior peak on each admissible m.
    double window_sigmas = 6.0;
    /// Largest tolerated missing probability mass before failing.
    double max_mass_deficit = 1e-3;
};

/// Photon-count grid and per-outcome |factor_m|^2 table for one (shape, settings) pair.
class QndMeasurement {
  public:
    QndMeasurement(EnsembleShape shape, OpticalSettings settings, Truncation truncation = {});

    const EnsembleShape &shape() const {
        return shape_;
    }
    const OpticalSettings &settings() const {
        return settings_;
    }
    std::size_t grid_size() const {
        return grid_.size();
    }

    /// P(n_c, n_d) = sum_m p_m |factor_m(n_c, n_d)|^2 over the grid, for z-basis
    /// Born weights p_m. Throws Error(truncation_deficit) if the mass is short
    /// of 1 by more than the configured deficit.
    std::vector<PhotonOutcome> distribution(std::span<const double> magnetization_weights) const;

    /// Sum over the grid of |factor_m|^2 for every m, i.e. the outcome mass seen
    /// by a state with all its weight on m.
    std::vector<double> mass_per_magnetization() const;

    /// Admissible m nearest the posterior peak m_0; where m_0 is undefined, the m
    /// carrying the largest posterior weight.
    HalfInteger infer_magnetization(std::int64_t n_c, std::int64_t n_d,
                                    std::span<const double> magnetization_weights) const;

    struct Sample {
        PhotonOutcome outcome;
        HalfInteger inferred_m;
    };
    /// Draws (n_c, n_d) from the renormalized grid distribution.
    Sample sample(std::span<const double> magnetization_weights, RandomStream &rng) const;

  private:
    struct Entry {
        std::uint32_t slot;
        double weight;
    };

    EnsembleShape shape_;
    OpticalSettings settings_;
    Truncation truncation_;
    std::vector<std::pair<std::int64_t, std::int64_t>> grid_;
    // CSR: entries_[offsets_[k] .. offsets_[k + 1]) are the nonnegligible |factor_m|^2 at grid point k.
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

template <QuantumState S>
std::vector<PhotonOutcome> outcome_distribution(const S &state, const OpticalSettings &settings,
                                                const Truncation &truncation = {}) {
    return QndMeasurement(state.shape(), settings, truncation).distribution(magnetization_weights(state));
}

struct ProjectorCheckReport {
    int particles = 0;
    int two_j = 0;
    OpticalSettings settings;
    std::size_t states = 0;
    std::size_t samples_per_state = 0;
    double worst_trace_distance = 0.0;
    double mean_trace_distance = 0.0;
    /// Envelope variance at the symmetric outcome n_c = n_d = mean / 2.
    double symmetric_sigma2 = 0.0;
    double worst_mass_deficit = 0.0;
    std::string regime;  // "projective", "intermediate" or "squeezing"
};

/// Compares the QND state update (sample counts, collapse, normalize, drop the
/// optical record) against the ideal z projection onto the inferred m, over
/// randomized pure states.
ProjectorCheckReport effective_projector_check(const EnsembleShape &shape, const OpticalSettings &settings,
                                               std::uint64_t seed = 1, std::size_t states = 20,
                                               std::size_t samples_per_state = 50);

std::string to_json(const ProjectorCheckReport &report);

}  // namespace ssprep

#endif
