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

#ifndef SSPREP_CORE_SAMPLER_HPP
#define SSPREP_CORE_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "core/half_integer.hpp"
#include "core/hilbert.hpp"

namespace ssprep {

/// Seeded 64-bit stream. Identical seeds and draw order give identical values.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {
    }

    std::uint64_t seed() const {
        return seed_;
    }
    std::uint64_t draws() const {
        return draws_;
    }

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
    /// Uniform on {0, ..., n - 1}; rejection keeps it unbiased.
    std::size_t uniform_index(std::size_t n);
    /// Standard normal via Box-Muller (two uniform draws per call).
    double normal();

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
};

/// SplitMix64 finalizer applied to master + (index + 1) * golden-ratio
/// increment. Stable across platforms and independent of execution order.
std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

class OutcomeDistribution {
  public:
    /// Weights at or below `floor` become exactly zero. Non-zero totals must be 1 within 1e-9.
    OutcomeDistribution(std::vector<HalfInteger> outcomes, std::vector<double> probabilities,
                        double floor = kProbabilityFloor);

    /// Rescales nonnegative weights to unit total before flooring.
    static OutcomeDistribution normalized(std::vector<HalfInteger> outcomes, std::vector<double> weights,
                                          double floor = kProbabilityFloor);

    const std::vector<HalfInteger> &outcomes() const {
        return outcomes_;
    }
    const std::vector<double> &probabilities() const {
        return probabilities_;
    }
    double probability(HalfInteger m) const;
    std::size_t support_size() const;
    double total() const {
        return total_;
    }

  private:
    std::vector<HalfInteger> outcomes_;
    std::vector<double> probabilities_;
    double total_ = 0.0;
};

enum class SamplerKind { exact, accept_reject };

const char *sampler_name(SamplerKind kind);

/// Cumulative-sum inversion of one uniform draw.
HalfInteger sample_exact(const OutcomeDistribution &dist, RandomStream &rng);

/// Uniform proposal over the nonzero support, accepted when r < p_m.
HalfInteger sample_accept_reject(const OutcomeDistribution &dist, RandomStream &rng,
                                 std::size_t max_iterations = 1'000'000);

HalfInteger sample(const OutcomeDistribution &dist, RandomStream &rng, SamplerKind kind);

/// Index drawn with probability proportional to nonnegative weights (cumulative inversion).
std::size_t sample_index(std::span<const double> weights, RandomStream &rng);

}  // namespace ssprep

#endif
