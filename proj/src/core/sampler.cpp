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

#include "core/sampler.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace ssprep {

std::size_t RandomStream::uniform_index(std::size_t n) {
    if (n == 0)
        fail(ErrorCode::invalid_argument, "uniform_index over an empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

double RandomStream::normal() {
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    std::uint64_t z = master_seed + (trajectory_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

OutcomeDistribution::OutcomeDistribution(std::vector<HalfInteger> outcomes, std::vector<double> probabilities,
                                         double floor)
    : outcomes_(std::move(outcomes)), probabilities_(std::move(probabilities)) {
    if (outcomes_.size() != probabilities_.size())
        fail(ErrorCode::invalid_argument, "outcome and probability lists differ in length");
    for (double &p : probabilities_) {
        if (!std::isfinite(p) || p < 0.0)
            fail(ErrorCode::invalid_argument, "probabilities must be finite and nonnegative");
        if (p <= floor)
            p = 0.0;
        total_ += p;
    }
    if (total_ > 0.0 && std::abs(total_ - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "probabilities sum to " << total_ << ", expected 1";
        fail(ErrorCode::invalid_argument, msg.str());
    }
}

OutcomeDistribution OutcomeDistribution::normalized(std::vector<HalfInteger> outcomes, std::vector<double> weights,
                                                    double floor) {
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            fail(ErrorCode::invalid_argument, "weights must be finite and nonnegative");
        total += w;
    }
    if (total > 0.0)
        for (double &w : weights)
            w /= total;
    return OutcomeDistribution(std::move(outcomes), std::move(weights), floor);
}

double OutcomeDistribution::probability(HalfInteger m) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
        if (outcomes_[i] == m)
            return probabilities_[i];
    return 0.0;
}

std::size_t OutcomeDistribution::support_size() const {
    std::size_t n = 0;
    for (double p : probabilities_)
        n += p > 0.0 ? 1 : 0;
    return n;
}

const char *sampler_name(SamplerKind kind) {
    return kind == SamplerKind::exact ? "exact" : "accept-reject";
}

namespace {

void require_support(const OutcomeDistribution &dist) {
    if (dist.support_size() == 0)
        fail(ErrorCode::invalid_argument, "cannot sample from an all-zero distribution");
}

}  // namespace

HalfInteger sample_exact(const OutcomeDistribution &dist, RandomStream &rng) {
    require_support(dist);
    const auto &p = dist.probabilities();
    const double u = rng.uniform() * dist.total();
    double cumulative = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            continue;
        last = i;
        cumulative += p[i];
        if (u < cumulative)
            return dist.outcomes()[i];
    }
    return dist.outcomes()[last];
}

HalfInteger sample_accept_reject(const OutcomeDistribution &dist, RandomStream &rng, std::size_t max_iterations) {
    require_support(dist);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < dist.probabilities().size(); ++i)
        if (dist.probabilities()[i] > 0.0)
            support.push_back(i);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        const std::size_t proposal = support[rng.uniform_index(support.size())];
        if (rng.uniform() < dist.probabilities()[proposal])
            return dist.outcomes()[proposal];
    }
    fail(ErrorCode::sampler_exhausted,
         "accept/reject sampler exceeded " + std::to_string(max_iterations) + " proposals");
}

HalfInteger sample(const OutcomeDistribution &dist, RandomStream &rng, SamplerKind kind) {
    return kind == SamplerKind::exact ? sample_exact(dist, rng) : sample_accept_reject(dist, rng);
}

std::size_t sample_index(std::span<const double> weights, RandomStream &rng) {
    double total = 0.0;
    std::size_t last = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            fail(ErrorCode::invalid_argument, "weights must be finite and nonnegative");
        total += weights[i];
        if (weights[i] > 0.0)
            last = i;
    }
    if (last == weights.size())
        fail(ErrorCode::invalid_argument, "cannot sample from all-zero weights");
    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cumulative += weights[i];
        if (weights[i] > 0.0 && u < cumulative)
            return i;
    }
    return last;
}

}  // namespace ssprep
