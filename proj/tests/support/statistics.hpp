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

#ifndef SSPREP_TESTS_SUPPORT_STATISTICS_HPP
#define SSPREP_TESTS_SUPPORT_STATISTICS_HPP

// Pearson goodness-of-fit against expected probabilities.

#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace stats {

struct ChiSquare {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Cells with zero expected probability must have zero counts; they are
/// dropped, as are no other cells.
inline ChiSquare chi_square(const std::vector<std::size_t> &counts, const std::vector<double> &probabilities) {
    std::size_t total = 0;
    for (auto c : counts)
        total += c;
    ChiSquare out;
    int cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probabilities[i] * static_cast<double>(total);
        if (probabilities[i] <= 0.0) {
            if (counts[i] != 0) {
                out.p_value = 0.0;
                out.statistic = 1e300;
                return out;
            }
            continue;
        }
        const double diff = static_cast<double>(counts[i]) - expected;
        out.statistic += diff * diff / expected;
        ++cells;
    }
    out.degrees_of_freedom = cells - 1;
    if (out.degrees_of_freedom < 1)
        return out;
    boost::math::chi_squared dist(out.degrees_of_freedom);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

}  // namespace stats

#endif
