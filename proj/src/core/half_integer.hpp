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

#ifndef SSPREP_CORE_HALF_INTEGER_HPP
#define SSPREP_CORE_HALF_INTEGER_HPP

#include <compare>
#include <cstdlib>
#include <string>
#include <string_view>

namespace ssprep {

/// An integer or half-integer quantum number stored as twice its value.
struct HalfInteger {
    int twice = 0;

    static constexpr HalfInteger from_twice(int t) {
        return HalfInteger{t};
    }
    static constexpr HalfInteger whole(int v) {
        return HalfInteger{2 * v};
    }

    constexpr double value() const {
        return 0.5 * twice;
    }
    constexpr HalfInteger abs() const {
        return HalfInteger{twice < 0 ? -twice : twice};
    }
    constexpr bool is_integral() const {
        return twice % 2 == 0;
    }

    friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;
    friend constexpr HalfInteger operator-(HalfInteger a) {
        return HalfInteger{-a.twice};
    }
    friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
        return HalfInteger{a.twice + b.twice};
    }

    /// "3/2", "-1/2", "1.5", "2" etc. Throws Error(invalid_argument) otherwise.
    static HalfInteger parse(std::string_view text);
    std::string to_string() const;
};

}  // namespace ssprep

#endif
