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

#ifndef SSPREP_CORE_CONFIG_HPP
#define SSPREP_CORE_CONFIG_HPP

// Experiment configuration: presets and the flat `key = value` file format.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/protocol.hpp"

namespace ssprep {

/// How a completely mixed start is simulated. `automatic` keeps a density
/// operator up to N = 10 and switches to pure-state unraveling above.
enum class Representation { automatic, density, unraveling };

const char *representation_name(Representation representation);

/// Optical settings in user units. gt = 0 selects pi / (2 J_max + 1).
struct QndOptions {
    double gamma_abs = 30.0;
    double gamma_arg = 0.0;
    double chi_abs = 30.0;
    double chi_arg = 0.0;
    double gt = 0.0;
    double phi_p = 0.0;

    friend bool operator==(const QndOptions &, const QndOptions &) = default;
};

struct ExperimentConfig {
    int particles = 4;
    int two_j = 1;
    double qubit_cap = kDefaultQubitCap;
    InitialStateKind initial = InitialStateKind::completely_mixed;
    Representation representation = Representation::automatic;
    ProtocolConfig protocol;
    QndOptions qnd;
    int trajectories = 100;
    std::uint64_t master_seed = 1;
    std::string out_dir = "run";
    std::string preset;
    /// 0 uses every hardware thread.
    int threads = 0;

    EnsembleShape shape() const;
    /// Protocol settings with the optical block resolved for this ensemble.
    ProtocolConfig resolved_protocol() const;
    /// True when trajectories start from a sampled product basis state.
    bool uses_unraveling() const;

    /// Every violated constraint, one message each; empty when valid.
    std::vector<std::string> problems() const;
    /// Throws Error(invalid_config) listing all problems.
    void validate() const;

    /// Sets one field from its textual form. Throws Error(invalid_config).
    void set(std::string_view key, std::string_view value);
};

std::vector<std::string> preset_names();
/// Throws Error(invalid_config) for unknown names.
ExperimentConfig preset_config(std::string_view name);

/// Parses the flat format: one `key = value` per line, `#` starts a comment.
/// A `preset` key is applied first, the remaining keys override it. Unknown
/// keys, malformed values and duplicates are all reported in one error.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ExperimentConfig &config);

/// FNV-1a of the canonical text restricted to the fields that determine
/// the dynamics (preset name, output path, trajectory count, threads and
/// master seed excluded).
std::uint64_t config_fingerprint(const ExperimentConfig &config);

}  // namespace ssprep

#endif
