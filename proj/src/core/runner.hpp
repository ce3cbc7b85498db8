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

#ifndef SSPREP_CORE_RUNNER_HPP
#define SSPREP_CORE_RUNNER_HPP

// Batch execution of trajectories and replay of archived rows.

#include <cstddef>
#include <filesystem>
#include <vector>

#include "core/archive.hpp"
#include "core/config.hpp"

namespace ssprep {

/// Runs trajectory `index` of `config` from its derived seed.
ArchivedTrajectory run_trajectory(const ExperimentConfig &config, std::size_t index,
                                  const ObservableContext &context);

struct RunResult {
    std::filesystem::path archive_path;
    std::vector<ArchivedTrajectory> rows;
    nlohmann::json summary;
};

/// Validates `config`, runs every trajectory on a worker pool and writes the
/// archive, per-trajectory CSVs and summary.json under config.out_dir. Rows are
/// written in index order regardless of completion order.
RunResult run_experiment(const ExperimentConfig &config);

struct ReplayReport {
    std::size_t row = 0;
    std::uint64_t seed = 0;
    std::size_t events = 0;
    bool identical_events = false;
    /// Largest absolute difference over all archived observables.
    double max_observable_deviation = 0.0;
    ArchivedTrajectory replayed;
};

/// Re-runs archived row `row`. When `expected` is given, refuses with
/// Error(config_mismatch) unless it describes the same trajectories as the
/// archive. A row whose seed does not parse or does not derive from the
/// master seed is rejected with Error(invalid_argument).
ReplayReport replay(const LoadedArchive &archive, std::size_t row, const ExperimentConfig *expected = nullptr);

nlohmann::json to_json(const ReplayReport &report);

}  // namespace ssprep

#endif
