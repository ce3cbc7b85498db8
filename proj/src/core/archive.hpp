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

#ifndef SSPREP_CORE_ARCHIVE_HPP
#define SSPREP_CORE_ARCHIVE_HPP

// Run archives: archive.jsonl (header line, one line per trajectory, summary
// line), one CSV time series per trajectory and summary.json.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/protocol.hpp"

namespace ssprep {

inline constexpr int kArchiveSchemaVersion = 1;
inline constexpr double kClusterTolerance = 1e-6;

struct ArchivedTrajectory {
    std::size_t index = 0;
    /// "density", "pure" or "unraveling".
    std::string representation;
    TrajectoryResult result;
};

nlohmann::json to_json(const MeasurementEvent &event);
MeasurementEvent event_from_json(const nlohmann::json &j);
nlohmann::json to_json(const RoundObservables &obs);
RoundObservables observables_from_json(const nlohmann::json &j);

nlohmann::json row_to_json(const ArchivedTrajectory &row, std::uint64_t fingerprint);
/// Throws Error(schema_mismatch) for missing or malformed fields and
/// Error(invalid_argument) for a seed that is not a decimal u64.
ArchivedTrajectory row_from_json(const nlohmann::json &j, const ProtocolConfig &protocol);

std::string fingerprint_hex(std::uint64_t fingerprint);
/// Strict decimal u64 parse; throws Error(invalid_argument).
std::uint64_t parse_seed(const std::string &text);

/// Aggregate statistics over rows in index order. Deterministic in the rows.
nlohmann::json summarize_rows(const ExperimentConfig &config, const std::vector<ArchivedTrajectory> &rows);
/// Human-readable rendering of a summary object.
std::string summary_text(const nlohmann::json &summary);

/// The series file name for one trajectory, e.g. series_000042.csv.
std::string series_file_name(std::size_t index);
std::string series_csv(const ArchivedTrajectory &row, bool with_components);

class ArchiveWriter {
  public:
    /// Creates `dir` and writes the header line. Throws Error(io).
    ArchiveWriter(const std::filesystem::path &dir, const ExperimentConfig &config);

    void write(const ArchivedTrajectory &row);
    /// Appends the summary line and writes summary.json.
    void finish(const nlohmann::json &summary);

    const std::filesystem::path &archive_path() const {
        return archive_path_;
    }

  private:
    std::filesystem::path dir_;
    std::filesystem::path archive_path_;
    std::ofstream out_;
    std::uint64_t fingerprint_;
    bool components_;
};

struct LoadedArchive {
    std::filesystem::path path;
    int schema_version = 0;
    ExperimentConfig config;
    std::uint64_t fingerprint = 0;
    std::vector<nlohmann::json> raw_rows;
    std::optional<nlohmann::json> stored_summary;
};

/// Accepts the archive file or its directory. Throws Error(io) when unreadable
/// and Error(schema_mismatch) for an unknown schema version or malformed header.
LoadedArchive read_archive(const std::filesystem::path &path);

/// Recomputes the aggregates from the rows; `stored_summary_matches` reports
/// whether they equal the archived summary. Throws Error(invalid_argument)
/// for an archive without rows.
nlohmann::json summarize_archive(const LoadedArchive &archive);

}  // namespace ssprep

#endif
