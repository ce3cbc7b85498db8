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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/runner.hpp"

namespace ssprep {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("ssprep_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> lines_of(const fs::path &p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

void write_lines(const fs::path &p, const std::vector<std::string> &lines) {
    std::ofstream out(p);
    for (const auto &l : lines)
        out << l << "\n";
}

class ArchiveTest : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        config_ = preset_config("fig-n4-mixed");
        config_.trajectories = 12;
        config_.master_seed = 31;
        config_.threads = 3;
        config_.out_dir = scratch("archive").string();
        result_ = run_experiment(config_);
    }
    static ExperimentConfig config_;
    static RunResult result_;
};

ExperimentConfig ArchiveTest::config_;
RunResult ArchiveTest::result_;

TEST_F(ArchiveTest, LayoutAndOrder) {
    const auto lines = lines_of(result_.archive_path);
    ASSERT_EQ(lines.size(), 14u);  // header, 12 rows, summary
    const auto header = nlohmann::json::parse(lines.front());
    EXPECT_EQ(header["schema_version"], kArchiveSchemaVersion);
    for (std::size_t i = 0; i < 12; ++i) {
        const auto row = nlohmann::json::parse(lines[i + 1]);
        EXPECT_EQ(row["index"], i);
        EXPECT_EQ(row["seed"], std::to_string(derive_trajectory_seed(31, i)));
        EXPECT_TRUE(fs::exists(fs::path(config_.out_dir) / series_file_name(i)));
    }
    EXPECT_EQ(nlohmann::json::parse(lines.back())["kind"], "summary");
    EXPECT_TRUE(fs::exists(fs::path(config_.out_dir) / "summary.json"));
}

TEST_F(ArchiveTest, CsvSchema) {
    const auto csv = lines_of(fs::path(config_.out_dir) / series_file_name(0));
    ASSERT_GE(csv.size(), 2u);
    EXPECT_EQ(csv[0], "trajectory_id,k,Jbar2,varJx,varJy,varJz,F,F_1,F_2");
    EXPECT_EQ(csv[1].substr(0, 4), "0,0,");
    EXPECT_EQ(csv.size(), result_.rows[0].result.rounds.size() + 2);
}

TEST_F(ArchiveTest, ParallelRunMatchesSerialTrajectories) {
    const ObservableContext ctx(config_.shape());
    for (std::size_t i : {0u, 5u, 11u}) {
        const auto serial = run_trajectory(config_, i, ctx);
        EXPECT_EQ(serial.result.events, result_.rows[i].result.events);
    }
}

TEST_F(ArchiveTest, RoundTripAndReplay) {
    const auto archive = read_archive(config_.out_dir);
    ASSERT_EQ(archive.raw_rows.size(), 12u);
    const auto protocol = archive.config.resolved_protocol();
    for (std::size_t i = 0; i < 12; ++i) {
        const auto row = row_from_json(archive.raw_rows[i], protocol);
        EXPECT_EQ(row.result.events, result_.rows[i].result.events);
        const auto report = replay(archive, i);
        EXPECT_TRUE(report.identical_events);
        EXPECT_LE(report.max_observable_deviation, 1e-12);
    }
}

TEST_F(ArchiveTest, StoredSummaryEqualsRecomputed) {
    const auto archive = read_archive(result_.archive_path);
    const auto summary = summarize_archive(archive);
    EXPECT_TRUE(summary["stored_summary_matches"].get<bool>());
    EXPECT_EQ(summary["trajectories"], 12);
    EXPECT_FALSE(summary_text(summary).empty());
}

TEST_F(ArchiveTest, ReplayRefusesDifferentConfig) {
    const auto archive = read_archive(config_.out_dir);
    auto other = config_;
    other.protocol.settle_rounds = 1;
    try {
        replay(archive, 0, &other);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::config_mismatch);
    }
    auto same = config_;
    same.out_dir = "somewhere-else";
    EXPECT_NO_THROW(replay(archive, 0, &same));
}

TEST_F(ArchiveTest, CorruptedSeedRejected) {
    const auto dir = scratch("corrupt");
    fs::create_directories(dir);
    auto lines = lines_of(result_.archive_path);
    auto row = nlohmann::json::parse(lines[1]);
    row["seed"] = "12x4";
    lines[1] = row.dump();
    auto row2 = nlohmann::json::parse(lines[2]);
    row2["seed"] = "12345";
    lines[2] = row2.dump();
    write_lines(dir / "archive.jsonl", lines);
    const auto archive = read_archive(dir);
    for (std::size_t r : {0u, 1u}) {
        try {
            replay(archive, r);
            FAIL();
        } catch (const Error &e) {
            EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
        }
    }
}

TEST_F(ArchiveTest, SchemaMismatchRejected) {
    const auto dir = scratch("schema");
    fs::create_directories(dir);
    auto lines = lines_of(result_.archive_path);
    auto header = nlohmann::json::parse(lines[0]);
    header["schema_version"] = kArchiveSchemaVersion + 1;
    lines[0] = header.dump();
    write_lines(dir / "archive.jsonl", lines);
    try {
        read_archive(dir);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::schema_mismatch);
    }
}

TEST_F(ArchiveTest, EmptyArchiveIsAnError) {
    const auto dir = scratch("empty");
    fs::create_directories(dir);
    write_lines(dir / "archive.jsonl", {lines_of(result_.archive_path).front()});
    const auto archive = read_archive(dir);
    EXPECT_THROW(summarize_archive(archive), Error);
    write_lines(dir / "archive.jsonl", {});
    EXPECT_THROW(read_archive(dir), Error);
}

TEST(RunnerTest, InvalidConfigFailsBeforeWriting) {
    auto c = preset_config("fig-n4-mixed");
    c.out_dir = scratch("invalid").string();
    c.protocol.m_cut = HalfInteger::whole(5);
    EXPECT_THROW(run_experiment(c), Error);
    EXPECT_FALSE(fs::exists(c.out_dir));
}

TEST(RunnerTest, UnravelingAndQndRows) {
    auto c = preset_config("fig-n4-mixed");
    c.trajectories = 3;
    c.threads = 1;
    c.representation = Representation::unraveling;
    c.protocol.backend = BackendKind::qnd;
    c.protocol.settle_rounds = 1;
    c.out_dir = scratch("qnd").string();
    const auto r = run_experiment(c);
    for (const auto &row : r.rows) {
        EXPECT_EQ(row.representation, "unraveling");
        EXPECT_TRUE(row.result.converged);
    }
    const auto archive = read_archive(c.out_dir);
    EXPECT_TRUE(replay(archive, 2).identical_events);
}

}  // namespace
}  // namespace ssprep
