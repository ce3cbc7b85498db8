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

// Exercises the shared library strictly through its C header.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "ssprep/ssprep.h"

namespace {

std::string take(char *s) {
    std::string out(s ? s : "");
    ssprep_string_free(s);
    return out;
}

TEST(CApiTest, VersionAndStatusNames) {
    EXPECT_STREQ(ssprep_version(), "0.1.0");
    EXPECT_STREQ(ssprep_status_name(SSPREP_OK), "ok");
    EXPECT_STREQ(ssprep_status_name(SSPREP_ERR_INVALID_CONFIG), "invalid_config");
    EXPECT_STREQ(ssprep_status_name(12345), "unknown");
}

TEST(CApiTest, NullPointersRejected) {
    EXPECT_EQ(ssprep_config_from_preset("fig-n4-mixed", nullptr), SSPREP_ERR_NULL_POINTER);
    EXPECT_EQ(ssprep_config_validate(nullptr), SSPREP_ERR_NULL_POINTER);
    EXPECT_NE(std::string(ssprep_last_error()), "");
    ssprep_config_free(nullptr);
    ssprep_archive_free(nullptr);
}

TEST(CApiTest, ConfigErrorsCarryMessages) {
    ssprep_config *c = nullptr;
    EXPECT_EQ(ssprep_config_from_preset("nope", &c), SSPREP_ERR_INVALID_CONFIG);
    EXPECT_EQ(c, nullptr);
    EXPECT_NE(std::string(ssprep_last_error()).find("unknown preset"), std::string::npos);

    EXPECT_EQ(ssprep_config_from_text("particles = 4\ncolour = blue\n", &c), SSPREP_ERR_INVALID_CONFIG);
    EXPECT_NE(std::string(ssprep_last_error()).find("colour"), std::string::npos);

    ASSERT_EQ(ssprep_config_default(&c), SSPREP_OK);
    EXPECT_EQ(ssprep_config_set(c, "m_cut", "7"), SSPREP_OK);
    EXPECT_EQ(ssprep_config_validate(c), SSPREP_ERR_INVALID_CONFIG);
    EXPECT_EQ(ssprep_config_set(c, "m_cut", "x"), SSPREP_ERR_INVALID_CONFIG);
    ssprep_config_free(c);
}

TEST(CApiTest, RunSummarizeReplay) {
    const auto dir = std::filesystem::temp_directory_path() / "ssprep_capi_run";
    std::filesystem::remove_all(dir);
    ssprep_config *c = nullptr;
    ASSERT_EQ(ssprep_config_from_preset("fig-n4-coherent", &c), SSPREP_OK);
    ASSERT_EQ(ssprep_config_set(c, "trajectories", "4"), SSPREP_OK);
    ASSERT_EQ(ssprep_config_set(c, "out", dir.string().c_str()), SSPREP_OK);
    ssprep_archive *a = nullptr;
    ASSERT_EQ(ssprep_run(c, &a), SSPREP_OK) << ssprep_last_error();
    size_t rows = 0;
    ASSERT_EQ(ssprep_archive_row_count(a, &rows), SSPREP_OK);
    EXPECT_EQ(rows, 4u);

    char *text = nullptr;
    ASSERT_EQ(ssprep_archive_summary_json(a, &text), SSPREP_OK);
    EXPECT_NE(take(text).find("\"convergence_rate\": 1.0"), std::string::npos);
    ASSERT_EQ(ssprep_archive_replay(a, 3, c, &text), SSPREP_OK) << ssprep_last_error();
    EXPECT_NE(take(text).find("\"identical_events\": true"), std::string::npos);
    EXPECT_EQ(ssprep_archive_replay(a, 4, nullptr, &text), SSPREP_ERR_INVALID_ARGUMENT);

    ssprep_config *other = nullptr;
    ASSERT_EQ(ssprep_config_from_preset("fig-n4-mixed", &other), SSPREP_OK);
    EXPECT_EQ(ssprep_archive_replay(a, 0, other, &text), SSPREP_ERR_CONFIG_MISMATCH);
    ssprep_config_free(other);

    ssprep_archive *reopened = nullptr;
    ASSERT_EQ(ssprep_archive_open(dir.string().c_str(), &reopened), SSPREP_OK);
    ASSERT_EQ(ssprep_archive_config_text(reopened, &text), SSPREP_OK);
    EXPECT_NE(take(text).find("initial = y-polarized"), std::string::npos);
    ssprep_archive_free(reopened);
    ssprep_archive_free(a);
    ssprep_config_free(c);
    EXPECT_EQ(ssprep_archive_open("/nonexistent/archive.jsonl", &a), SSPREP_ERR_IO);
}

TEST(CApiTest, PhysicsHelpers) {
    uint64_t n = 0;
    ASSERT_EQ(ssprep_multiplet_count(10, 1, 0, &n), SSPREP_OK);
    EXPECT_EQ(n, 42u);
    double theta = 0.0;
    ASSERT_EQ(ssprep_rotation_angle(4, 1, 2, &theta), SSPREP_OK);
    EXPECT_NEAR(theta, 0.42053433528396517, 1e-15);
    EXPECT_EQ(ssprep_rotation_angle(4, 1, 6, &theta), SSPREP_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(ssprep_multiplet_count(40, 1, 0, &n), SSPREP_ERR_INVALID_ARGUMENT);
    char *names = nullptr;
    ASSERT_EQ(ssprep_preset_names(&names), SSPREP_OK);
    EXPECT_EQ(take(names), "fig-n4-mixed,fig-n4-coherent,fig-n10-mixed,fig-n11-mixed");
}

}  // namespace
