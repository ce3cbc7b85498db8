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

#include "ssprep/ssprep.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/archive.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/multiplets.hpp"
#include "core/qnd.hpp"
#include "core/runner.hpp"

struct ssprep_config {
    ssprep::ExperimentConfig value;
};

struct ssprep_archive {
    ssprep::LoadedArchive value;
};

namespace {

thread_local std::string last_error;

int record(int status, const std::string &message) {
    last_error = message;
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
int guarded(F &&body) {
    try {
        body();
        return SSPREP_OK;
    } catch (const ssprep::Error &e) {
        return record(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return record(SSPREP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return record(SSPREP_ERR_INTERNAL, e.what());
    } catch (...) {
        return record(SSPREP_ERR_INTERNAL, "unknown failure");
    }
}

char *copy_string(const std::string &s) {
    auto *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out == nullptr)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char *ssprep_version(void) {
    return "0.1.0";
}

const char *ssprep_status_name(int status) {
    switch (status) {
    case SSPREP_OK:
        return "ok";
    case SSPREP_ERR_NULL_POINTER:
        return "null_pointer";
    case SSPREP_ERR_INTERNAL:
        return "internal";
    default:
        if (status >= SSPREP_ERR_INVALID_ARGUMENT && status <= SSPREP_ERR_TRUNCATION_DEFICIT)
            return ssprep::error_code_name(static_cast<ssprep::ErrorCode>(status));
        return "unknown";
    }
}

const char *ssprep_last_error(void) {
    return last_error.c_str();
}

void ssprep_string_free(char *str) {
    std::free(str);
}

int ssprep_config_default(ssprep_config **out) {
    if (out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "out must not be null");
    return guarded([&] { *out = new ssprep_config{}; });
}

int ssprep_config_from_preset(const char *name, ssprep_config **out) {
    if (out == nullptr || name == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "name and out must not be null");
    return guarded([&] { *out = new ssprep_config{ssprep::preset_config(name)}; });
}

int ssprep_config_from_text(const char *text, ssprep_config **out) {
    if (out == nullptr || text == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "text and out must not be null");
    return guarded([&] { *out = new ssprep_config{ssprep::parse_config(text)}; });
}

int ssprep_config_from_file(const char *path, ssprep_config **out) {
    if (out == nullptr || path == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "path and out must not be null");
    return guarded([&] { *out = new ssprep_config{ssprep::load_config(path)}; });
}

int ssprep_config_set(ssprep_config *config, const char *key, const char *value) {
    if (config == nullptr || key == nullptr || value == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "config, key and value must not be null");
    return guarded([&] { config->value.set(key, value); });
}

int ssprep_config_validate(const ssprep_config *config) {
    if (config == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "config must not be null");
    return guarded([&] { config->value.validate(); });
}

int ssprep_config_to_text(const ssprep_config *config, char **out) {
    if (config == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "config and out must not be null");
    return guarded([&] { *out = copy_string(ssprep::to_config_text(config->value)); });
}

int ssprep_preset_names(char **out) {
    if (out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "out must not be null");
    return guarded([&] {
        std::string joined;
        for (const auto &n : ssprep::preset_names())
            joined += (joined.empty() ? "" : ",") + n;
        *out = copy_string(joined);
    });
}

void ssprep_config_free(ssprep_config *config) {
    delete config;
}

int ssprep_run(const ssprep_config *config, ssprep_archive **out) {
    if (config == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "config must not be null");
    return guarded([&] {
        const auto result = ssprep::run_experiment(config->value);
        if (out != nullptr)
            *out = new ssprep_archive{ssprep::read_archive(result.archive_path)};
    });
}

int ssprep_archive_open(const char *path, ssprep_archive **out) {
    if (path == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "path and out must not be null");
    return guarded([&] { *out = new ssprep_archive{ssprep::read_archive(path)}; });
}

int ssprep_archive_row_count(const ssprep_archive *archive, size_t *out) {
    if (archive == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "archive and out must not be null");
    *out = archive->value.raw_rows.size();
    return SSPREP_OK;
}

int ssprep_archive_config_text(const ssprep_archive *archive, char **out) {
    if (archive == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "archive and out must not be null");
    return guarded([&] { *out = copy_string(ssprep::to_config_text(archive->value.config)); });
}

int ssprep_archive_summary_json(const ssprep_archive *archive, char **out) {
    if (archive == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "archive and out must not be null");
    return guarded([&] { *out = copy_string(ssprep::summarize_archive(archive->value).dump(2)); });
}

int ssprep_archive_summary_text(const ssprep_archive *archive, char **out) {
    if (archive == nullptr || out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "archive and out must not be null");
    return guarded([&] { *out = copy_string(ssprep::summary_text(ssprep::summarize_archive(archive->value))); });
}

int ssprep_archive_replay(const ssprep_archive *archive, size_t row, const ssprep_config *expected,
                          char **report_json) {
    if (archive == nullptr || report_json == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "archive and report_json must not be null");
    return guarded([&] {
        const auto report = ssprep::replay(archive->value, row, expected ? &expected->value : nullptr);
        *report_json = copy_string(ssprep::to_json(report).dump(2));
    });
}

void ssprep_archive_free(ssprep_archive *archive) {
    delete archive;
}

int ssprep_multiplet_count(int particles, int two_j, int twice_total, uint64_t *out) {
    if (out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "out must not be null");
    return guarded([&] {
        const auto table = ssprep::multiplet_counts(ssprep::EnsembleShape(particles, two_j));
        *out = table.count(ssprep::HalfInteger::from_twice(twice_total));
    });
}

int ssprep_rotation_angle(int particles, int two_j, int twice_m, double *out) {
    if (out == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "out must not be null");
    return guarded([&] {
        const ssprep::EnsembleShape shape(particles, two_j);
        *out = ssprep::rotation_angle(ssprep::HalfInteger::from_twice(twice_m), shape.j_max());
    });
}

int ssprep_qnd_report(int particles, int two_j, double amplitude, uint64_t seed, char **out_json) {
    if (out_json == nullptr)
        return record(SSPREP_ERR_NULL_POINTER, "out_json must not be null");
    return guarded([&] {
        const ssprep::EnsembleShape shape(particles, two_j);
        const auto settings = ssprep::OpticalSettings::strong(shape, amplitude);
        *out_json = copy_string(ssprep::to_json(ssprep::effective_projector_check(shape, settings, seed)));
    });
}

}  // extern "C"
