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

#ifndef SSPREP_SSPREP_H
#define SSPREP_SSPREP_H

/*
 * C interface to the supersinglet preparation simulator.
 *
 * Every function returning int returns an ssprep_status. On failure a
 * message describing the error is available from ssprep_last_error() on the
 * calling thread until the next failing call. Strings handed out through
 * char** parameters are owned by the caller and released with
 * ssprep_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SSPREP_BUILDING_LIBRARY)
#define SSPREP_API __declspec(dllexport)
#else
#define SSPREP_API __declspec(dllimport)
#endif
#else
#define SSPREP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssprep_status {
    SSPREP_OK = 0,
    SSPREP_ERR_INVALID_ARGUMENT = 1,
    SSPREP_ERR_IMPOSSIBLE_OUTCOME = 2,
    SSPREP_ERR_SAMPLER_EXHAUSTED = 3,
    SSPREP_ERR_INVALID_CONFIG = 4,
    SSPREP_ERR_IO = 5,
    SSPREP_ERR_SCHEMA_MISMATCH = 6,
    SSPREP_ERR_CONFIG_MISMATCH = 7,
    SSPREP_ERR_TRUNCATION_DEFICIT = 8,
    SSPREP_ERR_NULL_POINTER = 90,
    SSPREP_ERR_INTERNAL = 99
} ssprep_status;

typedef struct ssprep_config ssprep_config;
typedef struct ssprep_archive ssprep_archive;

SSPREP_API const char *ssprep_version(void);
SSPREP_API const char *ssprep_status_name(int status);
/* Message of the most recent failure on this thread; "" if none. */
SSPREP_API const char *ssprep_last_error(void);
SSPREP_API void ssprep_string_free(char *str);

/* Configuration ---------------------------------------------------------- */

SSPREP_API int ssprep_config_default(ssprep_config **out);
SSPREP_API int ssprep_config_from_preset(const char *name, ssprep_config **out);
/* Flat "key = value" text; all problems are reported in one message. */
SSPREP_API int ssprep_config_from_text(const char *text, ssprep_config **out);
SSPREP_API int ssprep_config_from_file(const char *path, ssprep_config **out);
/* Sets one key, e.g. ("m_cut", "1/2"), ("backend", "qnd"), ("seed", "7"). */
SSPREP_API int ssprep_config_set(ssprep_config *config, const char *key, const char *value);
SSPREP_API int ssprep_config_validate(const ssprep_config *config);
SSPREP_API int ssprep_config_to_text(const ssprep_config *config, char **out);
/* Comma-separated preset names. */
SSPREP_API int ssprep_preset_names(char **out);
SSPREP_API void ssprep_config_free(ssprep_config *config);

/* Runs ----------------------------------------------------------------- */

/* Runs every trajectory and writes the archive under the configured output
 * directory. When out is non-null it receives the opened archive. */
SSPREP_API int ssprep_run(const ssprep_config *config, ssprep_archive **out);

SSPREP_API int ssprep_archive_open(const char *path, ssprep_archive **out);
SSPREP_API int ssprep_archive_row_count(const ssprep_archive *archive, size_t *out);
SSPREP_API int ssprep_archive_config_text(const ssprep_archive *archive, char **out);
/* Aggregates recomputed from the rows, as JSON; fails on an archive without rows. */
SSPREP_API int ssprep_archive_summary_json(const ssprep_archive *archive, char **out);
SSPREP_API int ssprep_archive_summary_text(const ssprep_archive *archive, char **out);
/* Re-runs one row and reports, as JSON, whether the events are identical.
 * expected may be null; otherwise it must describe the archived configuration. */
SSPREP_API int ssprep_archive_replay(const ssprep_archive *archive, size_t row, const ssprep_config *expected,
                                     char **report_json);
SSPREP_API void ssprep_archive_free(ssprep_archive *archive);

/* Physics helpers ------------------------------------------------------ */

/* Number of multiplets with total spin J = twice_total / 2 for N spins j = two_j / 2. */
SSPREP_API int ssprep_multiplet_count(int particles, int two_j, int twice_total, uint64_t *out);
/* arcsin(m / sqrt(J_max (J_max + 1))) with m = twice_m / 2. */
SSPREP_API int ssprep_rotation_angle(int particles, int two_j, int twice_m, double *out);
/* Empirical QND-versus-projector comparison at the strong operating point
 * with |gamma| = |chi| = amplitude, as JSON. */
SSPREP_API int ssprep_qnd_report(int particles, int two_j, double amplitude, uint64_t seed, char **out_json);

#ifdef __cplusplus
}
#endif

#endif
