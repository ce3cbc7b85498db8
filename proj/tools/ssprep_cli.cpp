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

// Command-line front end over the ssprep C interface.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssprep/ssprep.h"

namespace {

struct ConfigDeleter {
    void operator()(ssprep_config *c) const {
        ssprep_config_free(c);
    }
};
struct ArchiveDeleter {
    void operator()(ssprep_archive *a) const {
        ssprep_archive_free(a);
    }
};
struct StringDeleter {
    void operator()(char *s) const {
        ssprep_string_free(s);
    }
};
using ConfigPtr = std::unique_ptr<ssprep_config, ConfigDeleter>;
using ArchivePtr = std::unique_ptr<ssprep_archive, ArchiveDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Thrown to unwind with a status after the message has been printed.
struct Failure {
    int status;
};

void check(int status, const std::string &context) {
    if (status == SSPREP_OK)
        return;
    std::cerr << "ssprep: " << context << ": " << ssprep_last_error() << " [" << ssprep_status_name(status) << "]\n";
    throw Failure{status};
}

ArchivePtr open_archive(const std::string &path) {
    ssprep_archive *raw = nullptr;
    check(ssprep_archive_open(path.c_str(), &raw), "opening " + path);
    return ArchivePtr(raw);
}

struct RunOptions {
    std::string preset;
    std::string config_file;
    std::optional<int> trajectories;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string backend;
    std::string mcut;
    bool unraveling = false;
    std::optional<int> threads;
    std::vector<std::string> overrides;
};

int do_run(const RunOptions &o) {
    ssprep_config *raw = nullptr;
    if (!o.preset.empty())
        check(ssprep_config_from_preset(o.preset.c_str(), &raw), "preset");
    else
        check(ssprep_config_from_file(o.config_file.c_str(), &raw), "config " + o.config_file);
    ConfigPtr config(raw);

    auto set = [&](const std::string &key, const std::string &value) {
        check(ssprep_config_set(config.get(), key.c_str(), value.c_str()), "option " + key);
    };
    for (const auto &kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "ssprep: --set expects key=value, got '" << kv << "'\n";
            return SSPREP_ERR_INVALID_ARGUMENT;
        }
        set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.trajectories)
        set("trajectories", std::to_string(*o.trajectories));
    if (o.seed)
        set("seed", std::to_string(*o.seed));
    if (!o.out.empty())
        set("out", o.out);
    if (!o.backend.empty())
        set("backend", o.backend);
    if (!o.mcut.empty())
        set("m_cut", o.mcut);
    if (o.unraveling)
        set("representation", "unraveling");
    if (o.threads)
        set("threads", std::to_string(*o.threads));
    check(ssprep_config_validate(config.get()), "configuration");

    ssprep_archive *archive_raw = nullptr;
    check(ssprep_run(config.get(), &archive_raw), "run");
    ArchivePtr archive(archive_raw);
    char *text = nullptr;
    check(ssprep_archive_summary_text(archive.get(), &text), "summary");
    StringPtr owned(text);
    std::cout << owned.get();
    return SSPREP_OK;
}

int do_replay(const std::string &path, std::size_t row, const std::string &expected_config,
              const std::string &expected_preset) {
    auto archive = open_archive(path);
    ConfigPtr expected;
    if (!expected_config.empty() || !expected_preset.empty()) {
        ssprep_config *raw = nullptr;
        if (!expected_preset.empty())
            check(ssprep_config_from_preset(expected_preset.c_str(), &raw), "preset");
        else
            check(ssprep_config_from_file(expected_config.c_str(), &raw), "config " + expected_config);
        expected.reset(raw);
    }
    char *report = nullptr;
    check(ssprep_archive_replay(archive.get(), row, expected.get(), &report), "replay");
    StringPtr owned(report);
    std::cout << owned.get() << "\n";
    return nlohmann::json::parse(owned.get()).at("identical_events").get<bool>() ? SSPREP_OK : SSPREP_ERR_INTERNAL;
}

int do_summarize(const std::string &path, bool json) {
    auto archive = open_archive(path);
    char *out = nullptr;
    if (json)
        check(ssprep_archive_summary_json(archive.get(), &out), "summarize");
    else
        check(ssprep_archive_summary_text(archive.get(), &out), "summarize");
    StringPtr owned(out);
    std::cout << owned.get() << (json ? "\n" : "");
    return SSPREP_OK;
}

int do_qnd_report(int particles, int two_j, double amplitude, std::uint64_t seed, const std::string &out_path) {
    char *json = nullptr;
    check(ssprep_qnd_report(particles, two_j, amplitude, seed, &json), "qnd report");
    StringPtr owned(json);
    if (out_path.empty()) {
        std::cout << owned.get() << "\n";
    } else {
        std::ofstream f(out_path);
        f << owned.get() << "\n";
        if (!f) {
            std::cerr << "ssprep: cannot write " << out_path << "\n";
            return SSPREP_ERR_IO;
        }
    }
    return SSPREP_OK;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Supersinglet preparation by repeated collective projections"};
    app.set_version_flag("--version", std::string(ssprep_version()));
    app.require_subcommand(1);

    RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "Run a batch of trajectories and write an archive");
    auto *preset_opt = run_cmd->add_option("--preset", run.preset,
                                           "fig-n4-mixed, fig-n4-coherent, fig-n10-mixed or fig-n11-mixed");
    auto *config_opt = run_cmd->add_option("--config", run.config_file, "Flat key = value configuration file")
                           ->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run_cmd->add_option("--trajectories", run.trajectories, "Number of trajectories")->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--backend", run.backend, "Measurement backend")->check(CLI::IsMember({"ideal", "qnd"}));
    run_cmd->add_option("--mcut", run.mcut, "Acceptance threshold, e.g. 0 or 1/2");
    run_cmd->add_flag("--unraveling", run.unraveling, "Sample pure product states from the mixed ensemble");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all hardware threads)");
    run_cmd->add_option("--set", run.overrides, "Override any configuration key: key=value");

    std::string archive_path;
    std::size_t row = 0;
    std::string expected_config, expected_preset;
    auto *replay_cmd = app.add_subcommand("replay", "Re-run one archived trajectory and compare its events");
    replay_cmd->add_option("--archive", archive_path, "archive.jsonl or its directory")->required();
    replay_cmd->add_option("--row", row, "Row index")->required();
    auto *ec = replay_cmd->add_option("--config", expected_config, "Refuse unless the archive used this config");
    replay_cmd->add_option("--preset", expected_preset, "Refuse unless the archive used this preset")->excludes(ec);

    bool json = false;
    auto *sum_cmd = app.add_subcommand("summarize", "Aggregate statistics of an archive");
    sum_cmd->add_option("--archive", archive_path, "archive.jsonl or its directory")->required();
    sum_cmd->add_flag("--json", json, "Emit JSON instead of text");

    int particles = 4, two_j = 1;
    double amplitude = 30.0;
    std::uint64_t seed = 1;
    std::string out_path;
    auto *qnd_cmd = app.add_subcommand("qnd-report", "Compare the QND update against ideal projectors");
    qnd_cmd->add_option("--particles", particles, "N")->capture_default_str();
    qnd_cmd->add_option("--two-j", two_j, "2j")->capture_default_str();
    qnd_cmd->add_option("--amplitude", amplitude, "|gamma| = |chi|")->capture_default_str();
    qnd_cmd->add_option("--seed", seed, "Seed for the randomized states")->capture_default_str();
    qnd_cmd->add_option("--out", out_path, "Write the JSON report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (run.preset.empty() && run.config_file.empty()) {
                std::cerr << "ssprep: run needs --preset or --config\n";
                return SSPREP_ERR_INVALID_ARGUMENT;
            }
            return do_run(run);
        }
        if (*replay_cmd)
            return do_replay(archive_path, row, expected_config, expected_preset);
        if (*sum_cmd)
            return do_summarize(archive_path, json);
        if (*qnd_cmd)
            return do_qnd_report(particles, two_j, amplitude, seed, out_path);
    } catch (const Failure &f) {
        return f.status;
    }
    return 0;
}
