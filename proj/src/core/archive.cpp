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

#include "core/archive.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace ssprep {

using nlohmann::json;

namespace {

const json &field(const json &j, const char *name) {
    if (!j.is_object() || !j.contains(name))
        fail(ErrorCode::schema_mismatch, std::string("archive record lacks field '") + name + "'");
    return j.at(name);
}

template <typename T>
T field_as(const json &j, const char *name) {
    try {
        return field(j, name).get<T>();
    } catch (const json::exception &e) {
        fail(ErrorCode::schema_mismatch, std::string("archive field '") + name + "' has the wrong type: " + e.what());
    }
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

json distribution(const std::vector<double> &values) {
    if (values.empty())
        return json{{"count", 0}};
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return json{{"count", values.size()},
                {"min", *std::min_element(values.begin(), values.end())},
                {"q1", quantile(values, 0.25)},
                {"median", quantile(values, 0.5)},
                {"q3", quantile(values, 0.75)},
                {"max", *std::max_element(values.begin(), values.end())},
                {"mean", sum / static_cast<double>(values.size())}};
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

json to_json(const MeasurementEvent &event) {
    json j{{"round", event.round},
           {"basis", event.basis == MeasurementBasis::z ? "z" : "x"},
           {"m", event.m.to_string()},
           {"p", event.born_probability},
           {"theta", event.applied_theta},
           {"sites", event.subensemble}};
    if (event.photon_counts)
        j["photons"] = {event.photon_counts->first, event.photon_counts->second};
    return j;
}

MeasurementEvent event_from_json(const json &j) {
    MeasurementEvent e;
    e.round = field_as<int>(j, "round");
    const auto basis = field_as<std::string>(j, "basis");
    if (basis != "z" && basis != "x")
        fail(ErrorCode::schema_mismatch, "event basis must be 'z' or 'x', got '" + basis + "'");
    e.basis = basis == "z" ? MeasurementBasis::z : MeasurementBasis::x;
    try {
        e.m = HalfInteger::parse(field_as<std::string>(j, "m"));
    } catch (const Error &err) {
        fail(ErrorCode::schema_mismatch, std::string("event outcome: ") + err.what());
    }
    e.born_probability = field_as<double>(j, "p");
    e.applied_theta = field_as<double>(j, "theta");
    e.subensemble = field_as<std::vector<int>>(j, "sites");
    if (j.contains("photons")) {
        const auto counts = field_as<std::vector<std::int64_t>>(j, "photons");
        if (counts.size() != 2)
            fail(ErrorCode::schema_mismatch, "event photons must hold two counts");
        e.photon_counts = std::pair{counts[0], counts[1]};
    }
    return e;
}

json to_json(const RoundObservables &obs) {
    return json{{"k", obs.round},       {"Jbar2", obs.jbar2}, {"varJx", obs.var_x},
                {"varJy", obs.var_y},   {"varJz", obs.var_z}, {"F", obs.fidelity},
                {"F_d", obs.fidelity_components}};
}

RoundObservables observables_from_json(const json &j) {
    RoundObservables o;
    o.round = field_as<int>(j, "k");
    o.jbar2 = field_as<double>(j, "Jbar2");
    o.var_x = field_as<double>(j, "varJx");
    o.var_y = field_as<double>(j, "varJy");
    o.var_z = field_as<double>(j, "varJz");
    o.fidelity = field_as<double>(j, "F");
    o.fidelity_components = field_as<std::vector<double>>(j, "F_d");
    return o;
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
    return buf;
}

std::uint64_t parse_seed(const std::string &text) {
    std::uint64_t seed = 0;
    const char *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, seed);
    if (text.empty() || ec != std::errc{} || ptr != end)
        fail(ErrorCode::invalid_argument, "seed field '" + text + "' is not a decimal 64-bit unsigned integer");
    return seed;
}

json row_to_json(const ArchivedTrajectory &row, std::uint64_t fingerprint) {
    const auto &r = row.result;
    json events = json::array();
    for (const auto &e : r.events)
        events.push_back(to_json(e));
    json observables = json::array();
    observables.push_back(to_json(r.initial));
    for (const auto &o : r.rounds)
        observables.push_back(to_json(o));
    return json{{"kind", "trajectory"},
                {"index", row.index},
                // Decimal string: JSON readers commonly lose precision above 2^53.
                {"seed", std::to_string(r.seed)},
                {"config_fingerprint", fingerprint_hex(fingerprint)},
                {"representation", row.representation},
                {"converged", r.converged},
                {"settled", r.settled},
                {"step_cap_hit", r.step_cap_hit},
                {"rounds_used", r.rounds_used},
                {"converged_round", r.converged_round ? json(*r.converged_round) : json(nullptr)},
                {"sequence_lengths", r.sequence_lengths},
                {"events", std::move(events)},
                {"observables", std::move(observables)}};
}

ArchivedTrajectory row_from_json(const json &j, const ProtocolConfig &protocol) {
    if (field_as<std::string>(j, "kind") != "trajectory")
        fail(ErrorCode::schema_mismatch, "record is not a trajectory row");
    ArchivedTrajectory row;
    row.index = field_as<std::size_t>(j, "index");
    row.representation = field_as<std::string>(j, "representation");
    auto &r = row.result;
    r.config = protocol;
    r.seed = parse_seed(field_as<std::string>(j, "seed"));
    r.converged = field_as<bool>(j, "converged");
    r.settled = field_as<bool>(j, "settled");
    r.step_cap_hit = field_as<bool>(j, "step_cap_hit");
    r.rounds_used = field_as<int>(j, "rounds_used");
    if (const auto &cr = field(j, "converged_round"); !cr.is_null())
        r.converged_round = field_as<int>(j, "converged_round");
    r.sequence_lengths = field_as<std::vector<int>>(j, "sequence_lengths");
    for (const auto &e : field(j, "events"))
        r.events.push_back(event_from_json(e));
    const auto &obs = field(j, "observables");
    if (!obs.is_array() || obs.empty())
        fail(ErrorCode::schema_mismatch, "trajectory row has no observables");
    r.initial = observables_from_json(obs.front());
    for (std::size_t k = 1; k < obs.size(); ++k)
        r.rounds.push_back(observables_from_json(obs[k]));
    return row;
}

json summarize_rows(const ExperimentConfig &config, const std::vector<ArchivedTrajectory> &rows) {
    std::size_t converged = 0, settled = 0, capped = 0;
    std::vector<double> rounds_to_converge, first_sequence, first_round, all_sequences, detection_f;
    std::vector<double> final_jbar2, final_x, final_y, final_z, final_f;
    std::map<std::string, std::size_t> histogram;
    std::size_t cluster_pure = 0, cluster_mixed = 0, cluster_other = 0;
    const bool clusters = config.particles == 4 && config.two_j == 1;

    for (const auto &row : rows) {
        const auto &r = row.result;
        if (r.converged)
            ++converged;
        if (r.settled)
            ++settled;
        if (r.step_cap_hit)
            ++capped;
        if (r.converged_round) {
            rounds_to_converge.push_back(*r.converged_round);
            ++histogram[std::to_string(*r.converged_round)];
            const auto k = static_cast<std::size_t>(*r.converged_round);
            if (k >= 1 && k <= r.rounds.size())
                detection_f.push_back(r.rounds[k - 1].fidelity);
        }
        if (!r.sequence_lengths.empty())
            first_sequence.push_back(r.sequence_lengths[0]);
        if (r.sequence_lengths.size() >= 2)
            first_round.push_back(r.sequence_lengths[0] + r.sequence_lengths[1]);
        for (int len : r.sequence_lengths)
            all_sequences.push_back(len);
        const RoundObservables &last = r.rounds.empty() ? r.initial : r.rounds.back();
        final_jbar2.push_back(last.jbar2);
        final_x.push_back(last.var_x);
        final_y.push_back(last.var_y);
        final_z.push_back(last.var_z);
        final_f.push_back(last.fidelity);
        if (clusters && r.converged && last.fidelity_components.size() == 2) {
            const double f1 = last.fidelity_components[0], f2 = last.fidelity_components[1];
            auto near = [](double a, double b, double x, double y) {
                return std::abs(a - x) <= kClusterTolerance && std::abs(b - y) <= kClusterTolerance;
            };
            if (near(f1, f2, 1.0, 0.0))
                ++cluster_pure;
            else if (near(f1, f2, 0.25, 0.75))
                ++cluster_mixed;
            else
                ++cluster_other;
        }
    }
    const auto n = rows.size();
    json out{{"kind", "summary"},
             {"trajectories", n},
             {"converged", converged},
             {"convergence_rate", n ? static_cast<double>(converged) / static_cast<double>(n) : 0.0},
             {"settled", settled},
             {"step_cap_hits", capped},
             {"rounds_to_converge", distribution(rounds_to_converge)},
             {"rounds_histogram", histogram},
             {"first_sequence_length", distribution(first_sequence)},
             {"first_round_events", distribution(first_round)},
             {"sequence_length", distribution(all_sequences)},
             {"detection_fidelity", distribution(detection_f)},
             {"final",
              {{"Jbar2", distribution(final_jbar2)},
               {"varJx", distribution(final_x)},
               {"varJy", distribution(final_y)},
               {"varJz", distribution(final_z)},
               {"F", distribution(final_f)}}}};
    if (clusters) {
        out["fidelity_clusters"] = {{"tolerance", kClusterTolerance},
                                    {"F1_F2_1_0", cluster_pure},
                                    {"F1_F2_0.25_0.75", cluster_mixed},
                                    {"other", cluster_other}};
    }
    return out;
}

std::string summary_text(const json &s) {
    std::ostringstream out;
    auto stat = [&](const char *label, const json &d) {
        out << label << ": ";
        if (d.value("count", 0) == 0) {
            out << "n/a\n";
            return;
        }
        out << "median " << d["median"].get<double>() << ", quartiles [" << d["q1"].get<double>() << ", "
            << d["q3"].get<double>() << "], range [" << d["min"].get<double>() << ", " << d["max"].get<double>()
            << "]\n";
    };
    out << "trajectories: " << s["trajectories"].get<std::size_t>() << "\n";
    out << "convergence rate: " << s["convergence_rate"].get<double>() << " (" << s["converged"].get<std::size_t>()
        << " converged, " << s["settled"].get<std::size_t>() << " settled, "
        << s["step_cap_hits"].get<std::size_t>() << " hit the step cap)\n";
    stat("rounds to converge", s["rounds_to_converge"]);
    stat("first sequence length", s["first_sequence_length"]);
    stat("first round events", s["first_round_events"]);
    stat("detection F", s["detection_fidelity"]);
    for (const char *name : {"Jbar2", "varJx", "varJy", "varJz", "F"}) {
        const std::string label = std::string("final ") + name;
        stat(label.c_str(), s["final"][name]);
    }
    if (s.contains("fidelity_clusters")) {
        const auto &c = s["fidelity_clusters"];
        out << "final (F1, F2) clusters: (1, 0) x" << c["F1_F2_1_0"].get<std::size_t>() << ", (0.25, 0.75) x"
            << c["F1_F2_0.25_0.75"].get<std::size_t>() << ", other x" << c["other"].get<std::size_t>() << "\n";
    }
    if (s.contains("stored_summary_matches"))
        out << "stored summary matches rows: " << (s["stored_summary_matches"].get<bool>() ? "yes" : "no") << "\n";
    return out.str();
}

std::string series_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "series_%06zu.csv", index);
    return buf;
}

std::string series_csv(const ArchivedTrajectory &row, bool with_components) {
    const auto &r = row.result;
    std::size_t components = 0;
    if (with_components)
        components = r.initial.fidelity_components.size();
    std::ostringstream out;
    out << "trajectory_id,k,Jbar2,varJx,varJy,varJz,F";
    for (std::size_t d = 1; d <= components; ++d)
        out << ",F_" << d;
    out << "\n";
    auto line = [&](const RoundObservables &o) {
        out << row.index << "," << o.round << "," << format_value(o.jbar2) << "," << format_value(o.var_x) << ","
            << format_value(o.var_y) << "," << format_value(o.var_z) << "," << format_value(o.fidelity);
        for (std::size_t d = 0; d < components; ++d)
            out << "," << format_value(d < o.fidelity_components.size() ? o.fidelity_components[d] : 0.0);
        out << "\n";
    };
    line(r.initial);
    for (const auto &o : r.rounds)
        line(o);
    return out.str();
}

ArchiveWriter::ArchiveWriter(const std::filesystem::path &dir, const ExperimentConfig &config)
    : dir_(dir), archive_path_(dir / "archive.jsonl"), fingerprint_(config_fingerprint(config)),
      components_(config.particles <= 4) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        fail(ErrorCode::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
    out_.open(archive_path_, std::ios::trunc);
    if (!out_)
        fail(ErrorCode::io, "cannot write " + archive_path_.string());
    const json header{{"kind", "header"},
                      {"schema_version", kArchiveSchemaVersion},
                      {"config_text", to_config_text(config)},
                      {"config_fingerprint", fingerprint_hex(fingerprint_)},
                      {"master_seed", std::to_string(config.master_seed)}};
    out_ << header.dump() << "\n";
}

void ArchiveWriter::write(const ArchivedTrajectory &row) {
    out_ << row_to_json(row, fingerprint_).dump() << "\n";
    std::ofstream csv(dir_ / series_file_name(row.index), std::ios::trunc);
    csv << series_csv(row, components_);
    if (!out_ || !csv)
        fail(ErrorCode::io, "write failed in " + dir_.string());
}

void ArchiveWriter::finish(const json &summary) {
    out_ << summary.dump() << "\n";
    out_.flush();
    std::ofstream js(dir_ / "summary.json", std::ios::trunc);
    js << summary.dump(2) << "\n";
    if (!out_ || !js)
        fail(ErrorCode::io, "write failed in " + dir_.string());
}

LoadedArchive read_archive(const std::filesystem::path &path) {
    LoadedArchive a;
    a.path = std::filesystem::is_directory(path) ? path / "archive.jsonl" : path;
    std::ifstream in(a.path);
    if (!in)
        fail(ErrorCode::io, "cannot open archive " + a.path.string());
    std::string line;
    bool header = false;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception &e) {
            fail(ErrorCode::schema_mismatch, "archive line " + std::to_string(number) + " is not JSON: " + e.what());
        }
        const auto kind = field_as<std::string>(j, "kind");
        if (!header) {
            if (kind != "header")
                fail(ErrorCode::schema_mismatch, "archive does not start with a header line");
            a.schema_version = field_as<int>(j, "schema_version");
            if (a.schema_version != kArchiveSchemaVersion)
                fail(ErrorCode::schema_mismatch, "archive schema version " + std::to_string(a.schema_version) +
                                                     " is not supported (expected " +
                                                     std::to_string(kArchiveSchemaVersion) + ")");
            try {
                a.config = parse_config(field_as<std::string>(j, "config_text"));
            } catch (const Error &e) {
                fail(ErrorCode::schema_mismatch, std::string("archive config snapshot: ") + e.what());
            }
            a.fingerprint = config_fingerprint(a.config);
            if (field_as<std::string>(j, "config_fingerprint") != fingerprint_hex(a.fingerprint))
                fail(ErrorCode::schema_mismatch, "archive header fingerprint does not match its config snapshot");
            header = true;
        } else if (kind == "trajectory") {
            a.raw_rows.push_back(std::move(j));
        } else if (kind == "summary") {
            a.stored_summary = std::move(j);
        } else {
            fail(ErrorCode::schema_mismatch, "archive line " + std::to_string(number) + " has unknown kind '" +
                                                 kind + "'");
        }
    }
    if (!header)
        fail(ErrorCode::schema_mismatch, "archive " + a.path.string() + " is empty");
    return a;
}

json summarize_archive(const LoadedArchive &archive) {
    if (archive.raw_rows.empty())
        fail(ErrorCode::invalid_argument, "archive " + archive.path.string() + " has no trajectory rows");
    const auto protocol = archive.config.resolved_protocol();
    std::vector<ArchivedTrajectory> rows;
    rows.reserve(archive.raw_rows.size());
    for (const auto &j : archive.raw_rows)
        rows.push_back(row_from_json(j, protocol));
    json summary = summarize_rows(archive.config, rows);
    const bool matches = archive.stored_summary.has_value() && *archive.stored_summary == summary;
    summary["stored_summary_matches"] = matches;
    return summary;
}

}  // namespace ssprep
