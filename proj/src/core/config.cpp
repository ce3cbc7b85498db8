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

#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace ssprep {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    fail(ErrorCode::invalid_config,
         std::string(key) + ": invalid value '" + std::string(value) + "' (expected " + std::string(expected) + ")");
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
    Int out{};
    const auto *end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        bad_value(key, value, "an integer");
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string s(value);
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
        bad_value(key, value, "a finite number");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

HalfInteger parse_half(std::string_view key, std::string_view value) {
    try {
        return HalfInteger::parse(value);
    } catch (const Error &) {
        bad_value(key, value, "an integer or half-integer such as 1/2");
    }
}

std::map<int, double> parse_table(std::string_view key, std::string_view value) {
    std::map<int, double> table;
    std::string text(value);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty())
            continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            bad_value(key, value, "entries 'm:theta' separated by ';'");
        const auto m = parse_half(key, trim(item.substr(0, colon)));
        table[m.twice] = parse_double(key, trim(item.substr(colon + 1)));
    }
    return table;
}

std::string format_table(const std::map<int, double> &table) {
    std::string out;
    for (const auto &[twice_m, theta] : table) {
        if (!out.empty())
            out += "; ";
        out += HalfInteger::from_twice(twice_m).to_string() + ":" + format_double(theta);
    }
    return out;
}

// Keys in canonical output order.
const std::vector<std::string> &known_keys() {
    static const std::vector<std::string> keys = {
        "preset",        "particles",          "two_j",         "qubit_cap",   "initial",
        "representation", "m_cut",             "convergence_streak", "settle_rounds", "max_rounds",
        "max_sequence_steps", "rotation_rule", "rotation_table", "subensemble", "sampler",
        "backend",       "qnd.gamma_abs",      "qnd.gamma_arg", "qnd.chi_abs", "qnd.chi_arg",
        "qnd.gt",        "qnd.phi_p",          "trajectories",  "seed",        "out",
        "threads"};
    return keys;
}

// Keys left out of the fingerprint. The master seed is checked per row
// through the seed derivation instead.
bool cosmetic_key(const std::string &key) {
    return key == "preset" || key == "trajectories" || key == "out" || key == "threads" || key == "seed";
}

std::string get(const ExperimentConfig &c, const std::string &key) {
    const auto &p = c.protocol;
    if (key == "preset")
        return c.preset;
    if (key == "particles")
        return std::to_string(c.particles);
    if (key == "two_j")
        return std::to_string(c.two_j);
    if (key == "qubit_cap")
        return format_double(c.qubit_cap);
    if (key == "initial")
        return initial_state_name(c.initial);
    if (key == "representation")
        return representation_name(c.representation);
    if (key == "m_cut")
        return p.m_cut.to_string();
    if (key == "convergence_streak")
        return std::to_string(p.convergence_streak);
    if (key == "settle_rounds")
        return std::to_string(p.settle_rounds);
    if (key == "max_rounds")
        return std::to_string(p.max_rounds);
    if (key == "max_sequence_steps")
        return std::to_string(p.max_sequence_steps);
    if (key == "rotation_rule")
        return p.rotation_rule.kind == RotationRuleKind::arcsin ? "arcsin" : "table";
    if (key == "rotation_table")
        return format_table(p.rotation_rule.table);
    if (key == "subensemble")
        return policy_name(p.subensemble_policy);
    if (key == "sampler")
        return sampler_name(p.sampler);
    if (key == "backend")
        return backend_name(p.backend);
    if (key == "qnd.gamma_abs")
        return format_double(c.qnd.gamma_abs);
    if (key == "qnd.gamma_arg")
        return format_double(c.qnd.gamma_arg);
    if (key == "qnd.chi_abs")
        return format_double(c.qnd.chi_abs);
    if (key == "qnd.chi_arg")
        return format_double(c.qnd.chi_arg);
    if (key == "qnd.gt")
        return format_double(c.qnd.gt);
    if (key == "qnd.phi_p")
        return format_double(c.qnd.phi_p);
    if (key == "trajectories")
        return std::to_string(c.trajectories);
    if (key == "seed")
        return std::to_string(c.master_seed);
    if (key == "out")
        return c.out_dir;
    if (key == "threads")
        return std::to_string(c.threads);
    fail(ErrorCode::invalid_config, "unknown key '" + key + "'");
}

std::string canonical_text(const ExperimentConfig &config, bool include_cosmetic) {
    std::string out;
    for (const auto &key : known_keys()) {
        if (!include_cosmetic && cosmetic_key(key))
            continue;
        out += key + " = " + get(config, key) + "\n";
    }
    return out;
}

}  // namespace

const char *representation_name(Representation representation) {
    switch (representation) {
    case Representation::automatic:
        return "auto";
    case Representation::density:
        return "density";
    case Representation::unraveling:
        return "unraveling";
    }
    return "?";
}

EnsembleShape ExperimentConfig::shape() const {
    return EnsembleShape(particles, two_j, qubit_cap);
}

ProtocolConfig ExperimentConfig::resolved_protocol() const {
    ProtocolConfig out = protocol;
    const auto s = shape();
    out.optical = OpticalSettings::strong(s, qnd.chi_abs);
    out.optical.gamma = std::polar(qnd.gamma_abs, qnd.gamma_arg);
    out.optical.chi = std::polar(qnd.chi_abs, qnd.chi_arg);
    if (qnd.gt != 0.0)
        out.optical.gt = qnd.gt;
    out.optical.phi_p = qnd.phi_p;
    return out;
}

bool ExperimentConfig::uses_unraveling() const {
    if (initial != InitialStateKind::completely_mixed)
        return false;
    switch (representation) {
    case Representation::automatic:
        return particles > 10;
    case Representation::density:
        return false;
    case Representation::unraveling:
        return true;
    }
    return false;
}

std::vector<std::string> ExperimentConfig::problems() const {
    std::vector<std::string> out;
    bool shape_ok = true;
    if (particles < 2) {
        out.push_back("particles: must be at least 2");
        shape_ok = false;
    }
    if (two_j < 1) {
        out.push_back("two_j: must be at least 1");
        shape_ok = false;
    }
    if (trajectories < 1)
        out.push_back("trajectories: must be at least 1");
    if (threads < 0)
        out.push_back("threads: must be nonnegative");
    if (out_dir.empty())
        out.push_back("out: output directory must not be empty");
    if (initial == InitialStateKind::y_polarized && representation == Representation::unraveling)
        out.push_back("representation: unraveling only applies to the completely mixed start");
    if (protocol.rotation_rule.kind == RotationRuleKind::custom_table && protocol.rotation_rule.table.empty())
        out.push_back("rotation_table: a table rule needs at least one entry");
    if (protocol.rotation_rule.kind == RotationRuleKind::arcsin && !protocol.rotation_rule.table.empty())
        out.push_back("rotation_table: only allowed with rotation_rule = table");

    std::optional<EnsembleShape> s;
    if (shape_ok) {
        try {
            s.emplace(shape());
        } catch (const Error &e) {
            out.push_back(std::string("particles/two_j: ") + e.what());
        }
    }
    if (s) {
        if (representation == Representation::density && particles > 10 &&
            initial == InitialStateKind::completely_mixed)
            out.push_back("representation: density operators are limited to N <= 10; use unraveling");
        // Each protocol constraint is checked separately so that all of them are reported.
        const ProtocolConfig resolved = resolved_protocol();
        auto check = [&](const char *key, auto &&mutate) {
            ProtocolConfig probe = resolved;
            mutate(probe);
            try {
                probe.validate(*s);
            } catch (const Error &e) {
                out.push_back(std::string(key) + ": " + e.what());
            }
        };
        const ProtocolConfig defaults;
        auto with_defaults_except = [&](auto keep) {
            return [&, keep](ProtocolConfig &p) {
                ProtocolConfig base = defaults;
                base.m_cut = HalfInteger::from_twice((s->particles() * s->two_j()) % 2);
                base.backend = BackendKind::ideal;
                keep(base, p);
                p = base;
            };
        };
        check("m_cut", with_defaults_except([](ProtocolConfig &b, const ProtocolConfig &p) { b.m_cut = p.m_cut; }));
        check("convergence_streak", with_defaults_except([](ProtocolConfig &b, const ProtocolConfig &p) {
                  b.convergence_streak = p.convergence_streak;
              }));
        check("settle_rounds", with_defaults_except([](ProtocolConfig &b, const ProtocolConfig &p) {
                  b.settle_rounds = p.settle_rounds;
              }));
        check("max_rounds/max_sequence_steps", with_defaults_except([](ProtocolConfig &b, const ProtocolConfig &p) {
                  b.max_rounds = p.max_rounds;
                  b.max_sequence_steps = p.max_sequence_steps;
              }));
        if (resolved.backend == BackendKind::qnd) {
            try {
                resolved.optical.validate();
            } catch (const Error &e) {
                out.push_back(std::string("qnd: ") + e.what());
            }
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    const auto list = problems();
    if (list.empty())
        return;
    std::string msg = "invalid configuration (" + std::to_string(list.size()) + " problem" +
                      (list.size() == 1 ? "" : "s") + "):";
    for (const auto &p : list)
        msg += "\n  - " + p;
    fail(ErrorCode::invalid_config, msg);
}

void ExperimentConfig::set(std::string_view key_view, std::string_view raw) {
    const std::string key(key_view);
    const std::string value = trim(raw);
    auto &p = protocol;
    if (key == "preset") {
        *this = preset_config(value);
    } else if (key == "particles") {
        particles = parse_integer<int>(key, value);
    } else if (key == "two_j") {
        two_j = parse_integer<int>(key, value);
    } else if (key == "qubit_cap") {
        qubit_cap = parse_double(key, value);
    } else if (key == "initial") {
        if (value == "completely-mixed")
            initial = InitialStateKind::completely_mixed;
        else if (value == "y-polarized")
            initial = InitialStateKind::y_polarized;
        else
            bad_value(key, value, "completely-mixed or y-polarized");
    } else if (key == "representation") {
        if (value == "auto")
            representation = Representation::automatic;
        else if (value == "density")
            representation = Representation::density;
        else if (value == "unraveling")
            representation = Representation::unraveling;
        else
            bad_value(key, value, "auto, density or unraveling");
    } else if (key == "m_cut") {
        p.m_cut = parse_half(key, value);
    } else if (key == "convergence_streak") {
        p.convergence_streak = parse_integer<int>(key, value);
    } else if (key == "settle_rounds") {
        p.settle_rounds = parse_integer<int>(key, value);
    } else if (key == "max_rounds") {
        p.max_rounds = parse_integer<int>(key, value);
    } else if (key == "max_sequence_steps") {
        p.max_sequence_steps = parse_integer<int>(key, value);
    } else if (key == "rotation_rule") {
        if (value == "arcsin")
            p.rotation_rule.kind = RotationRuleKind::arcsin;
        else if (value == "table")
            p.rotation_rule.kind = RotationRuleKind::custom_table;
        else
            bad_value(key, value, "arcsin or table");
    } else if (key == "rotation_table") {
        p.rotation_rule.table = parse_table(key, value);
    } else if (key == "subensemble") {
        if (value == "random-half")
            p.subensemble_policy = SubensemblePolicy::random_half;
        else if (value == "fixed-first-half")
            p.subensemble_policy = SubensemblePolicy::fixed_first_half;
        else
            bad_value(key, value, "random-half or fixed-first-half");
    } else if (key == "sampler") {
        if (value == "exact")
            p.sampler = SamplerKind::exact;
        else if (value == "accept-reject")
            p.sampler = SamplerKind::accept_reject;
        else
            bad_value(key, value, "exact or accept-reject");
    } else if (key == "backend") {
        if (value == "ideal")
            p.backend = BackendKind::ideal;
        else if (value == "qnd")
            p.backend = BackendKind::qnd;
        else
            bad_value(key, value, "ideal or qnd");
    } else if (key == "qnd.gamma_abs") {
        qnd.gamma_abs = parse_double(key, value);
    } else if (key == "qnd.gamma_arg") {
        qnd.gamma_arg = parse_double(key, value);
    } else if (key == "qnd.chi_abs") {
        qnd.chi_abs = parse_double(key, value);
    } else if (key == "qnd.chi_arg") {
        qnd.chi_arg = parse_double(key, value);
    } else if (key == "qnd.gt") {
        qnd.gt = parse_double(key, value);
    } else if (key == "qnd.phi_p") {
        qnd.phi_p = parse_double(key, value);
    } else if (key == "trajectories") {
        trajectories = parse_integer<int>(key, value);
    } else if (key == "seed") {
        master_seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "out") {
        if (value.empty())
            bad_value(key, value, "a directory path");
        out_dir = value;
    } else if (key == "threads") {
        threads = parse_integer<int>(key, value);
    } else {
        fail(ErrorCode::invalid_config, "unknown key '" + key + "'");
    }
}

std::vector<std::string> preset_names() {
    return {"fig-n4-mixed", "fig-n4-coherent", "fig-n10-mixed", "fig-n11-mixed"};
}

ExperimentConfig preset_config(std::string_view name) {
    ExperimentConfig c;
    c.preset = std::string(name);
    c.out_dir = "run-" + c.preset;
    c.protocol.m_cut = HalfInteger::whole(0);
    c.protocol.convergence_streak = 5;
    c.protocol.settle_rounds = 8;
    if (name == "fig-n4-mixed") {
        c.particles = 4;
    } else if (name == "fig-n4-coherent") {
        c.particles = 4;
        c.initial = InitialStateKind::y_polarized;
    } else if (name == "fig-n10-mixed") {
        c.particles = 10;
    } else if (name == "fig-n11-mixed") {
        c.particles = 11;
        c.protocol.m_cut = HalfInteger::from_twice(1);
        c.representation = Representation::unraveling;
    } else {
        std::string known;
        for (const auto &n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        fail(ErrorCode::invalid_config, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    struct Line {
        int number;
        std::string key;
        std::string value;
    };
    std::vector<Line> lines;
    std::vector<std::string> errors;
    std::set<std::string> seen;
    const std::set<std::string> known(known_keys().begin(), known_keys().end());

    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(number) + ": ";
        if (eq == std::string::npos) {
            errors.push_back(where + "expected 'key = value'");
            continue;
        }
        Line l{number, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (!known.contains(l.key)) {
            errors.push_back(where + "unknown key '" + l.key + "'");
            continue;
        }
        if (!seen.insert(l.key).second) {
            errors.push_back(where + "duplicate key '" + l.key + "'");
            continue;
        }
        lines.push_back(std::move(l));
    }

    ExperimentConfig config;
    for (const auto &l : lines) {
        if (l.key != "preset")
            continue;
        try {
            config.set(l.key, l.value);
        } catch (const Error &e) {
            errors.push_back("line " + std::to_string(l.number) + ": " + e.what());
        }
    }
    for (const auto &l : lines) {
        if (l.key == "preset")
            continue;
        try {
            config.set(l.key, l.value);
        } catch (const Error &e) {
            errors.push_back("line " + std::to_string(l.number) + ": " + e.what());
        }
    }
    if (errors.empty()) {
        for (auto &p : config.problems())
            errors.push_back(std::move(p));
    }
    if (!errors.empty()) {
        std::string msg = "invalid configuration (" + std::to_string(errors.size()) + " problem" +
                          (errors.size() == 1 ? "" : "s") + "):";
        for (const auto &e : errors)
            msg += "\n  - " + e;
        fail(ErrorCode::invalid_config, msg);
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig &config) {
    std::string text = canonical_text(config, true);
    // An empty preset would not parse back; drop it.
    if (config.preset.empty())
        text.erase(0, text.find('\n') + 1);
    if (config.protocol.rotation_rule.table.empty()) {
        const auto pos = text.find("rotation_table = \n");
        if (pos != std::string::npos)
            text.erase(pos, std::string("rotation_table = \n").size());
    }
    return text;
}

std::uint64_t config_fingerprint(const ExperimentConfig &config) {
    const std::string text = canonical_text(config, false);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ssprep
