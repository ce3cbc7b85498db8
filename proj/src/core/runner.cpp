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

#include "core/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "core/error.hpp"

namespace ssprep {

ArchivedTrajectory run_trajectory(const ExperimentConfig &config, std::size_t index,
                                  const ObservableContext &context) {
    const auto protocol = config.resolved_protocol();
    RandomStream rng(derive_trajectory_seed(config.master_seed, index));
    ArchivedTrajectory row;
    row.index = index;
    if (config.uses_unraveling()) {
        // The initial basis state is the first draw of the trajectory's own stream.
        PureState state = sample_mixed_unraveling(context.shape(), rng);
        row.representation = "unraveling";
        row.result = run_procedure(state, protocol, rng, context);
        return row;
    }
    AnyState initial = make_initial_state(config.initial, context.shape());
    if (config.representation == Representation::density && std::holds_alternative<PureState>(initial))
        initial = DensityOperator::from_pure(std::get<PureState>(initial));
    row.representation = std::holds_alternative<PureState>(initial) ? "pure" : "density";
    row.result = run_procedure(std::move(initial), protocol, rng, context);
    return row;
}

RunResult run_experiment(const ExperimentConfig &config) {
    config.validate();
    const ObservableContext context(config.shape());
    const auto count = static_cast<std::size_t>(config.trajectories);
    unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(count));

    RunResult result;
    ArchiveWriter writer(config.out_dir, config);
    result.archive_path = writer.archive_path();

    std::vector<std::optional<ArchivedTrajectory>> slots(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex mutex;
    std::condition_variable ready;

    auto worker = [&] {
        while (!abort) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                auto row = run_trajectory(config, i, context);
                std::lock_guard lock(mutex);
                slots[i] = std::move(row);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure)
                    failure = std::current_exception();
                abort = true;
            }
            ready.notify_all();
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);

    // Single consumer: rows are written strictly in index order.
    result.rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[i].has_value() || failure; });
        if (failure)
            break;
        ArchivedTrajectory row = std::move(*slots[i]);
        slots[i].reset();
        lock.unlock();
        writer.write(row);
        result.rows.push_back(std::move(row));
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);

    result.summary = summarize_rows(config, result.rows);
    writer.finish(result.summary);
    return result;
}

namespace {

double max_deviation(const RoundObservables &a, const RoundObservables &b) {
    double d = std::max({std::abs(a.jbar2 - b.jbar2), std::abs(a.var_x - b.var_x), std::abs(a.var_y - b.var_y),
                         std::abs(a.var_z - b.var_z), std::abs(a.fidelity - b.fidelity)});
    if (a.fidelity_components.size() != b.fidelity_components.size())
        return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.fidelity_components.size(); ++i)
        d = std::max(d, std::abs(a.fidelity_components[i] - b.fidelity_components[i]));
    return d;
}

}  // namespace

ReplayReport replay(const LoadedArchive &archive, std::size_t row, const ExperimentConfig *expected) {
    if (expected != nullptr && config_fingerprint(*expected) != archive.fingerprint)
        fail(ErrorCode::config_mismatch,
             "archive was produced by a different configuration (fingerprint " + fingerprint_hex(archive.fingerprint) +
                 ", requested " + fingerprint_hex(config_fingerprint(*expected)) + ")");
    if (row >= archive.raw_rows.size())
        fail(ErrorCode::invalid_argument, "row " + std::to_string(row) + " out of range (archive has " +
                                              std::to_string(archive.raw_rows.size()) + " rows)");
    const auto &raw = archive.raw_rows[row];
    if (raw.value("config_fingerprint", std::string{}) != fingerprint_hex(archive.fingerprint))
        fail(ErrorCode::config_mismatch, "row " + std::to_string(row) + " was produced by a different configuration");
    const ArchivedTrajectory stored = row_from_json(raw, archive.config.resolved_protocol());
    const std::uint64_t derived = derive_trajectory_seed(archive.config.master_seed, stored.index);
    if (stored.result.seed != derived)
        fail(ErrorCode::invalid_argument, "row " + std::to_string(row) + " seed " +
                                              std::to_string(stored.result.seed) +
                                              " does not derive from the master seed for index " +
                                              std::to_string(stored.index));

    const ObservableContext context(archive.config.shape());
    ReplayReport report;
    report.row = row;
    report.seed = stored.result.seed;
    report.replayed = run_trajectory(archive.config, stored.index, context);
    const auto &a = stored.result;
    const auto &b = report.replayed.result;
    report.events = b.events.size();
    report.identical_events = a.events == b.events;
    double dev = max_deviation(a.initial, b.initial);
    if (a.rounds.size() != b.rounds.size())
        dev = std::numeric_limits<double>::infinity();
    else
        for (std::size_t k = 0; k < a.rounds.size(); ++k)
            dev = std::max(dev, max_deviation(a.rounds[k], b.rounds[k]));
    report.max_observable_deviation = dev;
    return report;
}

nlohmann::json to_json(const ReplayReport &report) {
    const auto &r = report.replayed.result;
    return nlohmann::json{{"row", report.row},
                          {"index", report.replayed.index},
                          {"seed", std::to_string(report.seed)},
                          {"events", report.events},
                          {"identical_events", report.identical_events},
                          {"max_observable_deviation", report.max_observable_deviation},
                          {"converged", r.converged},
                          {"rounds_used", r.rounds_used},
                          {"converged_round", r.converged_round ? nlohmann::json(*r.converged_round) : nullptr}};
}

}  // namespace ssprep
