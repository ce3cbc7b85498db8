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

#include "core/qnd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <json.hpp>

#include "core/error.hpp"

namespace ssprep {

double OpticalSettings::eta() const {
    const double g = std::abs(gamma);
    const double c = std::abs(chi);
    return std::atan((c - g) / (c + g));
}

void OpticalSettings::validate() const {
    if (!(photon_mean() > 0.0) || !std::isfinite(photon_mean()))
        fail(ErrorCode::invalid_argument, "optical settings need |gamma|^2 + |chi|^2 > 0");
    if (!std::isfinite(gt) || gt == 0.0)
        fail(ErrorCode::invalid_argument, "interaction phase gt must be finite and nonzero");
    if (!std::isfinite(phi_p))
        fail(ErrorCode::invalid_argument, "phase offset phi_p must be finite");
}

OpticalSettings OpticalSettings::strong(const EnsembleShape &shape, double amplitude) {
    OpticalSettings s;
    s.gamma = Complex(amplitude, 0.0);
    s.chi = Complex(amplitude, 0.0);
    s.phi_p = 0.0;
    s.gt = std::numbers::pi / (2.0 * shape.j_max().value() + 1.0);
    return s;
}

std::optional<GaussianPosterior> gaussian_posterior(const OpticalSettings &settings, std::int64_t n_c,
                                                    std::int64_t n_d) {
    if (n_c <= 0 || n_d <= 0)
        return std::nullopt;
    const double nc = static_cast<double>(n_c);
    const double nd = static_cast<double>(n_d);
    const double n = nc + nd;
    const double cos2eta = std::cos(2.0 * settings.eta());
    const double bracket = n * n * cos2eta * cos2eta - (nc - nd) * (nc - nd);
    if (!(bracket > 0.0))
        return std::nullopt;
    const double x = (nd - nc) / (n * cos2eta);
    const double m0 =
        (std::asin(x) - std::arg(settings.chi) + std::arg(settings.gamma) - settings.phi_p) / settings.gt;
    const double inv_sigma2 = settings.gt * settings.gt / 8.0 * n / (nc * nd) * bracket;
    return GaussianPosterior{m0, 1.0 / inv_sigma2};
}

namespace {

// arctan(tan(phi) / tan(eta)) with the tan(eta) -> 0 limit.
double phase_d(double tan_phi, double tan_eta) {
    if (tan_eta == 0.0)
        return tan_phi == 0.0 ? 0.0 : std::copysign(std::numbers::pi / 2, tan_phi);
    return std::atan(tan_phi / tan_eta);
}

// log of the outcome-dependent prefactor magnitude.
double log_prefactor(const OpticalSettings &settings, double nc, double nd) {
    const double n = nc + nd;
    const double mean = settings.photon_mean();
    return 0.5 * (n - mean) - 0.25 * std::log(4.0 * std::numbers::pi * std::numbers::pi * nc * nd) +
           0.5 * n * std::log(mean / n);
}

}  // namespace

std::vector<Complex> posterior_factors(const EnsembleShape &shape, const OpticalSettings &settings,
                                       std::int64_t n_c, std::int64_t n_d) {
    settings.validate();
    const auto ms = shape.magnetization_values();
    std::vector<Complex> out(ms.size(), Complex(0.0, 0.0));
    if (n_c == 0 && n_d == 0) {
        std::fill(out.begin(), out.end(), Complex(std::exp(-0.5 * settings.photon_mean()), 0.0));
        return out;
    }
    const auto gauss = gaussian_posterior(settings, n_c, n_d);
    if (!gauss)
        return out;
    const double nc = static_cast<double>(n_c);
    const double nd = static_cast<double>(n_d);
    const double n = nc + nd;
    const double tan_eta = std::tan(settings.eta());
    const double magnitude0 = log_prefactor(settings, nc, nd);
    const double base_phase = -0.5 * std::numbers::pi * nd;
    for (std::size_t k = 0; k < ms.size(); ++k) {
        const double m = ms[k].value();
        const double phi = settings.gt * m / 2.0 + (std::arg(settings.chi) - std::arg(settings.gamma)) / 2.0 +
                           std::numbers::pi / 4.0 + settings.phi_p / 2.0;
        const double tan_phi = std::tan(phi);
        const double phi_c = std::atan(tan_eta * tan_phi);
        const double phi_d = phase_d(tan_phi, tan_eta);
        const double phase = base_phase + n * (phi - settings.gt * m) + nc * phi_c + nd * phi_d;
        const double dm = m - gauss->m0;
        const double log_mag = magnitude0 - dm * dm / (2.0 * gauss->sigma2);
        out[k] = std::polar(std::exp(log_mag), phase);
    }
    return out;
}

template <QuantumState S>
Posterior<S> posterior_state(const S &state, const OpticalSettings &settings, std::int64_t n_c, std::int64_t n_d) {
    S out = state;
    const auto factors = posterior_factors(state.shape(), settings, n_c, n_d);
    apply_magnetization_diagonal(out, factors);
    double p;
    if constexpr (std::same_as<S, PureState>)
        p = out.squared_norm();
    else
        p = out.trace();
    return Posterior<S>{std::move(out), p};
}

template Posterior<PureState> posterior_state(const PureState &, const OpticalSettings &, std::int64_t,
                                              std::int64_t);
template Posterior<DensityOperator> posterior_state(const DensityOperator &, const OpticalSettings &, std::int64_t,
                                                    std::int64_t);

// ---------------------------------------------------------------------------
// QndMeasurement

namespace {

constexpr double kNegligibleWeight = 1e-30;

}  // namespace

QndMeasurement::QndMeasurement(EnsembleShape shape, OpticalSettings settings, Truncation truncation)
    : shape_(std::move(shape)), settings_(settings), truncation_(truncation) {
    settings_.validate();
    if (!(truncation_.window_sigmas > 0.0))
        fail(ErrorCode::invalid_argument, "truncation window must be positive");

    const double mean = settings_.photon_mean();
    const double cos2eta = std::cos(2.0 * settings_.eta());
    const double offset = std::arg(settings_.chi) - std::arg(settings_.gamma) + settings_.phi_p;
    auto window = [&](double mode_mean) {
        const double half = truncation_.window_sigmas * std::sqrt(mode_mean) + 1.0;
        const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(mode_mean - half)));
        const auto hi = static_cast<std::int64_t>(std::ceil(mode_mean + half));
        return std::pair{lo, hi};
    };

    // Union over m of the per-mode windows around the counts that put m_0 on m.
    std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>> rows;
    for (HalfInteger m : shape_.magnetization_values()) {
        const double s = cos2eta * std::sin(settings_.gt * m.value() + offset);
        const auto [c_lo, c_hi] = window(0.5 * mean * (1.0 - s));
        const auto d_range = window(0.5 * mean * (1.0 + s));
        for (std::int64_t c = c_lo; c <= c_hi; ++c)
            rows[c].push_back(d_range);
    }
    for (auto &[c, ranges] : rows) {
        std::sort(ranges.begin(), ranges.end());
        std::int64_t next = -1;
        for (auto [lo, hi] : ranges)
            for (std::int64_t d = std::max(lo, next); d <= hi; ++d) {
                grid_.emplace_back(c, d);
                next = d + 1;
            }
    }

    offsets_.reserve(grid_.size() + 1);
    offsets_.push_back(0);
    for (auto [c, d] : grid_) {
        const auto factors = posterior_factors(shape_, settings_, c, d);
        for (std::size_t k = 0; k < factors.size(); ++k) {
            const double w = std::norm(factors[k]);
            if (w > kNegligibleWeight)
                entries_.push_back(Entry{static_cast<std::uint32_t>(k), w});
        }
        offsets_.push_back(entries_.size());
    }
}

std::vector<PhotonOutcome> QndMeasurement::distribution(std::span<const double> weights) const {
    if (weights.size() != shape_.magnetization_count())
        fail(ErrorCode::invalid_argument, "one Born weight per magnetization value expected");
    std::vector<PhotonOutcome> out(grid_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        double p = 0.0;
        for (std::size_t e = offsets_[k]; e < offsets_[k + 1]; ++e)
            p += entries_[e].weight * weights[entries_[e].slot];
        out[k] = PhotonOutcome{grid_[k].first, grid_[k].second, p};
        total += p;
    }
    double expected = 0.0;
    for (double w : weights)
        expected += w;
    if (expected - total > truncation_.max_mass_deficit) {
        fail(ErrorCode::truncation_deficit,
             "photon-count grid misses " + std::to_string(expected - total) +
                 " of the outcome probability; widen the truncation window");
    }
    return out;
}

std::vector<double> QndMeasurement::mass_per_magnetization() const {
    std::vector<double> mass(shape_.magnetization_count(), 0.0);
    for (const auto &e : entries_)
        mass[e.slot] += e.weight;
    return mass;
}

HalfInteger QndMeasurement::infer_magnetization(std::int64_t n_c, std::int64_t n_d,
                                                std::span<const double> weights) const {
    const auto ms = shape_.magnetization_values();
    if (auto gauss = gaussian_posterior(settings_, n_c, n_d)) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < ms.size(); ++k)
            if (std::abs(ms[k].value() - gauss->m0) < std::abs(ms[best].value() - gauss->m0))
                best = k;
        return ms[best];
    }
    const auto factors = posterior_factors(shape_, settings_, n_c, n_d);
    std::size_t best = 0;
    for (std::size_t k = 1; k < ms.size(); ++k)
        if (std::norm(factors[k]) * weights[k] > std::norm(factors[best]) * weights[best])
            best = k;
    return ms[best];
}

QndMeasurement::Sample QndMeasurement::sample(std::span<const double> weights, RandomStream &rng) const {
    const auto dist = distribution(weights);
    std::vector<double> p(dist.size());
    for (std::size_t k = 0; k < dist.size(); ++k)
        p[k] = dist[k].probability;
    const auto &picked = dist[sample_index(p, rng)];
    return Sample{picked, infer_magnetization(picked.n_c, picked.n_d, weights)};
}

// ---------------------------------------------------------------------------
// Certification

ProjectorCheckReport effective_projector_check(const EnsembleShape &shape, const OpticalSettings &settings,
                                               std::uint64_t seed, std::size_t states,
                                               std::size_t samples_per_state) {
    ProjectorCheckReport report;
    report.particles = shape.particles();
    report.two_j = shape.two_j();
    report.settings = settings;
    report.states = states;
    report.samples_per_state = samples_per_state;

    const auto half = static_cast<std::int64_t>(std::llround(settings.photon_mean() / 2.0));
    if (auto gauss = gaussian_posterior(settings, half, half))
        report.symmetric_sigma2 = gauss->sigma2;
    else
        report.symmetric_sigma2 = std::numeric_limits<double>::infinity();

    const QndMeasurement qnd(shape, settings);
    RandomStream rng(seed);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < states; ++s) {
        StateVector v(static_cast<Eigen::Index>(shape.dim()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = Complex(rng.normal(), rng.normal());
        PureState state(shape, std::move(v));
        state.normalize();
        const auto weights = magnetization_weights(state);
        const auto dist = qnd.distribution(weights);
        double mass = 0.0;
        std::vector<double> p(dist.size());
        for (std::size_t k = 0; k < dist.size(); ++k) {
            p[k] = dist[k].probability;
            mass += p[k];
        }
        report.worst_mass_deficit = std::max(report.worst_mass_deficit, 1.0 - mass);
        for (std::size_t draw = 0; draw < samples_per_state; ++draw) {
            const auto &outcome = dist[sample_index(p, rng)];
            const HalfInteger m = qnd.infer_magnetization(outcome.n_c, outcome.n_d, weights);
            auto post = posterior_state(state, settings, outcome.n_c, outcome.n_d);
            double distance = 1.0;
            const auto slot = shape.magnetization_slot(m);
            if (post.probability > 0.0 && slot && weights[*slot] > kProbabilityFloor) {
                post.state.normalize();
                const auto ideal = apply_projection(state, MeasurementBasis::z, m);
                distance = trace_distance(post.state, ideal.state);
            }
            report.worst_trace_distance = std::max(report.worst_trace_distance, distance);
            sum += distance;
            ++count;
        }
    }
    report.mean_trace_distance = count ? sum / static_cast<double>(count) : 0.0;
    if (report.worst_trace_distance < 1e-3)
        report.regime = "projective";
    else if (report.symmetric_sigma2 >= 1.0)
        report.regime = "squeezing";
    else
        report.regime = "intermediate";
    return report;
}

std::string to_json(const ProjectorCheckReport &report) {
    nlohmann::json j;
    j["particles"] = report.particles;
    j["two_j"] = report.two_j;
    j["settings"] = {{"gamma_abs", std::abs(report.settings.gamma)},
                     {"gamma_arg", std::arg(report.settings.gamma)},
                     {"chi_abs", std::abs(report.settings.chi)},
                     {"chi_arg", std::arg(report.settings.chi)},
                     {"gt", report.settings.gt},
                     {"phi_p", report.settings.phi_p}};
    j["states"] = report.states;
    j["samples_per_state"] = report.samples_per_state;
    j["worst_trace_distance"] = report.worst_trace_distance;
    j["mean_trace_distance"] = report.mean_trace_distance;
    j["symmetric_sigma2"] = std::isfinite(report.symmetric_sigma2) ? nlohmann::json(report.symmetric_sigma2)
                                                                    : nlohmann::json(nullptr);
    j["worst_mass_deficit"] = report.worst_mass_deficit;
    j["regime"] = report.regime;
    return j.dump(2);
}

}  // namespace ssprep
