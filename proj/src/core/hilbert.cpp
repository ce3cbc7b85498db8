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

#include "core/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace ssprep {

const char *error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument:
        return "invalid_argument";
    case ErrorCode::impossible_outcome:
        return "impossible_outcome";
    case ErrorCode::sampler_exhausted:
        return "sampler_exhausted";
    case ErrorCode::invalid_config:
        return "invalid_config";
    case ErrorCode::io:
        return "io";
    case ErrorCode::schema_mismatch:
        return "schema_mismatch";
    case ErrorCode::config_mismatch:
        return "config_mismatch";
    case ErrorCode::truncation_deficit:
        return "truncation_deficit";
    }
    return "unknown";
}

HalfInteger HalfInteger::parse(std::string_view text) {
    std::string s(text);
    auto bad = [&]() -> HalfInteger {
        fail(ErrorCode::invalid_argument, "not an integer or half-integer: '" + s + "'");
    };
    if (s.empty())
        return bad();
    if (auto slash = s.find('/'); slash != std::string::npos) {
        if (s.substr(slash + 1) != "2")
            return bad();
        char *end = nullptr;
        std::string num = s.substr(0, slash);
        long v = std::strtol(num.c_str(), &end, 10);
        if (num.empty() || *end != '\0')
            return bad();
        return HalfInteger::from_twice(static_cast<int>(v));
    }
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v))
        return bad();
    double twice = 2.0 * v;
    if (std::abs(twice - std::round(twice)) > 1e-9)
        return bad();
    return HalfInteger::from_twice(static_cast<int>(std::lround(twice)));
}

std::string HalfInteger::to_string() const {
    if (twice % 2 == 0)
        return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

const char *axis_name(Axis axis) {
    switch (axis) {
    case Axis::x:
        return "x";
    case Axis::y:
        return "y";
    case Axis::z:
        return "z";
    }
    return "?";
}

const char *basis_name(MeasurementBasis basis) {
    return basis == MeasurementBasis::z ? "z" : "x";
}

// ---------------------------------------------------------------------------
// EnsembleShape

EnsembleShape::EnsembleShape(int particles, int two_j, double qubit_cap) : particles_(particles), two_j_(two_j) {
    if (particles < 1)
        fail(ErrorCode::invalid_argument, "particle count must be positive");
    if (two_j < 1)
        fail(ErrorCode::invalid_argument, "spin must be at least 1/2");
    double qubits = particles * std::log2(static_cast<double>(two_j + 1));
    if (qubits > qubit_cap + 1e-9) {
        std::ostringstream msg;
        msg << "Hilbert space of " << particles << " spin-" << HalfInteger::from_twice(two_j).to_string()
            << " particles exceeds the cap of " << qubit_cap << " qubit-equivalents";
        fail(ErrorCode::invalid_argument, msg.str());
    }
    const std::size_t d = static_cast<std::size_t>(two_j + 1);
    dim_ = 1;
    for (int n = 0; n < particles; ++n)
        dim_ *= d;

    auto tables = std::make_shared<Tables>();
    tables->twice_m.resize(dim_);
    tables->blocks.resize(static_cast<std::size_t>(particles * two_j + 1));
    const int offset = particles * two_j;
    for (std::size_t i = 0; i < dim_; ++i) {
        int twice = 0;
        std::size_t rest = i;
        for (int n = 0; n < particles; ++n) {
            twice += two_j - 2 * static_cast<int>(rest % d);
            rest /= d;
        }
        tables->twice_m[i] = twice;
        tables->blocks[static_cast<std::size_t>((twice + offset) / 2)].push_back(i);
    }
    tables_ = std::move(tables);
}

std::vector<HalfInteger> EnsembleShape::magnetization_values() const {
    std::vector<HalfInteger> values;
    const int top = particles_ * two_j_;
    for (int t = -top; t <= top; t += 2)
        values.push_back(HalfInteger::from_twice(t));
    return values;
}

std::optional<std::size_t> EnsembleShape::magnetization_slot(HalfInteger m) const {
    const int top = particles_ * two_j_;
    if (m.twice < -top || m.twice > top || (m.twice + top) % 2 != 0)
        return std::nullopt;
    return static_cast<std::size_t>((m.twice + top) / 2);
}

std::span<const std::size_t> EnsembleShape::block(HalfInteger m) const {
    auto slot = magnetization_slot(m);
    if (!slot)
        return {};
    return tables_->blocks[*slot];
}

std::size_t EnsembleShape::site_stride(int site) const {
    std::size_t stride = 1;
    for (int n = site + 1; n < particles_; ++n)
        stride *= static_cast<std::size_t>(local_dim());
    return stride;
}

// ---------------------------------------------------------------------------
// SubensembleMask

SubensembleMask::SubensembleMask(const EnsembleShape &shape, std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i] < 0 || members_[i] >= shape.particles())
            fail(ErrorCode::invalid_argument,
                 "subensemble index " + std::to_string(members_[i]) + " outside [0, " +
                     std::to_string(shape.particles()) + ")");
        if (i > 0 && members_[i] == members_[i - 1])
            fail(ErrorCode::invalid_argument, "duplicate subensemble index " + std::to_string(members_[i]));
    }
}

SubensembleMask SubensembleMask::all(const EnsembleShape &shape) {
    std::vector<int> sites(static_cast<std::size_t>(shape.particles()));
    for (int n = 0; n < shape.particles(); ++n)
        sites[static_cast<std::size_t>(n)] = n;
    return SubensembleMask(shape, std::move(sites));
}

SubensembleMask SubensembleMask::first_half(const EnsembleShape &shape) {
    std::vector<int> sites;
    for (int n = 0; n < shape.particles() / 2; ++n)
        sites.push_back(n);
    return SubensembleMask(shape, std::move(sites));
}

bool SubensembleMask::contains(int site) const {
    return std::binary_search(members_.begin(), members_.end(), site);
}

// ---------------------------------------------------------------------------
// States

PureState::PureState(EnsembleShape shape, StateVector amplitudes)
    : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != shape_.dim())
        fail(ErrorCode::invalid_argument, "amplitude vector length does not match the ensemble dimension");
}

PureState PureState::basis_state(const EnsembleShape &shape, std::size_t index) {
    if (index >= shape.dim())
        fail(ErrorCode::invalid_argument, "basis index out of range");
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(shape.dim()));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return PureState(shape, std::move(v));
}

void PureState::normalize() {
    double n2 = squared_norm();
    if (!(n2 > 0.0))
        fail(ErrorCode::invalid_argument, "cannot normalize a zero state");
    amplitudes_ /= std::sqrt(n2);
}

DensityOperator::DensityOperator(EnsembleShape shape, DenseMatrix matrix)
    : shape_(std::move(shape)), matrix_(std::move(matrix)) {
    const auto dim = static_cast<Eigen::Index>(shape_.dim());
    if (matrix_.rows() != dim || matrix_.cols() != dim)
        fail(ErrorCode::invalid_argument, "density matrix size does not match the ensemble dimension");
}

DensityOperator DensityOperator::completely_mixed(const EnsembleShape &shape) {
    const auto dim = static_cast<Eigen::Index>(shape.dim());
    DenseMatrix m = DenseMatrix::Identity(dim, dim) / static_cast<double>(dim);
    return DensityOperator(shape, std::move(m));
}

DensityOperator DensityOperator::from_pure(const PureState &state) {
    return DensityOperator(state.shape(), state.amplitudes() * state.amplitudes().adjoint());
}

void DensityOperator::normalize() {
    double tr = trace();
    if (!(tr > 0.0))
        fail(ErrorCode::invalid_argument, "cannot normalize a density operator with zero trace");
    matrix_ /= tr;
}

// ---------------------------------------------------------------------------
// Single-site operators

LocalMatrix spin_matrix(int two_j, Axis axis) {
    if (two_j < 1)
        fail(ErrorCode::invalid_argument, "spin must be at least 1/2");
    const int d = two_j + 1;
    const double j = 0.5 * two_j;
    LocalMatrix raise = LocalMatrix::Zero(d, d);
    LocalMatrix out = LocalMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = j - k;
        if (axis == Axis::z)
            out(k, k) = m;
        if (k > 0)
            raise(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    if (axis == Axis::x)
        out = 0.5 * (raise + raise.adjoint());
    else if (axis == Axis::y)
        out = Complex(0.0, -0.5) * (raise - raise.adjoint());
    return out;
}

LocalMatrix local_rotation(int two_j, Axis axis, double theta) {
    if (!std::isfinite(theta))
        fail(ErrorCode::invalid_argument, "rotation angle must be finite");
    const int d = two_j + 1;
    if (axis == Axis::z) {
        LocalMatrix out = LocalMatrix::Zero(d, d);
        const double j = 0.5 * two_j;
        for (int k = 0; k < d; ++k)
            out(k, k) = std::exp(Complex(0.0, -theta * (j - k)));
        return out;
    }
    Eigen::SelfAdjointEigenSolver<LocalMatrix> eig(spin_matrix(two_j, axis));
    Eigen::VectorXcd phases(d);
    for (int k = 0; k < d; ++k)
        phases[k] = std::exp(Complex(0.0, -theta * eig.eigenvalues()[k]));
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Collective observables

namespace {

std::vector<int> mask_sites(const EnsembleShape &shape, const std::optional<SubensembleMask> &mask) {
    if (!mask) {
        std::vector<int> all(static_cast<std::size_t>(shape.particles()));
        for (int n = 0; n < shape.particles(); ++n)
            all[static_cast<std::size_t>(n)] = n;
        return all;
    }
    for (int site : mask->members())
        if (site < 0 || site >= shape.particles())
            fail(ErrorCode::invalid_argument, "subensemble index out of range for this ensemble");
    return {mask->members().begin(), mask->members().end()};
}

SparseOperator collective_component(const EnsembleShape &shape, Axis axis, std::span<const int> sites) {
    const double j = 0.5 * shape.two_j();
    const std::size_t dim = shape.dim();
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(dim * (sites.size() + 1));
    for (std::size_t i = 0; i < dim; ++i) {
        double diag = 0.0;
        for (int site : sites) {
            const int k = shape.digit(i, site);
            const double m = j - k;
            if (axis == Axis::z) {
                diag += m;
                continue;
            }
            if (k == 0)
                continue;
            // <m+1| j^+ |m> connects index i to the index with digit k-1.
            const double c = std::sqrt(j * (j + 1) - m * (m + 1));
            const auto up = static_cast<Eigen::Index>(i - shape.site_stride(site));
            const auto here = static_cast<Eigen::Index>(i);
            if (axis == Axis::x) {
                triplets.emplace_back(up, here, Complex(0.5 * c, 0.0));
                triplets.emplace_back(here, up, Complex(0.5 * c, 0.0));
            } else {
                triplets.emplace_back(up, here, Complex(0.0, -0.5 * c));
                triplets.emplace_back(here, up, Complex(0.0, 0.5 * c));
            }
        }
        if (axis == Axis::z && diag != 0.0)
            triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), Complex(diag, 0.0));
    }
    const auto n = static_cast<Eigen::Index>(dim);
    SparseOperator op(n, n);
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

}  // namespace

CollectiveObservable build_observable(const EnsembleShape &shape, ObservableKind kind,
                                      const std::optional<SubensembleMask> &mask) {
    const auto sites = mask_sites(shape, mask);
    SparseOperator op;
    switch (kind) {
    case ObservableKind::x:
        op = collective_component(shape, Axis::x, sites);
        break;
    case ObservableKind::y:
        op = collective_component(shape, Axis::y, sites);
        break;
    case ObservableKind::z:
        op = collective_component(shape, Axis::z, sites);
        break;
    case ObservableKind::casimir: {
        SparseOperator jx = collective_component(shape, Axis::x, sites);
        SparseOperator jy = collective_component(shape, Axis::y, sites);
        SparseOperator jz = collective_component(shape, Axis::z, sites);
        op = SparseOperator(jx * jx) + SparseOperator(jy * jy) + SparseOperator(jz * jz);
        op.prune(Complex(0.0, 0.0), 1e-14);
        break;
    }
    }
    return CollectiveObservable(shape, kind, mask, std::move(op));
}

// ---------------------------------------------------------------------------
// Local operator application

namespace {

bool is_diagonal(const LocalMatrix &op) {
    for (Eigen::Index r = 0; r < op.rows(); ++r)
        for (Eigen::Index c = 0; c < op.cols(); ++c)
            if (r != c && op(r, c) != Complex(0.0, 0.0))
                return false;
    return true;
}

// Applies a d x d matrix to the digit whose place value is `stride` in a buffer
// of `len` entries; `len` must be a multiple of stride * d.
void apply_digit(Complex *data, std::size_t len, std::size_t stride, const LocalMatrix &op) {
    const auto d = static_cast<std::size_t>(op.rows());
    const std::size_t span = stride * d;
    if (is_diagonal(op)) {
        for (std::size_t outer = 0; outer < len; outer += span)
            for (std::size_t k = 0; k < d; ++k) {
                const Complex f = op(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
                if (f == Complex(1.0, 0.0))
                    continue;
                Complex *p = data + outer + k * stride;
                for (std::size_t i = 0; i < stride; ++i)
                    p[i] *= f;
            }
        return;
    }
    if (d == 2) {
        const Complex u00 = op(0, 0), u01 = op(0, 1), u10 = op(1, 0), u11 = op(1, 1);
        for (std::size_t outer = 0; outer < len; outer += span) {
            Complex *a = data + outer;
            Complex *b = a + stride;
            for (std::size_t i = 0; i < stride; ++i) {
                const Complex x = a[i];
                const Complex y = b[i];
                a[i] = u00 * x + u01 * y;
                b[i] = u10 * x + u11 * y;
            }
        }
        return;
    }
    std::vector<Complex> in(d), out(d);
    for (std::size_t outer = 0; outer < len; outer += span)
        for (std::size_t i = 0; i < stride; ++i) {
            Complex *base = data + outer + i;
            for (std::size_t k = 0; k < d; ++k)
                in[k] = base[k * stride];
            for (std::size_t r = 0; r < d; ++r) {
                Complex acc(0.0, 0.0);
                for (std::size_t c = 0; c < d; ++c)
                    acc += op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
                out[r] = acc;
            }
            for (std::size_t k = 0; k < d; ++k)
                base[k * stride] = out[k];
        }
}

void check_local(const EnsembleShape &shape, const LocalMatrix &op, std::span<const int> sites) {
    if (op.rows() != shape.local_dim() || op.cols() != shape.local_dim())
        fail(ErrorCode::invalid_argument, "local operator dimension does not match 2j+1");
    for (int site : sites)
        if (site < 0 || site >= shape.particles())
            fail(ErrorCode::invalid_argument, "site index out of range");
}

}  // namespace

void apply_local(PureState &state, const LocalMatrix &op, std::span<const int> sites) {
    const auto &shape = state.shape();
    check_local(shape, op, sites);
    for (int site : sites)
        apply_digit(state.amplitudes().data(), shape.dim(), shape.site_stride(site), op);
}

void apply_local(DensityOperator &state, const LocalMatrix &op, std::span<const int> sites) {
    const auto &shape = state.shape();
    check_local(shape, op, sites);
    const std::size_t dim = shape.dim();
    const LocalMatrix conj = op.conjugate();
    // Column-major storage: the row index is the fast one.
    for (int site : sites) {
        apply_digit(state.matrix().data(), dim * dim, shape.site_stride(site), op);
        apply_digit(state.matrix().data(), dim * dim, shape.site_stride(site) * dim, conj);
    }
}

template <QuantumState S>
void apply_rotation(S &state, Axis axis, const std::optional<SubensembleMask> &mask, double theta) {
    const auto sites = mask_sites(state.shape(), mask);
    if (theta == 0.0)
        return;
    apply_local(state, local_rotation(state.shape().two_j(), axis, theta), sites);
}

template void apply_rotation(PureState &, Axis, const std::optional<SubensembleMask> &, double);
template void apply_rotation(DensityOperator &, Axis, const std::optional<SubensembleMask> &, double);

void apply_magnetization_diagonal(PureState &state, std::span<const Complex> factors) {
    const auto &shape = state.shape();
    if (factors.size() != shape.magnetization_count())
        fail(ErrorCode::invalid_argument, "one factor per magnetization value expected");
    const int offset = shape.j_max().twice;
    auto tm = shape.twice_magnetizations();
    auto &a = state.amplitudes();
    for (std::size_t i = 0; i < shape.dim(); ++i)
        a[static_cast<Eigen::Index>(i)] *= factors[static_cast<std::size_t>((tm[i] + offset) / 2)];
}

void apply_magnetization_diagonal(DensityOperator &state, std::span<const Complex> factors) {
    const auto &shape = state.shape();
    if (factors.size() != shape.magnetization_count())
        fail(ErrorCode::invalid_argument, "one factor per magnetization value expected");
    const int offset = shape.j_max().twice;
    auto tm = shape.twice_magnetizations();
    const std::size_t dim = shape.dim();
    auto &rho = state.matrix();
    for (std::size_t c = 0; c < dim; ++c) {
        const Complex fc = std::conj(factors[static_cast<std::size_t>((tm[c] + offset) / 2)]);
        for (std::size_t r = 0; r < dim; ++r)
            rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *=
                factors[static_cast<std::size_t>((tm[r] + offset) / 2)] * fc;
    }
}

// ---------------------------------------------------------------------------
// Measurement

std::vector<double> magnetization_weights(const PureState &state) {
    const auto &shape = state.shape();
    std::vector<double> w(shape.magnetization_count(), 0.0);
    const int offset = shape.j_max().twice;
    auto tm = shape.twice_magnetizations();
    const auto &a = state.amplitudes();
    for (std::size_t i = 0; i < shape.dim(); ++i)
        w[static_cast<std::size_t>((tm[i] + offset) / 2)] += std::norm(a[static_cast<Eigen::Index>(i)]);
    return w;
}

std::vector<double> magnetization_weights(const DensityOperator &state) {
    const auto &shape = state.shape();
    std::vector<double> w(shape.magnetization_count(), 0.0);
    const int offset = shape.j_max().twice;
    auto tm = shape.twice_magnetizations();
    const auto &rho = state.matrix();
    for (std::size_t i = 0; i < shape.dim(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        w[static_cast<std::size_t>((tm[i] + offset) / 2)] += rho(ii, ii).real();
    }
    for (double &x : w)
        x = std::max(x, 0.0);
    return w;
}

template <QuantumState S>
std::vector<double> outcome_weights(const S &state, MeasurementBasis basis) {
    if (basis == MeasurementBasis::z)
        return magnetization_weights(state);
    S rotated = state;
    to_x_frame(rotated);
    return magnetization_weights(rotated);
}

template std::vector<double> outcome_weights(const PureState &, MeasurementBasis);
template std::vector<double> outcome_weights(const DensityOperator &, MeasurementBasis);

namespace {

std::span<const std::size_t> checked_block(const EnsembleShape &shape, HalfInteger m) {
    if (!shape.magnetization_slot(m))
        fail(ErrorCode::invalid_argument, "magnetization " + m.to_string() + " outside [-J_max, J_max] in unit steps");
    return shape.block(m);
}

[[noreturn]] void impossible(HalfInteger m, double p) {
    std::ostringstream msg;
    msg << "outcome m = " << m.to_string() << " has Born probability " << p << " (impossible)";
    fail(ErrorCode::impossible_outcome, msg.str());
}

}  // namespace

double project_z(PureState &state, HalfInteger m, double floor) {
    auto block = checked_block(state.shape(), m);
    auto &a = state.amplitudes();
    double p = 0.0;
    for (std::size_t i : block)
        p += std::norm(a[static_cast<Eigen::Index>(i)]);
    if (!(p > floor))
        impossible(m, p);
    StateVector projected = StateVector::Zero(a.size());
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i : block)
        projected[static_cast<Eigen::Index>(i)] = a[static_cast<Eigen::Index>(i)] * scale;
    a = std::move(projected);
    return p;
}

double project_z(DensityOperator &state, HalfInteger m, double floor) {
    auto block = checked_block(state.shape(), m);
    auto &rho = state.matrix();
    double p = 0.0;
    for (std::size_t i : block)
        p += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    if (!(p > floor))
        impossible(m, p);
    const auto b = static_cast<Eigen::Index>(block.size());
    DenseMatrix sub(b, b);
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < b; ++r)
            sub(r, c) = rho(static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)]),
                            static_cast<Eigen::Index>(block[static_cast<std::size_t>(c)]));
    rho.setZero();
    const double scale = 1.0 / p;
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < b; ++r)
            rho(static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)]),
                static_cast<Eigen::Index>(block[static_cast<std::size_t>(c)])) = sub(r, c) * scale;
    return p;
}

template <QuantumState S>
void to_x_frame(S &state) {
    apply_rotation(state, Axis::y, std::nullopt, -std::numbers::pi / 2);
}

template <QuantumState S>
void from_x_frame(S &state) {
    apply_rotation(state, Axis::y, std::nullopt, std::numbers::pi / 2);
}

template void to_x_frame(PureState &);
template void to_x_frame(DensityOperator &);
template void from_x_frame(PureState &);
template void from_x_frame(DensityOperator &);

template <QuantumState S>
Projected<S> apply_projection(const S &state, MeasurementBasis basis, HalfInteger m, double floor) {
    S out = state;
    if (basis == MeasurementBasis::x)
        to_x_frame(out);
    double p = project_z(out, m, floor);
    if (basis == MeasurementBasis::x)
        from_x_frame(out);
    return Projected<S>{std::move(out), p};
}

template Projected<PureState> apply_projection(const PureState &, MeasurementBasis, HalfInteger, double);
template Projected<DensityOperator> apply_projection(const DensityOperator &, MeasurementBasis, HalfInteger,
                                                     double);

DenseMatrix projector(const EnsembleShape &shape, MeasurementBasis basis, HalfInteger m) {
    auto block = checked_block(shape, m);
    const auto dim = static_cast<Eigen::Index>(shape.dim());
    DenseMatrix p = DenseMatrix::Zero(dim, dim);
    for (std::size_t i : block)
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    if (basis == MeasurementBasis::x) {
        DensityOperator conj(shape, std::move(p));
        from_x_frame(conj);
        return std::move(conj.matrix());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Expectations

namespace {

void check_shape(const EnsembleShape &a, const EnsembleShape &b) {
    if (!(a == b))
        fail(ErrorCode::invalid_argument, "state and observable belong to different ensembles");
}

double sparse_trace_product(const SparseOperator &op, const DenseMatrix &rho) {
    // tr(O rho) = sum_{r,c} O_rc rho_cr
    Complex acc(0.0, 0.0);
    for (Eigen::Index c = 0; c < op.outerSize(); ++c)
        for (SparseOperator::InnerIterator it(op, c); it; ++it)
            acc += it.value() * rho(c, it.row());
    return acc.real();
}

}  // namespace

double expectation(const PureState &state, const SparseOperator &op) {
    return state.amplitudes().dot(op * state.amplitudes()).real();
}

double expectation(const DensityOperator &state, const SparseOperator &op) {
    return sparse_trace_product(op, state.matrix());
}

double expectation(const PureState &state, const CollectiveObservable &observable) {
    check_shape(state.shape(), observable.shape());
    const auto &a = state.amplitudes();
    return a.dot(observable.matrix() * a).real();
}

double expectation(const DensityOperator &state, const CollectiveObservable &observable) {
    check_shape(state.shape(), observable.shape());
    return sparse_trace_product(observable.matrix(), state.matrix());
}

template <QuantumState S>
double variance(const S &state, Axis axis) {
    const ObservableKind kind = axis == Axis::x ? ObservableKind::x
                                : axis == Axis::y ? ObservableKind::y
                                                  : ObservableKind::z;
    const auto obs = build_observable(state.shape(), kind);
    const SparseOperator sq = obs.matrix() * obs.matrix();
    const double mean = expectation(state, obs);
    double second;
    if constexpr (std::same_as<S, PureState>)
        second = state.amplitudes().dot(sq * state.amplitudes()).real();
    else
        second = sparse_trace_product(sq, state.matrix());
    return std::max(second - mean * mean, 0.0);
}

template double variance(const PureState &, Axis);
template double variance(const DensityOperator &, Axis);

double overlap_fidelity(const PureState &a, const PureState &b) {
    check_shape(a.shape(), b.shape());
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double overlap_fidelity(const DensityOperator &a, const PureState &b) {
    check_shape(a.shape(), b.shape());
    return b.amplitudes().dot(a.matrix() * b.amplitudes()).real();
}

double trace_distance(const PureState &a, const PureState &b) {
    return std::sqrt(std::max(0.0, 1.0 - overlap_fidelity(a, b)));
}

double trace_distance(const DensityOperator &a, const DensityOperator &b) {
    check_shape(a.shape(), b.shape());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

}  // namespace ssprep
