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

#ifndef SSPREP_TESTS_SUPPORT_ORACLES_HPP
#define SSPREP_TESTS_SUPPORT_ORACLES_HPP

// Independent reference constructions used as test oracles. Everything here is
// built from textbook formulas with dense Kronecker products, sharing no code
// with the library's strided kernels.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Spin-j matrices in the |j, m> basis ordered m = j, j-1, ..., -j.
inline Matrix spin(int two_j, char axis) {
    const int d = two_j + 1;
    const double j = 0.5 * two_j;
    Matrix jp = Matrix::Zero(d, d);
    Matrix jz = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = j - k;
        jz(k, k) = m;
        if (k > 0)  // <m+1| J+ |m>
            jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    if (axis == 'z')
        return jz;
    const Matrix jm = jp.adjoint();
    if (axis == 'x')
        return 0.5 * (jp + jm);
    return Complex(0, -0.5) * (jp - jm);
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
    return out;
}

// op acting on `site` (site 0 is the leftmost factor) of an N-site register.
inline Matrix embed(const Matrix &op, int site, int particles) {
    const auto d = op.rows();
    Matrix out = Matrix::Identity(1, 1);
    for (int s = 0; s < particles; ++s)
        out = kron(out, s == site ? op : Matrix(Matrix::Identity(d, d)));
    return out;
}

inline Matrix collective(int two_j, int particles, char axis) {
    Matrix total;
    for (int s = 0; s < particles; ++s) {
        Matrix term = embed(spin(two_j, axis), s, particles);
        total = s == 0 ? term : Matrix(total + term);
    }
    return total;
}

inline Matrix casimir(int two_j, int particles) {
    const Matrix x = collective(two_j, particles, 'x');
    const Matrix y = collective(two_j, particles, 'y');
    const Matrix z = collective(two_j, particles, 'z');
    return x * x + y * y + z * z;
}

// exp(-i theta J^axis) by diagonalizing the Hermitian generator.
inline Matrix rotation(const Matrix &generator, double theta) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(generator);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0, -theta * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Spectral projector of a Hermitian matrix onto eigenvalue `value`.
inline Matrix eigenprojector(const Matrix &h, double value, double tol = 1e-8) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Matrix p = Matrix::Zero(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        if (std::abs(es.eigenvalues()(i) - value) < tol)
            p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    return p;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// Number of spin-S multiplets among N spin-1/2 particles: C(N, N/2 - S) - C(N, N/2 - S - 1).
inline std::uint64_t qubit_multiplets(int particles, int twice_total) {
    const int k = (particles - twice_total) / 2;
    return binomial(particles, k) - binomial(particles, k - 1);
}

}  // namespace oracle

#endif
