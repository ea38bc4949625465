// Copyright 2026 The nlamp Authors
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

#pragma once

#include <cmath>
#include <utility>

#include "nlamp/core/errors.hpp"
#include "nlamp/core/space.hpp"
#include "nlamp/core/types.hpp"

namespace nlamp {

/// Dense operator on a (possibly composite) truncated Fock space.
struct Operator {
    Dims dims;
    CMatrix matrix;

    Operator() = default;
    Operator(Dims d, CMatrix m) : dims(std::move(d)), matrix(std::move(m)) {
        const auto n = static_cast<Eigen::Index>(total_dim(dims));
        if (matrix.rows() != n || matrix.cols() != n) {
            throw DimensionMismatch("operator matrix does not match space " + dims_to_string(dims));
        }
        if (!matrix.allFinite()) throw Error("operator has non-finite entries");
    }
    Operator(const FockSpace& s, CMatrix m) : Operator(Dims{s.dim}, std::move(m)) {}

    Eigen::Index size() const { return matrix.rows(); }
    Operator adjoint() const { return {dims, matrix.adjoint()}; }
};

inline void require_same_space(const Operator& a, const Operator& b) {
    if (a.dims != b.dims) {
        throw DimensionMismatch("operators live on different spaces " + dims_to_string(a.dims) + " vs " +
                                dims_to_string(b.dims));
    }
}

inline Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return {a.dims, a.matrix * b.matrix};
}
inline Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return {a.dims, a.matrix + b.matrix};
}
inline Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a, b);
    return {a.dims, a.matrix - b.matrix};
}
inline Operator operator*(cplx c, const Operator& a) { return {a.dims, c * a.matrix}; }

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator identity_op(const Dims& dims) {
    const auto n = static_cast<Eigen::Index>(total_dim(dims));
    return {dims, CMatrix::Identity(n, n)};
}
inline Operator identity_op(const FockSpace& s) { return identity_op(Dims{s.dim}); }

/// Ladder operator with <n-1|a|n> = sqrt(n).
inline Operator annihilation_op(const FockSpace& s) {
    CMatrix a = CMatrix::Zero(s.dim, s.dim);
    for (int n = 1; n < s.dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {s, std::move(a)};
}

inline Operator creation_op(const FockSpace& s) { return annihilation_op(s).adjoint(); }

inline Operator number_op(const FockSpace& s) {
    CMatrix n = CMatrix::Zero(s.dim, s.dim);
    for (int k = 0; k < s.dim; ++k) n(k, k) = static_cast<double>(k);
    return {s, std::move(n)};
}

/// Returns (x, p) with x = (a + a^dag)/sqrt(2) and p = -i(a - a^dag)/sqrt(2).
inline std::pair<Operator, Operator> quadrature_ops(const FockSpace& s) {
    const CMatrix a = annihilation_op(s).matrix;
    const double r = 1.0 / std::sqrt(2.0);
    return {Operator{s, r * (a + a.adjoint())}, Operator{s, -kI * r * (a - a.adjoint())}};
}

/// Diagonal phase operator exp(i theta a^dag a).
inline Operator rotation_op(const FockSpace& s, double theta) {
    CMatrix r = CMatrix::Zero(s.dim, s.dim);
    for (int k = 0; k < s.dim; ++k) r(k, k) = std::polar(1.0, theta * k);
    return {s, std::move(r)};
}

/// Parity (-1)^{a^dag a}.
inline Operator parity_op(const FockSpace& s) { return rotation_op(s, kPi); }

inline double hermiticity_residual(const CMatrix& m) { return max_abs(m - m.adjoint()); }
inline double hermiticity_residual(const Operator& op) { return hermiticity_residual(op.matrix); }

inline double unitarity_residual(const CMatrix& u) {
    return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
}
inline double unitarity_residual(const Operator& op) { return unitarity_residual(op.matrix); }

/// max |[f, f^dag]|, the normality test statistic.
inline double normality_residual(const CMatrix& f) { return max_abs(f * f.adjoint() - f.adjoint() * f); }
inline double normality_residual(const Operator& op) { return normality_residual(op.matrix); }

inline bool is_hermitian(const Operator& op, double tol) { return hermiticity_residual(op) < tol; }
inline bool is_unitary(const Operator& op, double tol) { return unitarity_residual(op) < tol; }

/// Max entry of m restricted to rows and columns inside the guarded subspace of dims.
inline double guarded_max_abs(const CMatrix& m, const Dims& dims) {
    double worst = 0.0;
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<char> keep(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = in_guarded_subspace(i, dims) ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!keep[j]) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (keep[i]) {
                worst = std::max(worst, std::abs(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            }
        }
    }
    return worst;
}

/// Projector onto Fock levels 0..levels-1 of a single mode.
inline CMatrix low_level_projector(int dim, int levels) {
    CMatrix p = CMatrix::Zero(dim, dim);
    for (int k = 0; k < std::min(dim, levels); ++k) p(k, k) = 1.0;
    return p;
}

}  // namespace nlamp
