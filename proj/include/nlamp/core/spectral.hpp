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

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "nlamp/core/operators.hpp"

namespace nlamp {

inline constexpr double kClusterTol = 1e-8;

/// f = sum_i lambda_i |e_i><e_i| for a normal operator f.
struct SpectralDecomposition {
    Dims dims;
    CVector eigenvalues;
    CMatrix eigenvectors;  // orthonormal columns |e_i>
    double residual = 0.0;  // max |f - sum_i lambda_i |e_i><e_i||

    Eigen::Index size() const { return eigenvalues.size(); }

    CMatrix reconstruct() const { return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint(); }

    CMatrix projector(Eigen::Index i) const { return eigenvectors.col(i) * eigenvectors.col(i).adjoint(); }

    /// Functional calculus: sum_i fn(lambda_i) |e_i><e_i|.
    CMatrix apply(const std::function<cplx(cplx)>& fn) const {
        CVector vals(size());
        for (Eigen::Index i = 0; i < size(); ++i) vals(i) = fn(eigenvalues(i));
        return eigenvectors * vals.asDiagonal() * eigenvectors.adjoint();
    }

    double max_abs_eigenvalue() const { return size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff(); }
};

/// Groups eigenvalue indices whose values lie within tol of each other (transitively).
inline std::vector<std::vector<Eigen::Index>> eigenvalue_clusters(const CVector& values, double tol = kClusterTol) {
    const auto n = values.size();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    std::function<Eigen::Index(Eigen::Index)> find = [&](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(values(i) - values(j)) < tol) parent[static_cast<std::size_t>(find(j))] = find(i);
        }
    }
    std::vector<std::vector<Eigen::Index>> groups;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto root = find(i);
        auto& s = slot[static_cast<std::size_t>(root)];
        if (s < 0) {
            s = static_cast<Eigen::Index>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(s)].push_back(i);
    }
    return groups;
}

inline double default_normality_tol(const Operator& f) { return 1e-9 * std::max(1.0, max_abs(f.matrix)); }

/// Spectral decomposition of a normal operator via the complex Schur form,
/// which is diagonal (up to roundoff) exactly when the input is normal.
inline SpectralDecomposition normal_decompose(const Operator& f, std::optional<double> tol = std::nullopt) {
    const double t = tol.value_or(default_normality_tol(f));
    const double comm = normality_residual(f);
    if (comm >= t) throw NotNormal(comm);

    Eigen::ComplexSchur<CMatrix> schur(f.matrix);
    const CMatrix& tri = schur.matrixT();
    const auto n = tri.rows();
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) off = std::max(off, std::abs(tri(i, j)));
    }
    if (off >= 10.0 * t) throw NotNormal(comm);

    // Deterministic order: ascending real part, then imaginary part.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const cplx x = tri(a, a), y = tri(b, b);
        if (std::abs(x.real() - y.real()) > kClusterTol) return x.real() < y.real();
        return x.imag() < y.imag() - kClusterTol;
    });

    SpectralDecomposition d;
    d.dims = f.dims;
    d.eigenvalues.resize(n);
    d.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        d.eigenvalues(k) = tri(src, src);
        d.eigenvectors.col(k) = schur.matrixU().col(src);
    }
    for (const auto& group : eigenvalue_clusters(d.eigenvalues)) {
        if (group.size() < 2) continue;
        CMatrix block(n, static_cast<Eigen::Index>(group.size()));
        for (std::size_t c = 0; c < group.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = d.eigenvectors.col(group[c]);
        Eigen::HouseholderQR<CMatrix> qr(block);
        const CMatrix q = qr.householderQ() * CMatrix::Identity(n, block.cols());
        for (std::size_t c = 0; c < group.size(); ++c) d.eigenvectors.col(group[c]) = q.col(static_cast<Eigen::Index>(c));
    }
    d.residual = max_abs(f.matrix - d.reconstruct());
    return d;
}

}  // namespace nlamp
