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
#include <list>
#include <memory>
#include <mutex>
#include <utility>

#include <Eigen/Eigenvalues>

#include "nlamp/core/hermite.hpp"
#include "nlamp/core/operators.hpp"

namespace nlamp {

/// U = exp(-i H t) for Hermitian H, built from the eigendecomposition of H
/// so the result is unitary to roundoff with exact phases (no series).
inline Operator unitary_from_generator(const Operator& h, double t) {
    const double resid = hermiticity_residual(h);
    if (resid > 1e-10 * std::max(1.0, max_abs(h.matrix))) throw NotHermitian(resid);
    const CMatrix sym = 0.5 * (h.matrix + h.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    const CVector phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp().matrix();
    CMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return {h.dims, std::move(u)};
}

/// Eigendecomposition of the truncated position operator x = Q diag(nodes) Q^T.
///
/// x is the Jacobi matrix of the Hermite functions, so its eigenvalues are
/// the Gauss-Hermite nodes and eigenvector k has components proportional to
/// h_n(node_k). Eigenvalues come from the tridiagonal QL solver (O(N^2)) and
/// eigenvectors from the Hermite recurrence, which avoids the O(N^3)
/// eigenvector accumulation for the large meter spaces.
struct QuadratureBasis {
    int dim = 0;
    RVector nodes;
    RMatrix vectors;  // column k is the eigenvector for nodes(k)

    explicit QuadratureBasis(int d) : dim(d) {
        RVector diag = RVector::Zero(d);
        RVector sub(d - 1);
        for (int k = 1; k < d; ++k) sub(k - 1) = std::sqrt(0.5 * k);
        Eigen::SelfAdjointEigenSolver<RMatrix> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        nodes = es.eigenvalues();
        vectors.resize(d, d);
        for (int k = 0; k < d; ++k) {
            const RVector v = unscaled_hermite(d, nodes(k));
            vectors.col(k) = v / v.norm();
        }
    }

    /// exp(-i t x) restricted to the truncated space.
    CMatrix exp_x(double t) const {
        const CVector ph = (-kI * t * nodes.cast<cplx>()).array().exp().matrix();
        return vectors.cast<cplx>() * ph.asDiagonal() * vectors.transpose().cast<cplx>();
    }

   private:
    // Recurrence started from 1 with periodic rescaling; only directions matter here.
    static RVector unscaled_hermite(int count, double x) {
        RVector out(count);
        double prev = 0.0, cur = 1.0;
        out(0) = cur;
        for (int n = 0; n + 1 < count; ++n) {
            const double next =
                std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
            prev = cur;
            cur = next;
            out(n + 1) = cur;
            if (std::abs(cur) > 1e150) {
                out.head(n + 2) *= 1e-150;
                prev *= 1e-150;
                cur *= 1e-150;
            }
        }
        return out;
    }
};

/// Shared, immutable quadrature bases keyed by dimension (small LRU cache).
inline std::shared_ptr<const QuadratureBasis> quadrature_basis(int dim) {
    static std::mutex mu;
    static std::list<std::shared_ptr<const QuadratureBasis>> cache;
    {
        std::lock_guard lock(mu);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if ((*it)->dim == dim) {
                auto hit = *it;
                cache.erase(it);
                cache.push_front(hit);
                return hit;
            }
        }
    }
    auto made = std::make_shared<const QuadratureBasis>(dim);
    std::lock_guard lock(mu);
    cache.push_front(made);
    while (cache.size() > 4) cache.pop_back();
    return made;
}

/// Applies exp(-i s p) (a rigid shift of x by +s) to vectors in a truncated mode.
///
/// p = S x S^dag with S = diag(i^n), so exp(-i s p) = S Q e^{-i s nodes} Q^T S^dag.
/// Construct once per input vector and evaluate for many shifts.
class ShiftPropagator {
   public:
    ShiftPropagator(std::shared_ptr<const QuadratureBasis> basis, const CVector& v) : basis_(std::move(basis)) {
        const int d = basis_->dim;
        if (v.size() != d) throw DimensionMismatch("ShiftPropagator: vector does not match basis");
        CVector w(d);
        for (int n = 0; n < d; ++n) w(n) = std::conj(ipow(n)) * v(n);
        coeff_ = basis_->vectors.transpose().cast<cplx>() * w;
    }

    CVector shifted(double s) const {
        const int d = basis_->dim;
        CVector ph(d);
        for (int k = 0; k < d; ++k) ph(k) = std::polar(1.0, -s * basis_->nodes(k)) * coeff_(k);
        CVector out = basis_->vectors.cast<cplx>() * ph;
        for (int n = 0; n < d; ++n) out(n) *= ipow(n);
        return out;
    }

    static cplx ipow(int n) {
        switch (n & 3) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }

   private:
    std::shared_ptr<const QuadratureBasis> basis_;
    CVector coeff_;
};

/// Truncated displacement D(alpha) = exp(alpha b^dag - alpha^* b) applied to v.
///
/// D(alpha) = R(theta) exp(-i sqrt(2)|alpha| p) R(theta)^dag with R = e^{i theta n},
/// the exact exponential of the truncated generator.
inline CVector displace(const CVector& v, cplx alpha) {
    const int d = static_cast<int>(v.size());
    const double theta = std::arg(alpha);
    CVector w(d);
    for (int n = 0; n < d; ++n) w(n) = std::polar(1.0, -theta * n) * v(n);
    CVector out = ShiftPropagator(quadrature_basis(d), w).shifted(std::sqrt(2.0) * std::abs(alpha));
    for (int n = 0; n < d; ++n) out(n) *= std::polar(1.0, theta * n);
    return out;
}

}  // namespace nlamp
