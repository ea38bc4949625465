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
#include <vector>

#include "nlamp/core/state.hpp"

namespace nlamp {

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline Operator tensor(const std::vector<Operator>& ops) {
    if (ops.empty()) throw DimensionMismatch("tensor of nothing");
    Dims dims = ops.front().dims;
    CMatrix m = ops.front().matrix;
    for (std::size_t k = 1; k < ops.size(); ++k) {
        dims.insert(dims.end(), ops[k].dims.begin(), ops[k].dims.end());
        m = kron(m, ops[k].matrix);
    }
    return {std::move(dims), std::move(m)};
}

inline State tensor(const std::vector<State>& states) {
    if (states.empty()) throw DimensionMismatch("tensor of nothing");
    Dims dims;
    for (const auto& s : states) dims.insert(dims.end(), s.dims().begin(), s.dims().end());
    const bool all_kets = std::all_of(states.begin(), states.end(), [](const State& s) { return s.is_ket(); });
    if (all_kets) {
        CVector v = states.front().ket();
        for (std::size_t k = 1; k < states.size(); ++k) v = kron(v, states[k].ket());
        return State::from_ket(std::move(dims), std::move(v), 1e-10);
    }
    CMatrix rho = states.front().density();
    for (std::size_t k = 1; k < states.size(); ++k) rho = kron(rho, states[k].density());
    return State::from_density(std::move(dims), std::move(rho), 1e-10);
}

/// Places a single-mode operator at position slot of the composite dims.
inline Operator embed(const Operator& op, std::size_t slot, const Dims& dims) {
    if (slot >= dims.size()) throw DimensionMismatch("slot out of range");
    if (op.dims.size() != 1 || op.dims[0] != dims[slot]) {
        throw DimensionMismatch("embedded operator dim does not match slot " + std::to_string(slot));
    }
    CMatrix m = CMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        m = kron(m, k == slot ? op.matrix : CMatrix(CMatrix::Identity(dims[k], dims[k])));
    }
    return {dims, std::move(m)};
}

/// Applies a single-mode matrix to one slot of a composite vector without forming the embedding.
inline CVector apply_on_slot(const CMatrix& op, std::size_t slot, const Dims& dims, const CVector& v) {
    if (slot >= dims.size() || op.rows() != dims[slot] || op.cols() != dims[slot]) {
        throw DimensionMismatch("apply_on_slot: operator does not match slot");
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t k = 0; k < slot; ++k) outer *= static_cast<std::size_t>(dims[k]);
    for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= static_cast<std::size_t>(dims[k]);
    const auto d = static_cast<Eigen::Index>(dims[slot]);
    const auto in = static_cast<Eigen::Index>(inner);
    CVector out(v.size());
    for (std::size_t o = 0; o < outer; ++o) {
        const auto base = static_cast<Eigen::Index>(o) * d * in;
        // Column-major map: column i holds the inner block for slot level i.
        Eigen::Map<const CMatrix> block(v.data() + base, in, d);
        Eigen::Map<CMatrix> dest(out.data() + base, in, d);
        dest.noalias() = block * op.transpose();
    }
    return out;
}

/// Reduced state on the listed slots (kept in ascending slot order).
inline State partial_trace(const State& s, std::vector<std::size_t> keep) {
    const Dims& dims = s.dims();
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (auto k : keep) {
        if (k >= dims.size()) throw DimensionMismatch("partial_trace: slot out of range");
    }
    Dims kept_dims, traced_dims;
    std::vector<char> is_kept(dims.size(), 0);
    for (auto k : keep) is_kept[k] = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) (is_kept[k] ? kept_dims : traced_dims).push_back(dims[k]);
    const auto nk = static_cast<Eigen::Index>(total_dim(kept_dims));
    const auto nt = static_cast<Eigen::Index>(total_dim(traced_dims));

    // Map every flat index to (kept index, traced index).
    const auto n = static_cast<std::size_t>(s.size());
    std::vector<Eigen::Index> ki(n), ti(n);
    std::vector<int> idx(dims.size(), 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        Eigen::Index a = 0, b = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (is_kept[k]) {
                a = a * dims[k] + idx[k];
            } else {
                b = b * dims[k] + idx[k];
            }
        }
        ki[flat] = a;
        ti[flat] = b;
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
        }
    }

    CMatrix rho = CMatrix::Zero(nk, nk);
    if (s.is_ket()) {
        CMatrix psi = CMatrix::Zero(nk, nt);
        for (std::size_t flat = 0; flat < n; ++flat) psi(ki[flat], ti[flat]) = s.ket()(static_cast<Eigen::Index>(flat));
        rho.noalias() = psi * psi.adjoint();
    } else {
        const CMatrix full = s.density();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (ti[i] == ti[j]) {
                    rho(ki[i], ki[j]) += full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
        }
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return State::from_density(std::move(kept_dims), std::move(rho), 1e-9);
}

/// Permutation exchanging the full Hilbert spaces of modes i and j (equal dims).
inline Operator cv_swap(const Dims& dims, std::size_t i, std::size_t j) {
    if (i >= dims.size() || j >= dims.size()) throw DimensionMismatch("cv_swap: slot out of range");
    if (dims[i] != dims[j]) throw DimensionMismatch("cv_swap requires equal dims on swapped modes");
    const auto n = total_dim(dims);
    CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t flat = 0; flat < n; ++flat) {
        auto idx = unravel(flat, dims);
        std::swap(idx[i], idx[j]);
        std::size_t target = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) target = target * static_cast<std::size_t>(dims[k]) + idx[k];
        p(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(flat)) = 1.0;
    }
    return {dims, std::move(p)};
}

}  // namespace nlamp
