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

#include "nlamp/core/moments.hpp"
#include "nlamp/core/tensor.hpp"

namespace nlamp {

/// Moments of a single-mode operator acting on one slot of a composite state.
///
/// Kets are handled without forming the reduced density matrix.
struct SlotMoments {
    cplx mean{0.0, 0.0};
    double symmetrized = 0.0;
};

inline SlotMoments slot_moments(const State& s, std::size_t slot, const CMatrix& op) {
    if (slot >= s.dims().size()) throw DimensionMismatch("slot out of range");
    if (op.rows() != s.dims()[slot]) throw DimensionMismatch("operator does not match slot dimension");
    if (s.is_ket()) {
        const CVector& v = s.ket();
        const CVector ov = apply_on_slot(op, slot, s.dims(), v);
        const CVector odv = apply_on_slot(op.adjoint(), slot, s.dims(), v);
        const cplx mean = v.dot(ov);
        const double second = 0.5 * (ov.squaredNorm() + odv.squaredNorm());
        return {mean, std::max(0.0, second - std::norm(mean))};
    }
    const State reduced = partial_trace(s, {slot});
    const Operator o(Dims{s.dims()[slot]}, op);
    return {expectation(reduced, o), symmetrized_moment(reduced, o)};
}

/// For Hermitian op the symmetrized moment is the ordinary variance.
inline double slot_variance(const State& s, std::size_t slot, const CMatrix& op) {
    if (hermiticity_residual(op) > 1e-10 * std::max(1.0, max_abs(op))) throw NotHermitian(hermiticity_residual(op));
    return slot_moments(s, slot, op).symmetrized;
}

/// Probability carried by the top Fock level of one slot.
inline double top_level_occupancy(const State& s, std::size_t slot) {
    const Dims& dims = s.dims();
    std::size_t inner = 1;
    for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= static_cast<std::size_t>(dims[k]);
    const auto d = static_cast<std::size_t>(dims[slot]);
    const std::size_t n = total_dim(dims);
    const CMatrix rho = s.is_ket() ? CMatrix() : s.density();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if ((i / inner) % d != d - 1) continue;
        const auto e = static_cast<Eigen::Index>(i);
        total += s.is_ket() ? std::norm(s.ket()(e)) : rho(e, e).real();
    }
    return total;
}

}  // namespace nlamp
