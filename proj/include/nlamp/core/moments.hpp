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

#include "nlamp/core/state.hpp"

namespace nlamp {

inline cplx expectation(const State& s, const CMatrix& op) {
    if (op.rows() != s.size() || op.cols() != s.size()) {
        throw DimensionMismatch("operator and state sizes differ");
    }
    if (s.is_ket()) return s.ket().dot(op * s.ket());
    return (s.density() * op).trace();
}

inline cplx expectation(const State& s, const Operator& op) {
    if (op.dims != s.dims()) {
        throw DimensionMismatch("operator on " + dims_to_string(op.dims) + " applied to state on " +
                                dims_to_string(s.dims()));
    }
    return expectation(s, op.matrix);
}

/// Symmetrized noise <|dO|^2> with dO = O - <O> and |O|^2 = (O O^dag + O^dag O)/2.
inline double symmetrized_moment(const State& s, const Operator& op) {
    const cplx mean = expectation(s, op);
    if (s.is_ket()) {
        const double second = 0.5 * ((op.matrix * s.ket()).squaredNorm() + (op.matrix.adjoint() * s.ket()).squaredNorm());
        return std::max(0.0, second - std::norm(mean));
    }
    const CMatrix sym = 0.5 * (op.matrix * op.matrix.adjoint() + op.matrix.adjoint() * op.matrix);
    return std::max(0.0, expectation(s, sym).real() - std::norm(mean));
}

/// Ordinary variance <O^2> - <O>^2 of a Hermitian observable.
inline double variance(const State& s, const Operator& op, double herm_tol = 1e-10) {
    if (hermiticity_residual(op) > herm_tol * std::max(1.0, max_abs(op.matrix))) {
        throw NotHermitian(hermiticity_residual(op));
    }
    const double mean = expectation(s, op).real();
    const double second =
        s.is_ket() ? (op.matrix * s.ket()).squaredNorm() : expectation(s, op.matrix * op.matrix).real();
    return std::max(0.0, second - mean * mean);
}

}  // namespace nlamp
