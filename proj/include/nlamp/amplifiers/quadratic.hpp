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

#include "nlamp/core.hpp"

namespace nlamp {

struct QuadraticSignal {
    Operator op;
    bool is_normal = false;
};

/// alpha a^2 + beta a^dag a + gamma a^dag^2 + delta.
///
/// Normality is decided from the coefficients alone: |alpha| = |gamma| and
/// alpha beta* = beta gamma*. delta never matters.
inline QuadraticSignal quadratic_signal_op(const FockSpace& space, cplx alpha, cplx beta, cplx gamma, cplx delta,
                                           double tol = 1e-12) {
    const CMatrix a = annihilation_op(space).matrix;
    const CMatrix ad = a.adjoint();
    const auto n = space.dim;
    CMatrix m = alpha * a * a + beta * ad * a + gamma * ad * ad + delta * CMatrix::Identity(n, n);
    const bool normal = std::abs(std::norm(alpha) - std::norm(gamma)) < tol &&
                        std::abs(alpha * std::conj(beta) - beta * std::conj(gamma)) < tol;
    return {Operator(space, std::move(m)), normal};
}

}  // namespace nlamp
