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
#include <span>
#include <vector>

#include "nlamp/core/tensor.hpp"

namespace nlamp {

/// Hermite functions h_0(x)..h_{count-1}(x), h_0 = pi^{-1/4} e^{-x^2/2}.
///
/// Runs the three-term recurrence on h_n itself,
///   h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1},
/// carrying a separate log scale so that e^{-x^2/2} never underflows
/// before the polynomial growth catches up.
inline RVector hermite_functions(int count, double x) {
    RVector out = RVector::Zero(count);
    if (count <= 0) return out;
    double log_scale = -0.5 * x * x - 0.25 * std::log(kPi);
    double prev = 0.0, cur = 1.0;
    auto emit = [&](int n, double v) { out(n) = v == 0.0 ? 0.0 : v * std::exp(log_scale); };
    emit(0, cur);
    for (int n = 0; n + 1 < count; ++n) {
        const double next = std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > 1e150) {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * std::log(10.0);
        }
        emit(n + 1, cur);
    }
    return out;
}

/// Table H(n, k) = h_n(grid[k]).
inline RMatrix hermite_table(int count, std::span<const double> grid) {
    RMatrix t(count, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) t.col(static_cast<Eigen::Index>(k)) = hermite_functions(count, grid[k]);
    return t;
}

/// Position-space amplitudes <x|psi> = sum_n c_n h_n(x) of a single-mode ket.
/// For a density matrix the diagonal q(x) = <x|rho|x> is returned (real part).
inline std::vector<cplx> quadrature_amplitudes(const State& s, std::span<const double> grid) {
    if (s.dims().size() != 1) throw DimensionMismatch("quadrature_amplitudes needs a single-mode state");
    const int dim = s.dims()[0];
    const RMatrix table = hermite_table(dim, grid);
    std::vector<cplx> out(grid.size());
    if (s.is_ket()) {
        const CVector amp = table.transpose().cast<cplx>() * s.ket();
        for (std::size_t k = 0; k < grid.size(); ++k) out[k] = amp(static_cast<Eigen::Index>(k));
    } else {
        const CMatrix rho = s.density();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const CVector h = table.col(static_cast<Eigen::Index>(k)).cast<cplx>();
            out[k] = cplx(h.dot(rho * h).real(), 0.0);
        }
    }
    return out;
}

/// Marginal position density q(y) of one slot of a composite state.
inline RVector quadrature_density(const State& s, std::size_t slot, std::span<const double> grid) {
    const Dims& dims = s.dims();
    if (slot >= dims.size()) throw DimensionMismatch("quadrature_density: slot out of range");
    const int d = dims[slot];
    const RMatrix table = hermite_table(d, grid);
    RVector q = RVector::Zero(static_cast<Eigen::Index>(grid.size()));
    if (s.is_ket()) {
        std::size_t outer = 1, inner = 1;
        for (std::size_t k = 0; k < slot; ++k) outer *= static_cast<std::size_t>(dims[k]);
        for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= static_cast<std::size_t>(dims[k]);
        const auto in = static_cast<Eigen::Index>(inner);
        for (std::size_t o = 0; o < outer; ++o) {
            Eigen::Map<const CMatrix> block(s.ket().data() + static_cast<Eigen::Index>(o) * d * in, in, d);
            const CMatrix amp = block * table.cast<cplx>();
            q += amp.cwiseAbs2().colwise().sum().transpose();
        }
        return q;
    }
    // Mixed input: reduce to the slot, then evaluate h^T rho h.
    const State red = dims.size() == 1 ? s : partial_trace(s, {slot});
    const CMatrix rho = red.density();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const CVector h = table.col(static_cast<Eigen::Index>(k)).cast<cplx>();
        q(static_cast<Eigen::Index>(k)) = h.dot(rho * h).real();
    }
    return q;
}

/// Uniform grid lo, lo+step, ..., up to hi inclusive (within rounding).
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
    std::vector<double> g;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    g.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) g.push_back(lo + static_cast<double>(k) * step);
    return g;
}

}  // namespace nlamp
