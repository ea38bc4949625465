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

#include <vector>

#include "nlamp/amplifiers/spec.hpp"
#include "nlamp/core.hpp"

namespace nlamp {

/// Meter states conditioned on each eigencomponent of the signal operator.
///
/// For the operator-valued amplifiers the unitary is block diagonal in the
/// eigenbasis {e_i} of f:  U = sum_i |e_i><e_i| (x) V_i,  with V_i acting on the
/// meters only. branch[m][i] is V_i applied to meter m's initial ket.
struct MeterBranches {
    SpectralDecomposition decomp;
    Dims meter_dims;
    std::vector<std::vector<CVector>> branch;
    std::vector<char> active;

    /// Meter-space ket for component i (Kronecker product over meters).
    CVector joint(Eigen::Index i) const {
        const auto k = static_cast<std::size_t>(i);
        CVector v = branch[0][k];
        for (std::size_t m = 1; m < branch.size(); ++m) v = kron(v, branch[m][k]);
        return v;
    }
};

namespace detail {
inline const CVector& meter_ket(const State& s) {
    if (!s.is_ket() || s.dims().size() != 1) throw Error("meter states must be pure single-mode kets");
    return s.ket();
}
}  // namespace detail

/// Builds the conditional meter states. Components with active[i] == 0 are
/// left empty, which lets callers skip components the input never occupies.
inline MeterBranches meter_branches(const AmplifierSpec& spec, const std::vector<State>& meters,
                                    std::vector<char> active = {}) {
    validate(spec);
    if (!has_signal_operator(spec)) throw Error(variant_name(spec) + " amplifier has no meter branches");
    if (static_cast<int>(meters.size()) != meter_count(spec)) {
        throw DimensionMismatch(variant_name(spec) + " amplifier needs " + std::to_string(meter_count(spec)) +
                                " meter state(s)");
    }
    const double g = gain(spec);
    MeterBranches out;
    out.decomp = normal_decompose(signal_operator(spec));
    const auto n = out.decomp.size();
    out.active = active.empty() ? std::vector<char>(static_cast<std::size_t>(n), 1) : std::move(active);
    if (static_cast<Eigen::Index>(out.active.size()) != n) throw DimensionMismatch("active mask size");
    for (const auto& m : meters) out.meter_dims.push_back(m.dims()[0]);
    out.branch.assign(meters.size(), std::vector<CVector>(static_cast<std::size_t>(n)));

    const double root2 = std::sqrt(2.0);
    if (spec.index() == 1) {
        const CVector& m0 = detail::meter_ket(meters[0]);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out.active[static_cast<std::size_t>(i)]) out.branch[0][static_cast<std::size_t>(i)] = displace(m0, g * out.decomp.eigenvalues(i));
        }
    } else if (spec.index() == 2) {
        const ShiftPropagator prop(quadrature_basis(out.meter_dims[0]), detail::meter_ket(meters[0]));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out.active[static_cast<std::size_t>(i)]) {
                out.branch[0][static_cast<std::size_t>(i)] = prop.shifted(root2 * g * out.decomp.eigenvalues(i).real());
            }
        }
    } else {
        const ShiftPropagator pb(quadrature_basis(out.meter_dims[0]), detail::meter_ket(meters[0]));
        const ShiftPropagator pc(quadrature_basis(out.meter_dims[1]), detail::meter_ket(meters[1]));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!out.active[static_cast<std::size_t>(i)]) continue;
            const cplx e = out.decomp.eigenvalues(i);
            out.branch[0][static_cast<std::size_t>(i)] = pb.shifted(root2 * g * e.real());
            out.branch[1][static_cast<std::size_t>(i)] = pc.shifted(root2 * g * e.imag());
        }
    }
    return out;
}

}  // namespace nlamp
