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
#include <vector>

#include "nlamp/amplifiers/branches.hpp"
#include "nlamp/amplifiers/spec.hpp"
#include "nlamp/amplifiers/unitaries.hpp"
#include "nlamp/core.hpp"

namespace nlamp {

/// First and second moments of an amplifier's output.
///
/// Output mode by variant: meter b (two-mode, von Neumann), meters b and c
/// (three-mode: quadratures are x_b and x_c), mode a (linear, single-mode).
/// added_noise is the output noise minus the amplified signal noise. It is taken
/// in the x quadrature when f is Hermitian, in p_out for the single-mode
/// amplifier, summed over both meters for three-mode, and in the symmetrized
/// mode noise otherwise.
struct MomentReport {
    cplx mean_out{0.0, 0.0};
    double symmetrized_noise = 0.0;
    std::pair<double, double> quad_means{0.0, 0.0};
    std::pair<double, double> quad_noises{0.0, 0.0};
    double amplified_signal_noise = 0.0;
    double added_noise = 0.0;
    std::pair<double, double> added_quad_noises{0.0, 0.0};
};

namespace detail {

struct ModeStats {
    cplx mean_a{0.0, 0.0};
    double sym = 0.0;
    double mean_x = 0.0, var_x = 0.0, mean_p = 0.0, var_p = 0.0;
};

inline ModeStats mode_stats(const State& s, std::size_t slot) {
    const FockSpace sp(s.dims()[slot]);
    const auto [x, p] = quadrature_ops(sp);
    const auto ma = slot_moments(s, slot, annihilation_op(sp).matrix);
    const auto mx = slot_moments(s, slot, x.matrix);
    const auto mp = slot_moments(s, slot, p.matrix);
    return {ma.mean, ma.symmetrized, mx.mean.real(), mx.symmetrized, mp.mean.real(), mp.symmetrized};
}

inline bool hermitian_signal(const Operator& f) {
    return hermiticity_residual(f) < 1e-10 * std::max(1.0, max_abs(f.matrix));
}

}  // namespace detail

/// Signal-side moments that the analytic relations need.
struct SignalStats {
    cplx mean{0.0, 0.0};
    double sym = 0.0;
    double mean_r = 0.0, var_r = 0.0, mean_i = 0.0, var_i = 0.0;
};

inline SignalStats signal_stats(const State& input, const Operator& f) {
    const auto [fr, fi] = real_imag_parts(f);
    const Dims d = f.dims;
    const Operator r(d, fr), i(d, fi);
    return {expectation(input, f), symmetrized_moment(input, f), expectation(input, r).real(), variance(input, r),
            expectation(input, i).real(), variance(input, i)};
}

/// Output operators of the single-mode amplifier on a truncated space.
struct SingleModeOps {
    Operator signal;  // f(x)
    Operator a_out, x_out, p_out;
};

/// f(x) by functional calculus on the truncated position operator, and
/// a_out = i g f(x) + cosh r a + sinh r a^dag.
inline SingleModeOps single_mode_output_ops(const SignalFunction& f, double g, double r, const FockSpace& space) {
    const auto basis = quadrature_basis(space.dim);
    RVector vals(space.dim);
    for (int k = 0; k < space.dim; ++k) vals(k) = f(basis->nodes(k));
    const RMatrix fx = basis->vectors * vals.asDiagonal() * basis->vectors.transpose();
    const Operator signal(space, fx.cast<cplx>());
    const CMatrix a = annihilation_op(space).matrix;
    const CMatrix aout = kI * g * signal.matrix + std::cosh(r) * a + std::sinh(r) * CMatrix(a.adjoint());
    const double s = 1.0 / std::sqrt(2.0);
    return {signal, Operator(space, aout), Operator(space, s * (aout + aout.adjoint())),
            Operator(space, -kI * s * (aout - aout.adjoint()))};
}

/// Moments of the single-mode amplifier output, cross term included.
inline MomentReport single_mode_output_moments(const SignalFunction& f, double g, double r, const State& input) {
    if (input.dims().size() != 1) throw DimensionMismatch("single-mode amplifier input must be one mode");
    if (r < 0.0) throw Error("squeezing r must be >= 0");
    const auto ops = single_mode_output_ops(f, g, r, FockSpace(input.dims()[0]));
    MomentReport rep;
    rep.mean_out = expectation(input, ops.a_out);
    rep.quad_means = {expectation(input, ops.x_out).real(), expectation(input, ops.p_out).real()};
    rep.quad_noises = {variance(input, ops.x_out), variance(input, ops.p_out)};
    rep.symmetrized_noise = symmetrized_moment(input, ops.a_out);
    rep.amplified_signal_noise = 2.0 * g * g * variance(input, ops.signal);
    rep.added_noise = rep.quad_noises.second - rep.amplified_signal_noise;
    const auto [x, p] = quadrature_ops(FockSpace(input.dims()[0]));
    rep.added_quad_noises = {rep.quad_noises.first - std::exp(2.0 * r) * variance(input, x), rep.added_noise};
    return rep;
}

/// Analytic output moments from input-state moments only; no unitary is applied.
inline MomentReport predict_output_moments(const AmplifierSpec& spec, const State& input,
                                           const std::vector<State>& meters) {
    validate(spec);
    if (auto* sm = std::get_if<amp::SingleMode>(&spec)) return single_mode_output_moments(sm->f, sm->g, sm->r, input);
    if (static_cast<int>(meters.size()) != meter_count(spec)) throw DimensionMismatch("wrong number of meter states");
    const double g = gain(spec);
    MomentReport rep;
    const auto mb = detail::mode_stats(meters[0], 0);

    if (const auto* lin = std::get_if<amp::Linear>(&spec)) {
        const auto ma = detail::mode_stats(input, 0);
        const double k = std::sqrt(g * g - 1.0);
        rep.mean_out = g * ma.mean_a + k * std::conj(mb.mean_a);
        rep.amplified_signal_noise = g * g * ma.sym;
        rep.added_noise = (g * g - 1.0) * mb.sym;
        rep.symmetrized_noise = rep.amplified_signal_noise + rep.added_noise;
        rep.quad_means = {g * ma.mean_x + k * mb.mean_x, g * ma.mean_p - k * mb.mean_p};
        rep.quad_noises = {g * g * ma.var_x + (g * g - 1.0) * mb.var_x, g * g * ma.var_p + (g * g - 1.0) * mb.var_p};
        rep.added_quad_noises = {(g * g - 1.0) * mb.var_x, (g * g - 1.0) * mb.var_p};
        (void)lin;
        return rep;
    }

    const Operator& f = signal_operator(spec);
    if (input.dims() != f.dims) throw DimensionMismatch("input state does not match the signal operator");
    const auto fs = signal_stats(input, f);

    if (spec.index() == 3) {
        const auto mc = detail::mode_stats(meters[1], 0);
        rep.quad_means = {g * fs.mean_r + mb.mean_x, g * fs.mean_i + mc.mean_x};
        rep.quad_noises = {g * g * fs.var_r + mb.var_x, g * g * fs.var_i + mc.var_x};
        rep.mean_out = {rep.quad_means.first, rep.quad_means.second};
        rep.symmetrized_noise = rep.quad_noises.first + rep.quad_noises.second;
        rep.added_quad_noises = {mb.var_x, mc.var_x};
        rep.amplified_signal_noise = g * g * (fs.var_r + fs.var_i);
        rep.added_noise = mb.var_x + mc.var_x;
        return rep;
    }

    // b_out = g f + b for both single-meter variants; von Neumann leaves p_b alone.
    rep.mean_out = g * fs.mean + mb.mean_a;
    rep.symmetrized_noise = g * g * fs.sym + mb.sym;
    if (spec.index() == 1) {
        rep.quad_means = {g * fs.mean_r + mb.mean_x, g * fs.mean_i + mb.mean_p};
        rep.quad_noises = {g * g * fs.var_r + mb.var_x, g * g * fs.var_i + mb.var_p};
    } else {
        rep.quad_means = {g * fs.mean_r + mb.mean_x, mb.mean_p};
        rep.quad_noises = {g * g * fs.var_r + mb.var_x, mb.var_p};
    }
    rep.added_quad_noises = {mb.var_x, mb.var_p};
    if (detail::hermitian_signal(f)) {
        rep.amplified_signal_noise = g * g * fs.var_r;
        rep.added_noise = mb.var_x;
    } else {
        rep.amplified_signal_noise = g * g * fs.sym;
        rep.added_noise = mb.sym;
    }
    return rep;
}

struct SimulationOptions {
    bool cv_swap = false;
    double top_level_tol = 1e-6;
    std::size_t max_density_dim = 4096;
};

namespace detail {

/// Evolves one input ket through an operator-valued amplifier via its branches.
inline CVector evolve_branches(const MeterBranches& br, const CVector& psi) {
    const auto& dec = br.decomp;
    const CVector c = dec.eigenvectors.adjoint() * psi;
    const auto dm = static_cast<Eigen::Index>(total_dim(br.meter_dims));
    const auto da = dec.eigenvectors.rows();
    // out(a, m) = sum_i E(a, i) c_i M_i(m); stored as the column-major (dm x da) block.
    CMatrix acc = CMatrix::Zero(dm, da);
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        if (std::norm(c(i)) == 0.0) continue;
        if (!br.active[static_cast<std::size_t>(i)]) {
            if (std::norm(c(i)) > 1e-24) throw Error("input occupies an inactive eigencomponent");
            continue;
        }
        acc.noalias() += br.joint(i) * (c(i) * dec.eigenvectors.col(i).transpose());
    }
    return Eigen::Map<const CVector>(acc.data(), acc.size());
}

}  // namespace detail

/// Applies the amplifier unitary to input (x) meters and returns the composite state.
///
/// Slot order is (a, b[, c]); with cv_swap the a and b slots are exchanged so the
/// amplified signal sits in slot 0. Mixed inputs are evolved eigenvector by
/// eigenvector.
inline State simulate_output_state(const AmplifierSpec& spec, const State& input, const std::vector<State>& meters,
                                   const SimulationOptions& opts = {}) {
    validate(spec);
    if (spec.index() == 4) {
        throw Error("single-mode amplifier has no unitary here; use single_mode_output_moments");
    }
    if (static_cast<int>(meters.size()) != meter_count(spec)) throw DimensionMismatch("wrong number of meter states");
    if (input.dims().size() != 1) throw DimensionMismatch("input must be a single mode");

    // Pure components of the input.
    std::vector<std::pair<double, CVector>> parts;
    if (input.is_ket()) {
        parts.emplace_back(1.0, input.ket());
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(input.density());
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            if (es.eigenvalues()(k) > 1e-15) parts.emplace_back(es.eigenvalues()(k), es.eigenvectors().col(k));
        }
    }

    Dims dims{input.dims()[0]};
    for (const auto& m : meters) dims.push_back(m.dims()[0]);
    const std::size_t n = total_dim(dims);
    if (!input.is_ket() && n > opts.max_density_dim) {
        throw Error("composite density of dim " + std::to_string(n) + " is too large; use a ket input");
    }

    std::vector<CVector> outs;
    if (spec.index() == 0) {
        const double g = std::get<amp::Linear>(spec).g;
        const CVector& m = detail::meter_ket(meters[0]);
        for (const auto& [w, psi] : parts) outs.push_back(linear_amp_apply(g, dims, kron(psi, m)));
    } else {
        const auto dec = normal_decompose(signal_operator(spec));
        std::vector<char> active(static_cast<std::size_t>(dec.size()), 0);
        for (const auto& [w, psi] : parts) {
            const CVector c = dec.eigenvectors.adjoint() * psi;
            for (Eigen::Index i = 0; i < c.size(); ++i) {
                if (std::norm(c(i)) > 1e-24) active[static_cast<std::size_t>(i)] = 1;
            }
        }
        const auto br = meter_branches(spec, meters, active);
        for (const auto& [w, psi] : parts) outs.push_back(detail::evolve_branches(br, psi));
    }

    Operator swap;
    if (opts.cv_swap) {
        if (spec.index() == 3) throw Error("CV SWAP is defined for the two-mode layouts only");
        swap = cv_swap(dims, 0, 1);
        for (auto& v : outs) v = swap.matrix * v;
    }

    State out = [&] {
        if (input.is_ket()) return State::from_ket(dims, outs.front(), 1e-8);
        CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < parts.size(); ++k) rho.noalias() += parts[k].first * outs[k] * outs[k].adjoint();
        return State::from_density(dims, rho, 1e-8);
    }();

    for (std::size_t slot = 0; slot < dims.size(); ++slot) {
        if (slot == 0 && spec.index() != 0 && !opts.cv_swap) continue;  // signal mode is untouched
        const double top = top_level_occupancy(out, slot);
        if (top > opts.top_level_tol) {
            throw TruncationError("slot " + std::to_string(slot) + " top-level occupancy " + std::to_string(top) +
                                  " after evolution");
        }
    }
    return out;
}

/// Output moments read off a simulated composite state.
///
/// The amplified-signal term is taken from input so added_noise is comparable
/// with predict_output_moments.
inline MomentReport measured_output_moments(const AmplifierSpec& spec, const State& out, const State& input,
                                            bool swapped = false) {
    validate(spec);
    const double g = gain(spec);
    MomentReport rep;
    const std::size_t out_slot = spec.index() == 0 ? (swapped ? 1 : 0) : (swapped ? 0 : 1);
    const auto ob = detail::mode_stats(out, out_slot);

    if (spec.index() == 3) {
        const auto oc = detail::mode_stats(out, 2);
        const auto fs = signal_stats(input, signal_operator(spec));
        rep.quad_means = {ob.mean_x, oc.mean_x};
        rep.quad_noises = {ob.var_x, oc.var_x};
        rep.mean_out = {ob.mean_x, oc.mean_x};
        rep.symmetrized_noise = ob.var_x + oc.var_x;
        rep.added_quad_noises = {ob.var_x - g * g * fs.var_r, oc.var_x - g * g * fs.var_i};
        rep.amplified_signal_noise = g * g * (fs.var_r + fs.var_i);
        rep.added_noise = rep.symmetrized_noise - rep.amplified_signal_noise;
        return rep;
    }

    rep.mean_out = ob.mean_a;
    rep.symmetrized_noise = ob.sym;
    rep.quad_means = {ob.mean_x, ob.mean_p};
    rep.quad_noises = {ob.var_x, ob.var_p};
    if (spec.index() == 0) {
        const auto ma = detail::mode_stats(input, 0);
        rep.amplified_signal_noise = g * g * ma.sym;
        rep.added_noise = ob.sym - rep.amplified_signal_noise;
        rep.added_quad_noises = {ob.var_x - g * g * ma.var_x, ob.var_p - g * g * ma.var_p};
        return rep;
    }
    const Operator& f = signal_operator(spec);
    const auto fs = signal_stats(input, f);
    if (spec.index() == 1) {
        rep.added_quad_noises = {ob.var_x - g * g * fs.var_r, ob.var_p - g * g * fs.var_i};
    } else {
        rep.added_quad_noises = {ob.var_x - g * g * fs.var_r, ob.var_p};
    }
    if (detail::hermitian_signal(f)) {
        rep.amplified_signal_noise = g * g * fs.var_r;
        rep.added_noise = ob.var_x - rep.amplified_signal_noise;
    } else {
        rep.amplified_signal_noise = g * g * fs.sym;
        rep.added_noise = ob.sym - rep.amplified_signal_noise;
    }
    return rep;
}

/// Meter states sized automatically for the given input.
inline std::vector<State> auto_sized_meters(const AmplifierSpec& spec, const State& input,
                                            const std::vector<StateDescriptor>& preps) {
    validate(spec);
    if (static_cast<int>(preps.size()) != meter_count(spec)) throw DimensionMismatch("wrong number of meter preparations");
    double reach = 0.0;
    if (has_signal_operator(spec)) {
        reach = occupied_eigen_reach(normal_decompose(signal_operator(spec)), input);
    }
    std::vector<State> out;
    for (const auto& prep : preps) {
        double squeeze = 0.0;
        if (const auto* s = std::get_if<state_kind::SqueezedVacuum>(&prep)) squeeze = s->r;
        if (const auto* s = std::get_if<state_kind::GaussianMeter>(&prep)) squeeze = -std::log(s->epsilon);
        const int dim = auto_meter_dim(gain(spec), reach, squeeze);
        out.push_back(make_state(FockSpace(dim), prep));
    }
    return out;
}

}  // namespace nlamp
