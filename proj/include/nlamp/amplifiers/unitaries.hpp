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
#include <cmath>
#include <vector>

#include "nlamp/amplifiers/spec.hpp"
#include "nlamp/core.hpp"

namespace nlamp {

namespace detail {

inline void require_single_mode(const Operator& f) {
    if (f.dims.size() != 1) throw DimensionMismatch("signal operator must act on one mode");
}

inline void require_normal(const Operator& f) {
    require_single_mode(f);
    const double c = normality_residual(f);
    if (!(c < default_normality_tol(f))) throw NotNormal(c);
}

/// exp(t X) for nilpotent X by its finite power series.
inline CMatrix nilpotent_exp(const CMatrix& x, int max_power) {
    CMatrix term = CMatrix::Identity(x.rows(), x.cols());
    CMatrix sum = term;
    for (int k = 1; k <= max_power; ++k) {
        term = (x * term) / static_cast<double>(k);
        if (max_abs(term) == 0.0) break;
        sum += term;
    }
    return sum;
}

/// exp(-t A) for Hermitian A.
inline CMatrix hermitian_decay(const CMatrix& a, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    const RVector w = (-t * es.eigenvalues().array()).exp().matrix();
    return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// True when g * max|eigenvalue| exceeds half the meter's sqrt(dim): the meter
/// is likely to be pushed against the cutoff.
inline bool meter_overflow_warning(const Operator& f, double g, int dim_b) {
    const double reach = normal_decompose(f).max_abs_eigenvalue() * g;
    return reach > 0.5 * std::sqrt(static_cast<double>(dim_b));
}

/// Hermitian H with exp(-iH) = exp[g (f b^dag - f^dag b)].
inline Operator two_mode_generator(const Operator& f, double g, int dim_b) {
    const FockSpace sb(dim_b);
    const CMatrix b = annihilation_op(sb).matrix;
    const CMatrix m = kI * g * (kron(f.matrix, CMatrix(b.adjoint())) - kron(CMatrix(f.matrix.adjoint()), b));
    return {Dims{f.dims[0], dim_b}, m};
}

/// exp[g (f b^dag - f^dag b)] on H_a (x) H_b, exponentiated directly.
inline Operator two_mode_unitary(const Operator& f, double g, int dim_b) {
    detail::require_normal(f);
    if (g < 0.0) throw GainOutOfRange("gain must be >= 0");
    return unitary_from_generator(two_mode_generator(f, g, dim_b), 1.0);
}

/// Ordered product exp(g f b^dag) exp(-g f^dag b) exp(-g^2 f^dag f / 2).
///
/// On the truncated space the first two factors are nilpotent series, so every
/// matrix element equals the untruncated one.
inline Operator two_mode_factored_unitary(const Operator& f, double g, int dim_b) {
    detail::require_normal(f);
    const FockSpace sb(dim_b);
    const CMatrix b = annihilation_op(sb).matrix;
    const Dims dims{f.dims[0], dim_b};
    const CMatrix raise = kron(CMatrix(g * f.matrix), CMatrix(b.adjoint()));
    const CMatrix lower = kron(CMatrix(-g * f.matrix.adjoint()), b);
    const CMatrix decay = detail::hermitian_decay(f.matrix.adjoint() * f.matrix, 0.5 * g * g);
    const CMatrix last = kron(decay, CMatrix(CMatrix::Identity(dim_b, dim_b)));
    return {dims, detail::nilpotent_exp(raise, dim_b) * detail::nilpotent_exp(lower, dim_b) * last};
}

/// Composite indices (i, k) of the f-eigenbasis (x) meter Fock basis whose
/// meter state |k>, displaced by shifts(i), keeps all but tail_tol of its norm
/// below the meter guard level. Truncated identities for displaced meters are
/// only expected to hold on these indices.
inline std::vector<std::size_t> reach_guarded_indices(const CVector& shifts, int dim_b, double tail_tol = 1e-13) {
    const int guard = guarded_levels(dim_b);
    std::vector<std::size_t> keep;
    for (Eigen::Index i = 0; i < shifts.size(); ++i) {
        const cplx alpha = shifts(i);
        const double reach = std::abs(alpha) + std::sqrt(static_cast<double>(dim_b)) + 8.0;
        const int big = dim_b + static_cast<int>(std::ceil(reach * reach));
        for (int k = 0; k < guard; ++k) {
            CVector v = CVector::Zero(big);
            v(k) = 1.0;
            if (displace(v, alpha).tail(big - guard).squaredNorm() <= tail_tol) {
                keep.push_back(static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_b) + static_cast<std::size_t>(k));
            }
        }
    }
    return keep;
}

/// max |m(i, j)| over i, j in idx.
inline double max_abs_on(const CMatrix& m, const std::vector<std::size_t>& idx) {
    double worst = 0.0;
    for (auto j : idx) {
        for (auto i : idx) worst = std::max(worst, std::abs(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    return worst;
}

struct ZassenhausCheck {
    double max_deviation = 0.0;
    int columns_compared = 0;
    int columns_total = 0;
};

/// Direct vs factored two-mode unitary, compared in the eigenbasis of f on the
/// columns returned by reach_guarded_indices (all rows).
inline ZassenhausCheck zassenhaus_check(const Operator& f, double g, int dim_b, double tail_tol = 1e-13) {
    const auto dec = normal_decompose(f);
    const CMatrix basis = kron(dec.eigenvectors, CMatrix(CMatrix::Identity(dim_b, dim_b)));
    const CMatrix diff =
        basis.adjoint() * (two_mode_unitary(f, g, dim_b).matrix - two_mode_factored_unitary(f, g, dim_b).matrix) * basis;
    const auto cols = reach_guarded_indices(g * dec.eigenvalues, dim_b, tail_tol);
    ZassenhausCheck out;
    out.columns_total = static_cast<int>(diff.cols());
    out.columns_compared = static_cast<int>(cols.size());
    for (auto c : cols) {
        out.max_deviation = std::max(out.max_deviation, diff.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff());
    }
    return out;
}

/// exp(-i sqrt(2) g f (x) p_b).
inline Operator von_neumann_unitary(const Operator& f, double g, int dim_b) {
    detail::require_single_mode(f);
    const double h = hermiticity_residual(f);
    if (!(h < 1e-10 * std::max(1.0, max_abs(f.matrix)))) throw NotHermitian(h);
    const auto [x, p] = quadrature_ops(FockSpace(dim_b));
    const Operator gen({f.dims[0], dim_b}, std::sqrt(2.0) * g * kron(f.matrix, p.matrix));
    return unitary_from_generator(gen, 1.0);
}

/// (f_R, f_I) with f = (f_R + i f_I)/sqrt(2).
inline std::pair<CMatrix, CMatrix> real_imag_parts(const Operator& f) {
    const double r = 1.0 / std::sqrt(2.0);
    return {r * (f.matrix + f.matrix.adjoint()), -kI * r * (f.matrix - f.matrix.adjoint())};
}

/// exp[-i g (f_R p_b + f_I p_c)] on H_a (x) H_b (x) H_c, exponentiated directly.
inline Operator three_mode_unitary(const Operator& f, double g, int dim_b, int dim_c) {
    detail::require_normal(f);
    const auto [fr, fi] = real_imag_parts(f);
    const CMatrix pb = quadrature_ops(FockSpace(dim_b)).second.matrix;
    const CMatrix pc = quadrature_ops(FockSpace(dim_c)).second.matrix;
    const CMatrix ib = CMatrix::Identity(dim_b, dim_b), ic = CMatrix::Identity(dim_c, dim_c);
    const CMatrix h = g * (kron(kron(fr, pb), ic) + kron(kron(fi, ib), pc));
    return unitary_from_generator(Operator({f.dims[0], dim_b, dim_c}, h), 1.0);
}

/// exp(-i g f_R p_b) exp(-i g f_I p_c), each factor exponentiated on its own.
inline Operator three_mode_factored_unitary(const Operator& f, double g, int dim_b, int dim_c) {
    detail::require_normal(f);
    const auto [fr, fi] = real_imag_parts(f);
    const Dims dims{f.dims[0], dim_b, dim_c};
    const CMatrix pb = quadrature_ops(FockSpace(dim_b)).second.matrix;
    const CMatrix pc = quadrature_ops(FockSpace(dim_c)).second.matrix;
    const CMatrix ib = CMatrix::Identity(dim_b, dim_b), ic = CMatrix::Identity(dim_c, dim_c);
    const auto ub = unitary_from_generator(Operator(dims, g * kron(kron(fr, pb), ic)), 1.0);
    const auto uc = unitary_from_generator(Operator(dims, g * kron(kron(fi, ib), pc)), 1.0);
    return ub * uc;
}

/// exp(-i s p) on a truncated mode, from the position eigenbasis.
inline CMatrix shift_unitary(int dim, double s) {
    CMatrix u = quadrature_basis(dim)->exp_x(s);
    // p = S x S^dag with S = diag(i^n).
    for (int m = 0; m < dim; ++m) {
        for (int n = 0; n < dim; ++n) u(m, n) *= ShiftPropagator::ipow(m - n + 4 * dim);
    }
    return u;
}

/// exp(alpha b^dag - alpha* b) on a truncated mode.
inline CMatrix displacement_unitary(int dim, cplx alpha) {
    const CMatrix rot = rotation_op(FockSpace(dim), std::arg(alpha)).matrix;
    return rot * shift_unitary(dim, std::sqrt(2.0) * std::abs(alpha)) * rot.adjoint();
}

/// Per-eigencomponent meter unitaries of the three-mode amplifier:
/// component k carries exp(-i g f_R^k p_b) (x) exp(-i g f_I^k p_c).
struct ThreeModeBlocks {
    SpectralDecomposition decomp;
    std::vector<CMatrix> vb, vc;
};

inline ThreeModeBlocks three_mode_blocks(const Operator& f, double g, int dim_b, int dim_c) {
    detail::require_normal(f);
    ThreeModeBlocks out{normal_decompose(f), {}, {}};
    const double root2 = std::sqrt(2.0);
    for (Eigen::Index k = 0; k < out.decomp.size(); ++k) {
        const cplx e = out.decomp.eigenvalues(k);
        out.vb.push_back(shift_unitary(dim_b, g * root2 * e.real()));
        out.vc.push_back(shift_unitary(dim_c, g * root2 * e.imag()));
    }
    return out;
}

/// The three-mode unitary assembled from its blocks: sum_k |e_k><e_k| (x) V_b^k (x) V_c^k.
inline Operator three_mode_block_unitary(const Operator& f, double g, int dim_b, int dim_c) {
    const auto blocks = three_mode_blocks(f, g, dim_b, dim_c);
    const auto& dec = blocks.decomp;
    const Dims dims{f.dims[0], dim_b, dim_c};
    const auto n = static_cast<Eigen::Index>(total_dim(dims));
    CMatrix u = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < dec.size(); ++k) {
        u += kron(dec.projector(k), kron(blocks.vb[static_cast<std::size_t>(k)], blocks.vc[static_cast<std::size_t>(k)]));
    }
    return {dims, u};
}

/// Hermitian H with exp(-iH) = exp[r (a^dag b^dag - a b)], r = arccosh(g).
inline Operator linear_amp_generator(double g, const Dims& dims) {
    const double r = std::acosh(g);
    const CMatrix a = annihilation_op(FockSpace(dims.at(0))).matrix;
    const CMatrix b = annihilation_op(FockSpace(dims.at(1))).matrix;
    const CMatrix ab = kron(a, b);
    return {dims, kI * r * (CMatrix(ab.adjoint()) - ab)};
}

/// One fixed-difference ladder |a0+k, b0+k> of the linear amplifier and its unitary.
struct LinearAmpBlock {
    int a0 = 0;
    int b0 = 0;
    CMatrix u;
};

/// exp[r (a^dag b^dag - a b)] split into its n_a - n_b ladders.
inline std::vector<LinearAmpBlock> linear_amp_blocks(double g, const Dims& dims) {
    if (g < 1.0) throw GainOutOfRange("linear amplifier needs g >= 1, got " + std::to_string(g));
    if (dims.size() != 2) throw DimensionMismatch("linear amplifier acts on two modes");
    const int da = dims[0], db = dims[1];
    const double r = std::acosh(g);
    std::vector<LinearAmpBlock> blocks;
    for (int diff = -(db - 1); diff <= da - 1; ++diff) {
        const int a0 = std::max(diff, 0), b0 = std::max(-diff, 0);
        const int len = std::min(da - a0, db - b0);
        CMatrix h = CMatrix::Zero(len, len);
        for (int k = 0; k + 1 < len; ++k) {
            const double amp = r * std::sqrt(static_cast<double>(a0 + k + 1) * (b0 + k + 1));
            h(k + 1, k) = kI * amp;
            h(k, k + 1) = -kI * amp;
        }
        blocks.push_back({a0, b0, len == 1 ? CMatrix::Identity(1, 1) : unitary_from_generator(Operator(Dims{len}, h), 1.0).matrix});
    }
    return blocks;
}

/// Applies exp[r (a^dag b^dag - a b)] to a two-mode ket.
inline CVector linear_amp_apply(double g, const Dims& dims, const CVector& ket) {
    const auto blocks = linear_amp_blocks(g, dims);
    if (ket.size() != static_cast<Eigen::Index>(total_dim(dims))) throw DimensionMismatch("ket does not match dims");
    const int db = dims[1];
    CVector out(ket.size());
    for (const auto& blk : blocks) {
        const auto len = blk.u.rows();
        CVector in(len);
        for (Eigen::Index k = 0; k < len; ++k) in(k) = ket((blk.a0 + k) * db + blk.b0 + k);
        const CVector moved = blk.u * in;
        for (Eigen::Index k = 0; k < len; ++k) out((blk.a0 + k) * db + blk.b0 + k) = moved(k);
    }
    return out;
}

/// exp[r (a^dag b^dag - a b)] with g = cosh r, so U^dag a U = g a + sqrt(g^2-1) b^dag.
inline Operator linear_amp_unitary(double g, const Dims& dims) {
    const auto blocks = linear_amp_blocks(g, dims);
    const auto n = static_cast<Eigen::Index>(total_dim(dims));
    const int db = dims[1];
    CMatrix u = CMatrix::Zero(n, n);
    for (const auto& blk : blocks) {
        for (Eigen::Index i = 0; i < blk.u.rows(); ++i) {
            for (Eigen::Index j = 0; j < blk.u.cols(); ++j) {
                u((blk.a0 + i) * db + blk.b0 + i, (blk.a0 + j) * db + blk.b0 + j) = blk.u(i, j);
            }
        }
    }
    return {dims, u};
}

}  // namespace nlamp
