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
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Eigenvalues>

#include "nlamp/core/operators.hpp"

namespace nlamp {

enum class StateKind { ket, density };

/// Normalized pure or mixed state on a (composite) truncated Fock space.
///
/// Immutable after construction. Kets carry unit norm and density matrices
/// unit trace, Hermitian, and positive semidefinite up to the construction
/// tolerance.
class State {
   public:
    static constexpr double kDefaultTol = 1e-12;

    static State from_ket(Dims dims, CVector ket, double tol = kDefaultTol) {
        State s;
        s.kind_ = StateKind::ket;
        s.dims_ = std::move(dims);
        if (ket.size() != static_cast<Eigen::Index>(total_dim(s.dims_))) {
            throw DimensionMismatch("ket length does not match space " + dims_to_string(s.dims_));
        }
        if (!ket.allFinite()) throw Error("ket has non-finite entries");
        const double norm = ket.norm();
        if (std::abs(norm - 1.0) > tol) {
            throw Error("ket is not normalized (norm " + std::to_string(norm) + ")");
        }
        s.ket_ = std::move(ket);
        return s;
    }

    static State from_density(Dims dims, CMatrix rho, double tol = kDefaultTol) {
        State s;
        s.kind_ = StateKind::density;
        s.dims_ = std::move(dims);
        const auto n = static_cast<Eigen::Index>(total_dim(s.dims_));
        if (rho.rows() != n || rho.cols() != n) {
            throw DimensionMismatch("density matrix does not match space " + dims_to_string(s.dims_));
        }
        if (!rho.allFinite()) throw Error("density matrix has non-finite entries");
        const double trace = rho.trace().real();
        if (std::abs(trace - 1.0) > tol) throw Error("density matrix trace is " + std::to_string(trace));
        const double herm = hermiticity_residual(rho);
        if (herm > tol) throw Error("density matrix is not Hermitian (residual " + std::to_string(herm) + ")");
        if (n <= 512) {
            const double min_eig = Eigen::SelfAdjointEigenSolver<CMatrix>(rho, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
            if (min_eig < -std::max(tol, 1e-10)) {
                throw Error("density matrix has negative eigenvalue " + std::to_string(min_eig));
            }
        }
        s.rho_ = std::move(rho);
        return s;
    }

    StateKind kind() const { return kind_; }
    bool is_ket() const { return kind_ == StateKind::ket; }
    const Dims& dims() const { return dims_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(total_dim(dims_)); }

    /// Ket data; throws for density states.
    const CVector& ket() const {
        if (kind_ != StateKind::ket) throw Error("state is not a ket");
        return ket_;
    }

    /// Density matrix, formed on demand for kets.
    CMatrix density() const { return kind_ == StateKind::ket ? CMatrix(ket_ * ket_.adjoint()) : rho_; }

    /// Factor applied to raw truncated coefficients to restore unit norm (1 if none).
    double renormalization() const { return renormalization_; }
    /// Probability mass that fell beyond the cutoff before renormalization.
    double tail_mass() const { return tail_mass_; }
    /// Set when the top three Fock levels carry more than 1e-8 of occupancy.
    bool truncation_warning() const { return truncation_warning_; }

    State with_truncation_info(double renorm, double tail, bool warn) const {
        State s = *this;
        s.renormalization_ = renorm;
        s.tail_mass_ = tail;
        s.truncation_warning_ = warn;
        return s;
    }

   private:
    State() = default;
    StateKind kind_ = StateKind::ket;
    Dims dims_;
    CVector ket_;
    CMatrix rho_;
    double renormalization_ = 1.0;
    double tail_mass_ = 0.0;
    bool truncation_warning_ = false;
};

namespace state_kind {
struct Fock {
    int n = 0;
};
struct Coherent {
    cplx alpha{0.0, 0.0};
};
/// Vacuum squeezed by exp[(r/2)(b^2 e^{-2i phi} - b^{dag 2} e^{2i phi})]; Var[x] = e^{-2r}/2 at phi = 0.
struct SqueezedVacuum {
    double r = 0.0;
    double phi = 0.0;
};
/// Real Gaussian wavefunction exp(-x^2/2 eps^2)/(pi eps^2)^{1/4}, so Var[x] = eps^2/2.
struct GaussianMeter {
    double epsilon = 1.0;
};
}  // namespace state_kind

using StateDescriptor =
    std::variant<state_kind::Fock, state_kind::Coherent, state_kind::SqueezedVacuum, state_kind::GaussianMeter>;

inline constexpr double kDefaultTailTolerance = 1e-6;

namespace detail {

inline State finish_truncated(const FockSpace& space, CVector coeffs, double tail_tol, const std::string& what) {
    const double mass = coeffs.squaredNorm();
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail > tail_tol) {
        throw TruncationError(what + " loses " + std::to_string(tail) + " probability beyond dim " +
                              std::to_string(space.dim));
    }
    double top = 0.0;
    for (int k = std::max(0, space.dim - 3); k < space.dim; ++k) top += std::norm(coeffs(k));
    const double renorm = 1.0 / std::sqrt(mass);
    coeffs *= renorm;
    return State::from_ket({space.dim}, std::move(coeffs), 1e-12).with_truncation_info(renorm, tail, top > 1e-8);
}

}  // namespace detail

inline State fock_state(const FockSpace& space, int n) {
    if (n < 0 || n >= space.dim) {
        throw TruncationError("Fock level " + std::to_string(n) + " outside dim " + std::to_string(space.dim));
    }
    CVector v = CVector::Zero(space.dim);
    v(n) = 1.0;
    return State::from_ket({space.dim}, std::move(v));
}

inline State vacuum_state(const FockSpace& space) { return fock_state(space, 0); }

/// Coherent state from exact coefficients e^{-|a|^2/2} a^n / sqrt(n!), renormalized.
inline State coherent_state(const FockSpace& space, cplx alpha, double tail_tol = kDefaultTailTolerance) {
    CVector c(space.dim);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < space.dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return detail::finish_truncated(space, std::move(c), tail_tol, "coherent state");
}

inline State squeezed_vacuum_state(const FockSpace& space, double r, double phi = 0.0,
                                   double tail_tol = kDefaultTailTolerance) {
    CVector c = CVector::Zero(space.dim);
    c(0) = 1.0 / std::sqrt(std::cosh(r));
    const cplx ratio = -std::polar(1.0, 2.0 * phi) * std::tanh(r);
    for (int m = 2; m < space.dim; m += 2) {
        c(m) = c(m - 2) * ratio * std::sqrt(static_cast<double>(m - 1) / m);
    }
    return detail::finish_truncated(space, std::move(c), tail_tol, "squeezed vacuum");
}

inline State gaussian_meter_state(const FockSpace& space, double epsilon, double tail_tol = kDefaultTailTolerance) {
    if (!(epsilon > 0.0)) throw Error("gaussian meter width must be positive");
    return squeezed_vacuum_state(space, -std::log(epsilon), 0.0, tail_tol);
}

inline State make_state(const FockSpace& space, const StateDescriptor& desc,
                        double tail_tol = kDefaultTailTolerance) {
    return std::visit(
        [&](const auto& d) -> State {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, state_kind::Fock>) {
                return fock_state(space, d.n);
            } else if constexpr (std::is_same_v<T, state_kind::Coherent>) {
                return coherent_state(space, d.alpha, tail_tol);
            } else if constexpr (std::is_same_v<T, state_kind::SqueezedVacuum>) {
                if (d.r < 0.0) throw Error("squeezing parameter must be >= 0");
                return squeezed_vacuum_state(space, d.r, d.phi, tail_tol);
            } else {
                return gaussian_meter_state(space, d.epsilon, tail_tol);
            }
        },
        desc);
}

/// |<a|b>|^2 for kets, Tr[rho sigma] when either is mixed.
inline double fidelity(const State& a, const State& b) {
    if (a.dims() != b.dims()) throw DimensionMismatch("fidelity between different spaces");
    if (a.is_ket() && b.is_ket()) return std::norm(a.ket().dot(b.ket()));
    return (a.density() * b.density()).trace().real();
}

}  // namespace nlamp
