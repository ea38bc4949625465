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
#include <vector>

#include "nlamp/core.hpp"

namespace nlamp {

/// Magnitudes |u_j(m)| of the heterodyne rank factors for outcome modulus |beta|.
///
/// M_beta = (1/pi) D(beta) rho_th(nbar = sigma2) D(beta)^dag = U U^dag with
///   u_j(m) = sqrt(P q^j / j!) sqrt(m!) c^{m-j} / (m-j)!,   m >= j,
/// c = beta/(1+s), q = s/(1+s), P = e^{-|beta|^2/(1+s)} / (pi (1+s)).
/// The phase of u_j(m) is e^{i theta (m-j)}, theta = arg beta. Magnitudes are
/// started in log space and advanced by the ratio recurrence along m. Entries
/// below e^{-90} are zero and trailing columns whose largest entry is below
/// e^{-40} are dropped, so column j is always u_j. Matrix elements are those of the untruncated operator restricted
/// to levels < dim.
inline RMatrix heterodyne_factor_magnitudes(double abs_beta, double sigma2, int dim) {
    if (sigma2 < 0.0) throw Error("sigma2 must be >= 0");
    const double s = sigma2;
    const double abs_c = abs_beta / (1.0 + s);
    const double log_c = abs_c > 0.0 ? std::log(abs_c) : -INFINITY;
    const double log_q = s > 0.0 ? std::log(s / (1.0 + s)) : -INFINITY;
    const double log_pref = -abs_beta * abs_beta / (1.0 + s) - std::log(kPi * (1.0 + s));
    const int kmax = s > 0.0 ? dim : 1;

    std::vector<double> lf(static_cast<std::size_t>(dim) + 1), ln(static_cast<std::size_t>(dim) + 1, 0.0);
    for (int k = 0; k <= dim; ++k) {
        lf[static_cast<std::size_t>(k)] = std::lgamma(k + 1.0);
        if (k > 0) ln[static_cast<std::size_t>(k)] = std::log(static_cast<double>(k));
    }

    RMatrix out = RMatrix::Zero(dim, kmax);
    Eigen::Index kept = 0;  // one past the last column worth keeping
    for (int j = 0; j < kmax; ++j) {
        double lm = 0.5 * (log_pref + (j > 0 ? j * log_q : 0.0) - lf[static_cast<std::size_t>(j)]) +
                    0.5 * lf[static_cast<std::size_t>(j)];
        double best = -INFINITY;
        double val = 0.0;
        bool live = false;
        for (int m = j; m < dim; ++m) {
            const int e = m - j;
            if (m > j) {
                lm += 0.5 * ln[static_cast<std::size_t>(m)] - ln[static_cast<std::size_t>(e)] + log_c;
                if (live) val *= std::sqrt(static_cast<double>(m)) * abs_c / e;
            }
            if (!live && lm > -600.0) {
                val = std::exp(lm);
                live = true;
            }
            best = std::max(best, lm);
            if (lm > -90.0) out(m, j) = val;
        }
        if (best > -40.0) kept = j + 1;
    }
    return out.leftCols(kept);
}

/// Complex rank factors: M_beta = U U^dag.
inline CMatrix heterodyne_factors(cplx beta, double sigma2, int dim) {
    const RMatrix mag = heterodyne_factor_magnitudes(std::abs(beta), sigma2, dim);
    const double theta = std::arg(beta);
    CMatrix out(mag.rows(), mag.cols());
    for (Eigen::Index j = 0; j < mag.cols(); ++j) {
        for (Eigen::Index m = 0; m < mag.rows(); ++m) {
            out(m, j) = mag(m, j) == 0.0 ? cplx(0.0) : std::polar(mag(m, j), theta * static_cast<double>(m - j));
        }
    }
    return out;
}

/// Smeared heterodyne POVM element per unit d^2 beta; (1/pi)|beta><beta| when sigma2 = 0.
inline Operator heterodyne_element(cplx beta, double sigma2, const FockSpace& space) {
    if (std::norm(beta) > 0.5 * space.dim) {
        throw TruncationError("heterodyne outcome |beta|^2 = " + std::to_string(std::norm(beta)) + " exceeds dim/2");
    }
    const CMatrix u = heterodyne_factors(beta, sigma2, space.dim);
    return {space, u * u.adjoint()};
}

/// Default position grid for homodyne quadrature: |y| <= 10, step 0.005.
inline std::vector<double> default_homodyne_grid() { return uniform_grid(-10.0, 10.0, 0.005); }

/// Position-basis quadrature rule for the smeared homodyne element.
///
/// <m|M_x|n> = int K(x-y) h_m(y) h_n(y) dy with K(u) = e^{-u^2/sigma2}/sqrt(pi sigma2),
/// evaluated by the trapezoid rule on the given grid.
class HomodyneQuadrature {
   public:
    HomodyneQuadrature(int dim, std::vector<double> grid = default_homodyne_grid())
        : dim_(dim), grid_(std::move(grid)), table_(hermite_table(dim, grid_)) {
        if (grid_.size() < 2) throw Error("homodyne grid needs at least two points");
        weights_.assign(grid_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
            const double h = 0.5 * (grid_[k + 1] - grid_[k]);
            weights_[k] += h;
            weights_[k + 1] += h;
        }
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& weights() const { return weights_; }
    /// Column k holds h_0..h_{dim-1} at grid point k.
    const RMatrix& table() const { return table_; }

    /// Quadrature weights times the smearing kernel centred at x.
    std::vector<double> kernel_weights(double x, double sigma2) const {
        std::vector<double> w(grid_.size());
        const double norm = 1.0 / std::sqrt(kPi * sigma2);
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            const double u = x - grid_[k];
            w[k] = weights_[k] * norm * std::exp(-u * u / sigma2);
        }
        return w;
    }

    Operator element(double x, double sigma2) const {
        if (sigma2 < 0.0) throw Error("sigma2 must be >= 0");
        if (sigma2 == 0.0) {
            const RVector h = hermite_functions(dim_, x);
            return {FockSpace(dim_), (h * h.transpose()).cast<cplx>()};
        }
        const auto w = kernel_weights(x, sigma2);
        const Eigen::Map<const RVector> wv(w.data(), static_cast<Eigen::Index>(w.size()));
        const RMatrix m = table_ * wv.asDiagonal() * table_.transpose();
        return {FockSpace(dim_), m.cast<cplx>()};
    }

   private:
    int dim_;
    std::vector<double> grid_;
    RMatrix table_;
    std::vector<double> weights_;
};

/// Smeared homodyne POVM element per unit dx. At sigma2 = 0 returns the
/// position density |x><x| in the truncated basis.
inline Operator homodyne_element(double x, double sigma2, const FockSpace& space,
                                 const std::vector<double>& grid = default_homodyne_grid()) {
    return HomodyneQuadrature(space.dim, grid).element(x, sigma2);
}

}  // namespace nlamp
