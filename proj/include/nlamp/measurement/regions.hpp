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

#include <boost/math/special_functions/owens_t.hpp>

#include "nlamp/core.hpp"
#include "nlamp/measurement/povm.hpp"

namespace nlamp {

/// Nearest-centre (Voronoi) tiling of the rescaled outcome space.
///
/// Eigenvectors whose outcome centres lie within the cluster tolerance share
/// one region.
struct DecisionRegions {
    std::vector<cplx> centres;
    std::vector<std::vector<Eigen::Index>> members;
    bool complex_plane = true;

    std::size_t size() const { return centres.size(); }

    std::size_t region_of(cplx outcome) const {
        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t c = 0; c < centres.size(); ++c) {
            const double d = complex_plane ? std::norm(outcome - centres[c])
                                           : std::pow(outcome.real() - centres[c].real(), 2);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    }

    /// Region index owning eigenvector i.
    std::size_t region_of_eigen(Eigen::Index i) const {
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (std::find(members[c].begin(), members[c].end(), i) != members[c].end()) return c;
        }
        throw Error("eigen index not assigned to a region");
    }
};

inline DecisionRegions decision_regions(const CVector& centres, bool complex_plane, double tol = kClusterTol) {
    DecisionRegions r;
    r.complex_plane = complex_plane;
    CVector c = centres;
    if (!complex_plane) c = c.real().cast<cplx>();
    r.members = eigenvalue_clusters(c, tol);
    for (const auto& m : r.members) r.centres.push_back(c(m.front()));
    return r;
}

inline DecisionRegions decision_regions(const ClosedFormPovm& povm) {
    return decision_regions(povm.centres, povm.complex_outcomes());
}

namespace detail {

using Polygon = std::vector<cplx>;

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Keeps the part of poly with dot(z, normal) <= offset (Sutherland-Hodgman).
inline Polygon clip_half_plane(const Polygon& poly, cplx normal, double offset) {
    const auto side = [&](cplx z) { return z.real() * normal.real() + z.imag() * normal.imag() - offset; };
    Polygon out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const cplx a = poly[k], b = poly[(k + 1) % poly.size()];
        const double sa = side(a), sb = side(b);
        if (sa <= 0.0) out.push_back(a);
        if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) out.push_back(a + (b - a) * (sa / (sa - sb)));
    }
    return out;
}

/// Voronoi cell of centres[c] intersected with the square |Re|,|Im| <= half about the origin (CCW).
inline Polygon voronoi_cell(const std::vector<cplx>& centres, std::size_t c, double half) {
    Polygon cell{{-half, -half}, {half, -half}, {half, half}, {-half, half}};
    for (std::size_t k = 0; k < centres.size() && !cell.empty(); ++k) {
        if (k == c) continue;
        const cplx n = centres[k] - centres[c];
        cell = clip_half_plane(cell, n, 0.5 * (std::norm(centres[k]) - std::norm(centres[c])));
    }
    return cell;
}

/// Mass of an isotropic Gaussian with per-axis standard deviation sd, centred
/// at the origin, inside the triangle (0, a, b); signed by orientation.
inline double gaussian_fan_triangle(cplx a, cplx b, double sd) {
    const double area2 = cross(a, b);
    const double len = std::abs(b - a);
    if (len == 0.0) return 0.0;
    const double d = std::abs(area2) / len;
    if (d < 1e-300) return 0.0;
    const cplx t = (b - a) / len;
    const double ya = a.real() * t.real() + a.imag() * t.imag();
    const double yb = b.real() * t.real() + b.imag() * t.imag();
    const double h = d / sd;
    const auto wedge = [&](double y) {
        const double s = std::abs(y) / d;
        const double v = std::atan(s) / (2.0 * kPi) - boost::math::owens_t(h, s);
        return y < 0.0 ? -v : v;
    };
    const double mass = wedge(yb) - wedge(ya);
    return area2 > 0.0 ? mass : -mass;
}

inline double gaussian_polygon_mass(const Polygon& poly, cplx centre, double sd) {
    double total = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        total += gaussian_fan_triangle(poly[k] - centre, poly[(k + 1) % poly.size()] - centre, sd);
    }
    return total;
}

}  // namespace detail

/// Region-integrated POVM: one operator per decision region.
struct CoarseGrainedPovm {
    DecisionRegions regions;
    std::vector<Operator> elements;
    RMatrix weights;  // weights(c, i) = <e_i| F_c |e_i>
    double identity_residual = 0.0;

    /// Weight each eigenvector places on its own region.
    std::vector<double> own_weights() const {
        std::vector<double> w(static_cast<std::size_t>(weights.cols()));
        for (Eigen::Index i = 0; i < weights.cols(); ++i) {
            w[static_cast<std::size_t>(i)] = weights(static_cast<Eigen::Index>(regions.region_of_eigen(i)), i);
        }
        return w;
    }
};

namespace detail {
inline void finish_coarse(CoarseGrainedPovm& out, const SpectralDecomposition& dec) {
    const auto n = dec.eigenvectors.rows();
    CMatrix total = CMatrix::Zero(n, n);
    for (const auto& e : out.elements) total += e.matrix;
    out.identity_residual = max_abs(total - CMatrix::Identity(n, n));
}
}  // namespace detail

/// Exact region integrals of closed-form records: erf on the line, Owen's T
/// fan triangulation of each (box-clipped) Voronoi cell in the plane.
inline CoarseGrainedPovm coarse_grain(const ClosedFormPovm& povm, const DecisionRegions& regions) {
    const auto& dec = povm.decomp;
    const auto nr = static_cast<Eigen::Index>(regions.size());
    CoarseGrainedPovm out{regions, {}, RMatrix::Zero(nr, dec.size()), 0.0};
    const double sd = std::sqrt(povm.axis_variance());
    if (!regions.complex_plane) {
        std::vector<std::size_t> order(regions.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](auto a, auto b) { return regions.centres[a].real() < regions.centres[b].real(); });
        for (std::size_t k = 0; k < order.size(); ++k) {
            const double lo = k == 0 ? -INFINITY
                                     : 0.5 * (regions.centres[order[k - 1]].real() + regions.centres[order[k]].real());
            const double hi = k + 1 == order.size()
                                  ? INFINITY
                                  : 0.5 * (regions.centres[order[k]].real() + regions.centres[order[k + 1]].real());
            for (Eigen::Index i = 0; i < dec.size(); ++i) {
                const double c = povm.centres(i).real();
                const double root_w = std::sqrt(povm.width);
                // 0.5 [erf((hi-c)/sqrt(w)) - erf((lo-c)/sqrt(w))], written with erfc on the far side for accuracy.
                const double a = (lo - c) / root_w, b = (hi - c) / root_w;
                const double mass = a >= 0.0 ? 0.5 * (std::erfc(a) - std::erfc(b))
                                             : (b <= 0.0 ? 0.5 * (std::erfc(-b) - std::erfc(-a))
                                                         : 1.0 - 0.5 * (std::erfc(-a) + std::erfc(b)));
                out.weights(static_cast<Eigen::Index>(order[k]), i) = mass;
            }
        }
    } else {
        double reach = 0.0;
        for (const auto& c : regions.centres) reach = std::max(reach, std::abs(c));
        for (Eigen::Index i = 0; i < dec.size(); ++i) reach = std::max(reach, std::abs(povm.centres(i)));
        const double half = reach + 40.0 * sd + 1.0;
        for (std::size_t c = 0; c < regions.size(); ++c) {
            const auto cell = detail::voronoi_cell(regions.centres, c, half);
            for (Eigen::Index i = 0; i < dec.size(); ++i) {
                out.weights(static_cast<Eigen::Index>(c), i) =
                    regions.size() == 1 ? 1.0 : detail::gaussian_polygon_mass(cell, povm.centres(i), sd);
            }
        }
    }
    for (Eigen::Index c = 0; c < nr; ++c) {
        const CVector w = out.weights.row(c).transpose().cast<cplx>();
        out.elements.emplace_back(dec.dims, dec.eigenvectors * w.asDiagonal() * dec.eigenvectors.adjoint());
    }
    detail::finish_coarse(out, dec);
    return out;
}

/// Grid sums of explicit elements over each region. Throws CoverageError when
/// the grid misses more than coverage_tol of the identity.
inline CoarseGrainedPovm coarse_grain(const NumericPovm& povm, const DecisionRegions& regions,
                                      const SpectralDecomposition& dec, double coverage_tol = 1e-2) {
    if (povm.identity_residual > coverage_tol) {
        throw CoverageError("outcome grid resolves the identity only to " + std::to_string(povm.identity_residual));
    }
    const auto n = dec.eigenvectors.rows();
    std::vector<CMatrix> acc(regions.size(), CMatrix::Zero(n, n));
    for (std::size_t k = 0; k < povm.grid.size(); ++k) {
        acc[regions.region_of(povm.grid.outcomes[k])] += povm.grid.measure[k] * povm.elements[k];
    }
    CoarseGrainedPovm out{regions, {}, RMatrix::Zero(static_cast<Eigen::Index>(regions.size()), dec.size()), 0.0};
    for (std::size_t c = 0; c < regions.size(); ++c) {
        const CMatrix in_eigen = dec.eigenvectors.adjoint() * acc[c] * dec.eigenvectors;
        out.weights.row(static_cast<Eigen::Index>(c)) = in_eigen.diagonal().real().transpose();
        out.elements.emplace_back(dec.dims, std::move(acc[c]));
    }
    detail::finish_coarse(out, dec);
    return out;
}

}  // namespace nlamp
