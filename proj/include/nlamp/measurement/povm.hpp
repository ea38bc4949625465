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
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "nlamp/amplifiers.hpp"
#include "nlamp/core.hpp"
#include "nlamp/io/format.hpp"
#include "nlamp/measurement/detector.hpp"
#include "nlamp/measurement/elements.hpp"

namespace nlamp {

/// Outcome points with their cell measure. Real outcomes keep imag() = 0.
struct PovmGrid {
    std::vector<cplx> outcomes;
    std::vector<double> measure;
    bool complex_outcomes = true;

    std::size_t size() const { return outcomes.size(); }

    /// Cell centres of [lo, hi] split into cells of width step.
    static PovmGrid line(double lo, double hi, double step) {
        PovmGrid g;
        g.complex_outcomes = false;
        const auto n = static_cast<long long>(std::ceil((hi - lo) / step - 1e-9));
        for (long long k = 0; k < n; ++k) {
            g.outcomes.emplace_back(lo + (static_cast<double>(k) + 0.5) * step, 0.0);
            g.measure.push_back(step);
        }
        return g;
    }

    /// Lattice cells (step x step, centred at (i+1/2) step) within radius of any centre.
    static PovmGrid discs(const std::vector<cplx>& centres, double radius, double step) {
        std::set<std::pair<long long, long long>> cells;
        for (const auto& c : centres) {
            const auto i0 = static_cast<long long>(std::floor((c.real() - radius) / step)) - 1;
            const auto i1 = static_cast<long long>(std::ceil((c.real() + radius) / step)) + 1;
            const auto j0 = static_cast<long long>(std::floor((c.imag() - radius) / step)) - 1;
            const auto j1 = static_cast<long long>(std::ceil((c.imag() + radius) / step)) + 1;
            for (long long i = i0; i <= i1; ++i) {
                for (long long j = j0; j <= j1; ++j) {
                    const cplx p((static_cast<double>(i) + 0.5) * step, (static_cast<double>(j) + 0.5) * step);
                    if (std::abs(p - c) <= radius) cells.emplace(i, j);
                }
            }
        }
        PovmGrid g;
        for (const auto& [i, j] : cells) {
            g.outcomes.emplace_back((static_cast<double>(i) + 0.5) * step, (static_cast<double>(j) + 0.5) * step);
            g.measure.push_back(step * step);
        }
        return g;
    }

    /// Real-line cells within radius of any centre.
    static PovmGrid intervals(const std::vector<double>& centres, double radius, double step) {
        std::set<long long> cells;
        for (double c : centres) {
            const auto i0 = static_cast<long long>(std::floor((c - radius) / step)) - 1;
            const auto i1 = static_cast<long long>(std::ceil((c + radius) / step)) + 1;
            for (long long i = i0; i <= i1; ++i) {
                if (std::abs((static_cast<double>(i) + 0.5) * step - c) <= radius) cells.insert(i);
            }
        }
        PovmGrid g;
        g.complex_outcomes = false;
        for (auto i : cells) {
            g.outcomes.emplace_back((static_cast<double>(i) + 0.5) * step, 0.0);
            g.measure.push_back(step);
        }
        return g;
    }
};

enum class PovmModel { heterodyne, homodyne, three_mode };

inline std::string to_string(PovmModel m) {
    switch (m) {
        case PovmModel::heterodyne:
            return "heterodyne";
        case PovmModel::homodyne:
            return "homodyne";
        default:
            return "three_mode";
    }
}

/// Effective POVM in closed form: E_phi = sum_i G_i(phi) |e_i><e_i| with
/// Gaussian G_i centred at centres(i), G_i ∝ exp(-|phi - c_i|^2 / width).
///
/// Outcomes are rescaled by the gain (phi = raw outcome / g). Centres:
/// heterodyne f_i; homodyne sqrt(2) Re f_i (the x_b shift of the meter);
/// three-mode sqrt(2) f_i = f_R^i + i f_I^i. width is (sigma2 + 1)/g^2 for
/// heterodyne with a vacuum meter and (sigma2 + eps2)/g^2 for the homodyne and
/// three-mode models; the per-axis variance is width/2.
struct ClosedFormPovm {
    SpectralDecomposition decomp;
    PovmModel model = PovmModel::heterodyne;
    double g = 1.0;
    double sigma2 = 0.0;
    double eps2 = 1.0;
    CVector centres;
    double width = 1.0;

    bool complex_outcomes() const { return model != PovmModel::homodyne; }
    double axis_variance() const { return 0.5 * width; }

    double density(Eigen::Index i, cplx phi) const {
        const double d2 = std::norm(phi - centres(i));
        if (complex_outcomes()) return std::exp(-d2 / width) / (kPi * width);
        return std::exp(-d2 / width) / std::sqrt(kPi * width);
    }

    CMatrix element(cplx phi) const {
        CVector w(decomp.size());
        for (Eigen::Index i = 0; i < decomp.size(); ++i) w(i) = density(i, phi);
        return decomp.eigenvectors * w.asDiagonal() * decomp.eigenvectors.adjoint();
    }
};

inline ClosedFormPovm effective_povm_closed_form(const SpectralDecomposition& decomp, double g, double sigma2,
                                                 PovmModel model, double eps2 = 1.0) {
    if (!(g > 0.0)) throw GainOutOfRange("closed-form POVM needs g > 0");
    if (sigma2 < 0.0 || eps2 <= 0.0) throw Error("sigma2 must be >= 0 and eps2 > 0");
    ClosedFormPovm p{decomp, model, g, sigma2, model == PovmModel::heterodyne ? 1.0 : eps2, {}, 0.0};
    const double root2 = std::sqrt(2.0);
    p.centres = CVector(decomp.size());
    for (Eigen::Index i = 0; i < decomp.size(); ++i) {
        const cplx e = decomp.eigenvalues(i);
        p.centres(i) = model == PovmModel::heterodyne ? e : model == PovmModel::homodyne ? cplx(root2 * e.real(), 0.0)
                                                                                        : root2 * e;
    }
    p.width = (sigma2 + p.eps2) / (g * g);
    return p;
}

/// Explicit effective POVM elements on H_a, one per grid point, per unit
/// rescaled outcome measure.
struct NumericPovm {
    PovmGrid grid;
    std::vector<CMatrix> elements;
    double scale = 1.0;  // raw outcome = scale * grid outcome
    double identity_residual = 0.0;
    double min_eigenvalue = 0.0;
};

namespace detail {

inline std::vector<double> meter_position_grid(int dim) {
    const double reach = std::max(10.0, std::sqrt(2.0 * dim + 1.0) + 5.0);
    return uniform_grid(-reach, reach, 0.005);
}

/// Position wavefunctions of the branch kets on a grid: column i is psi_i(y).
inline CMatrix branch_wavefunctions(const std::vector<CVector>& kets, const RMatrix& table) {
    CMatrix b(table.rows(), static_cast<Eigen::Index>(kets.size()));
    for (std::size_t i = 0; i < kets.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = kets[i];
    return table.transpose().cast<cplx>() * b;
}

/// <psi_i| M_x |psi_i> for a smeared homodyne element, from tabulated wavefunctions.
inline RVector homodyne_weights(const HomodyneQuadrature& quad, const CMatrix& psi, const std::vector<CVector>& kets,
                                double x, double sigma2) {
    RVector out(static_cast<Eigen::Index>(kets.size()));
    if (sigma2 == 0.0) {
        const CVector h = hermite_functions(static_cast<int>(kets.front().size()), x).cast<cplx>();
        for (std::size_t i = 0; i < kets.size(); ++i) out(static_cast<Eigen::Index>(i)) = std::norm(h.dot(kets[i]));
        return out;
    }
    const auto w = quad.kernel_weights(x, sigma2);
    const Eigen::Map<const RVector> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    return psi.cwiseAbs2().transpose() * wv;
}

inline void finish_numeric(NumericPovm& out, const SpectralDecomposition& dec) {
    const auto n = dec.eigenvectors.rows();
    CMatrix total = CMatrix::Zero(n, n);
    double min_eig = INFINITY;
    for (std::size_t k = 0; k < out.elements.size(); ++k) {
        total += out.grid.measure[k] * out.elements[k];
        const CMatrix h = 0.5 * (out.elements[k] + out.elements[k].adjoint());
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0));
    }
    out.identity_residual = max_abs(total - CMatrix::Identity(n, n));
    out.min_eigenvalue = out.elements.empty() ? 0.0 : min_eig;
}

}  // namespace detail

/// Effective POVM on H_a by sandwiching the detector between amplifier and meters:
/// E_phi = <meters| U^dag M_{scale phi} U |meters> * scale^k (k = 2 for complex
/// outcomes, 1 for real), with scale = g (or 1 when g = 0).
///
/// U is block diagonal, sum_i |e_i><e_i| (x) V_i, so E_phi is diagonal in the
/// eigenbasis with entries <m|V_i^dag M V_i|m>; only those are evaluated.
///
/// Single-meter variants take one detector (heterodyne or homodyne on meter b);
/// three-mode takes one or two homodyne detectors for meters b and c and
/// returns complex outcomes phi = (y_b + i y_c)/scale.
inline NumericPovm effective_povm_numeric(const AmplifierSpec& spec, const std::vector<State>& meters,
                                          const std::vector<DetectorSpec>& detectors, const PovmGrid& grid) {
    const auto br = meter_branches(spec, meters);
    const auto& dec = br.decomp;
    const double g = gain(spec);
    const double scale = g > 0.0 ? g : 1.0;
    NumericPovm out;
    out.grid = grid;
    out.scale = scale;
    out.elements.reserve(grid.size());
    const auto to_fock = [&](const RVector& w) {
        return CMatrix(dec.eigenvectors * w.cast<cplx>().asDiagonal() * dec.eigenvectors.adjoint());
    };

    if (spec.index() == 3) {
        if (detectors.empty() || detectors.size() > 2) throw Error("three-mode POVM needs one or two detectors");
        const DetectorSpec db = detectors.front(), dc = detectors.back();
        if (db.kind != DetectorKind::homodyne || dc.kind != DetectorKind::homodyne) {
            throw Error("three-mode POVM uses homodyne detection on both meters");
        }
        if (!grid.complex_outcomes) throw Error("three-mode POVM needs complex outcomes");
        const HomodyneQuadrature qb(br.meter_dims[0], detail::meter_position_grid(br.meter_dims[0]));
        const HomodyneQuadrature qc(br.meter_dims[1], detail::meter_position_grid(br.meter_dims[1]));
        const CMatrix psib = detail::branch_wavefunctions(br.branch[0], qb.table());
        const CMatrix psic = detail::branch_wavefunctions(br.branch[1], qc.table());
        for (const auto& phi : grid.outcomes) {
            const RVector wb = detail::homodyne_weights(qb, psib, br.branch[0], scale * phi.real(), db.sigma2());
            const RVector wc = detail::homodyne_weights(qc, psic, br.branch[1], scale * phi.imag(), dc.sigma2());
            out.elements.push_back(to_fock(scale * scale * wb.cwiseProduct(wc)));
        }
    } else {
        if (detectors.size() != 1) throw Error("single-meter POVM needs exactly one detector");
        const DetectorSpec det = detectors.front();
        const int dm = br.meter_dims[0];
        CMatrix b(dm, dec.size());
        for (Eigen::Index i = 0; i < dec.size(); ++i) b.col(i) = br.branch[0][static_cast<std::size_t>(i)];
        if (det.kind == DetectorKind::heterodyne) {
            if (!grid.complex_outcomes) throw Error("heterodyne POVM needs complex outcomes");
            CMatrix rotated(dm, dec.size());
            for (const auto& phi : grid.outcomes) {
                // u_j(m) = |u_j(m)| e^{i theta (m-j)}: the phase moves onto the branch kets.
                const cplx beta = scale * phi;
                const double theta = std::arg(beta);
                for (int m = 0; m < dm; ++m) rotated.row(m) = std::polar(1.0, -theta * m) * b.row(m);
                const RMatrix mag = heterodyne_factor_magnitudes(std::abs(beta), det.sigma2(), dm);
                const RMatrix c_re = mag.transpose() * rotated.real();
                const RMatrix c_im = mag.transpose() * rotated.imag();
                const RVector w = (c_re.cwiseAbs2() + c_im.cwiseAbs2()).colwise().sum().transpose();
                out.elements.push_back(to_fock(scale * scale * w));
            }
        } else {
            if (grid.complex_outcomes) throw Error("homodyne POVM needs real outcomes");
            const HomodyneQuadrature q(dm, detail::meter_position_grid(dm));
            const CMatrix psi = detail::branch_wavefunctions(br.branch[0], q.table());
            for (const auto& phi : grid.outcomes) {
                out.elements.push_back(
                    to_fock(scale * detail::homodyne_weights(q, psi, br.branch[0], scale * phi.real(), det.sigma2())));
            }
        }
    }
    detail::finish_numeric(out, dec);
    return out;
}

/// Grid covering every closed-form centre out to `widths` per-axis standard
/// deviations, with spacing `step_in_sd` standard deviations.
inline PovmGrid covering_grid(const ClosedFormPovm& p, double widths, double step_in_sd) {
    const double sd = std::sqrt(p.axis_variance());
    if (p.complex_outcomes()) {
        std::vector<cplx> c(p.centres.data(), p.centres.data() + p.centres.size());
        return PovmGrid::discs(c, widths * sd, step_in_sd * sd);
    }
    std::vector<double> c;
    for (Eigen::Index i = 0; i < p.centres.size(); ++i) c.push_back(p.centres(i).real());
    return PovmGrid::intervals(c, widths * sd, step_in_sd * sd);
}

/// Largest elementwise deviation between numeric elements and the closed form on the same grid.
inline double max_povm_deviation(const NumericPovm& numeric, const ClosedFormPovm& closed) {
    double worst = 0.0;
    for (std::size_t k = 0; k < numeric.grid.size(); ++k) {
        worst = std::max(worst, max_abs(numeric.elements[k] - closed.element(numeric.grid.outcomes[k])));
    }
    return worst;
}

/// Largest off-diagonal entry of the numeric elements in the eigenbasis of f.
inline double max_off_diagonal(const NumericPovm& numeric, const SpectralDecomposition& dec) {
    double worst = 0.0;
    for (const auto& e : numeric.elements) {
        CMatrix m = dec.eigenvectors.adjoint() * e * dec.eigenvectors;
        m.diagonal().setZero();
        worst = std::max(worst, max_abs(m));
    }
    return worst;
}

/// Writes closed-form records: one row per (grid point, eigenvector).
inline void write_povm_csv(std::ostream& os, const ClosedFormPovm& povm, const PovmGrid& grid) {
    io::CsvWriter csv(os, {"outcome_re", "outcome_im", "measure", "eigen_index", "weight"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (Eigen::Index i = 0; i < povm.decomp.size(); ++i) {
            csv.row() << grid.outcomes[k].real() << grid.outcomes[k].imag() << grid.measure[k] << static_cast<int>(i)
                      << povm.density(i, grid.outcomes[k]);
        }
    }
}

}  // namespace nlamp
