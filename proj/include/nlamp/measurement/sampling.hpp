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
#include <cstdint>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nlamp/core.hpp"
#include "nlamp/measurement/detector.hpp"

namespace nlamp {

inline constexpr double kSamplingStep = 0.05;
inline constexpr double kSamplingMassTol = 1e-4;

/// Draws detector outcomes for a fixed single-mode state.
///
/// The ideal outcome density (Husimi (1/pi)<beta|rho|beta> for heterodyne,
/// position density <y|rho|y> for homodyne) is tabulated on a cell grid;
/// a cell is chosen by inverse CDF and the point is jittered uniformly inside
/// it. Detector noise is Gaussian with variance sigma2/2 per axis.
class OutcomeSampler {
   public:
    /// Weighted pure components of a single-mode mixed state.
    using Mixture = std::vector<std::pair<double, CVector>>;

    OutcomeSampler(const State& state, const DetectorSpec& detector) : detector_(detector) {
        if (state.dims().size() != 1) throw DimensionMismatch("sampling needs a single-mode state");
        Mixture parts;
        if (state.is_ket()) {
            parts.emplace_back(1.0, state.ket());
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(state.density());
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
                if (es.eigenvalues()(k) > 1e-14) parts.emplace_back(es.eigenvalues()(k), es.eigenvectors().col(k));
            }
        }
        build(parts, state.dims().front());
    }

    /// State given as sum_k p_k |v_k><v_k| with unit total weight.
    OutcomeSampler(const Mixture& parts, const DetectorSpec& detector) : detector_(detector) {
        if (parts.empty()) throw Error("empty mixture");
        for (const auto& [p, v] : parts) {
            if (v.size() != parts.front().second.size()) throw DimensionMismatch("mixture components differ in size");
        }
        build(parts, static_cast<int>(parts.front().second.size()));
    }

    bool complex_outcomes() const { return complex_; }
    double captured_mass() const { return captured_mass_; }
    const DetectorSpec& detector() const { return detector_; }

    /// Ideal outcome (no detector noise).
    cplx sample_ideal(RandomStream& rng) const {
        const double u = rng.uniform() * captured_mass_;
        const auto k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
        const std::size_t cell = std::min(k, cdf_.size() - 1);
        if (complex_) {
            const auto i = static_cast<int>(cell / static_cast<std::size_t>(cells_));
            const auto j = static_cast<int>(cell % static_cast<std::size_t>(cells_));
            const double re = centre(i) + (rng.uniform() - 0.5) * kSamplingStep;
            const double im = centre(j) + (rng.uniform() - 0.5) * kSamplingStep;
            return {re, im};
        }
        return {centre(static_cast<int>(cell)) + (rng.uniform() - 0.5) * kSamplingStep, 0.0};
    }

    /// Detector outcome: ideal outcome plus smearing noise.
    cplx sample(RandomStream& rng) const {
        cplx out = sample_ideal(rng);
        const double s2 = detector_.sigma2();
        if (s2 > 0.0) {
            if (complex_) {
                out += rng.complex_normal(0.5 * s2);
            } else {
                out += std::sqrt(0.5 * s2) * rng.normal();
            }
        }
        return out;
    }

   private:
    void build(const Mixture& parts, int dim) {
        complex_ = detector_.kind == DetectorKind::heterodyne;
        reach_ = complex_ ? std::sqrt(static_cast<double>(dim)) + 4.0 : std::sqrt(2.0 * dim) + 4.0;
        cells_ = static_cast<int>(std::ceil(2.0 * reach_ / kSamplingStep));
        const double cell_measure = complex_ ? kSamplingStep * kSamplingStep : kSamplingStep;
        std::vector<double> density;
        if (complex_) {
            density.resize(static_cast<std::size_t>(cells_) * static_cast<std::size_t>(cells_));
            CVector overlap(dim);
            for (int i = 0; i < cells_; ++i) {
                for (int j = 0; j < cells_; ++j) {
                    const cplx beta(centre(i), centre(j));
                    // <n|beta> by recurrence from e^{-|beta|^2/2}; bounded by 1 in magnitude.
                    overlap(0) = std::exp(-0.5 * std::norm(beta));
                    for (int n = 1; n < dim; ++n) overlap(n) = overlap(n - 1) * beta / std::sqrt(static_cast<double>(n));
                    double q = 0.0;
                    for (const auto& [p, v] : parts) q += p * std::norm(overlap.dot(v));
                    density[static_cast<std::size_t>(i) * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(j)] =
                        q / kPi;
                }
            }
        } else {
            density.resize(static_cast<std::size_t>(cells_));
            for (int i = 0; i < cells_; ++i) {
                const CVector h = hermite_functions(dim, centre(i)).cast<cplx>();
                double q = 0.0;
                for (const auto& [p, v] : parts) q += p * std::norm(h.dot(v));
                density[static_cast<std::size_t>(i)] = q;
            }
        }
        cdf_.resize(density.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < density.size(); ++k) {
            acc += density[k] * cell_measure;
            cdf_[k] = acc;
        }
        captured_mass_ = acc;
        if (std::abs(acc - 1.0) > kSamplingMassTol) {
            throw TruncationError("outcome grid captures probability " + std::to_string(acc) +
                                  "; state is not resolved within the sampling range");
        }
    }

    double centre(int i) const { return -reach_ + (i + 0.5) * kSamplingStep; }

    DetectorSpec detector_;
    bool complex_ = true;
    double reach_ = 0.0;
    int cells_ = 0;
    std::vector<double> cdf_;
    double captured_mass_ = 0.0;
};

/// One outcome drawn from stream 0 of the given seed.
inline cplx sample_outcome(const State& state, const DetectorSpec& detector, std::uint64_t seed) {
    RandomStream rng(seed);
    return OutcomeSampler(state, detector).sample(rng);
}

/// count outcomes from stream 0 of the given seed.
inline std::vector<cplx> sample_outcomes(const State& state, const DetectorSpec& detector, std::uint64_t seed,
                                         std::size_t count) {
    const OutcomeSampler sampler(state, detector);
    RandomStream rng(seed);
    std::vector<cplx> out(count);
    for (auto& v : out) v = sampler.sample(rng);
    return out;
}

}  // namespace nlamp
