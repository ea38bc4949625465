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
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "nlamp/core.hpp"

namespace nlamp {

/// Real function of the position quadrature, applied by functional calculus.
struct SignalFunction {
    std::function<double(double)> fn;
    std::string label = "table";

    double operator()(double x) const { return fn(x); }

    /// c0 + c1 x + c2 x^2 + ...
    static SignalFunction polynomial(std::vector<double> coeffs) {
        std::string label = "poly(";
        for (std::size_t k = 0; k < coeffs.size(); ++k) label += (k ? "," : "") + std::to_string(coeffs[k]);
        label += ")";
        return {[c = std::move(coeffs)](double x) {
                    double acc = 0.0;
                    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
                    return acc;
                },
                label};
    }
};

namespace amp {
struct Linear {
    double g = 1.0;
};
struct TwoModeNormal {
    Operator f;
    double g = 0.0;
};
struct VonNeumann {
    Operator f;
    double g = 0.0;
};
/// Couples f_R = (f + f^dag)/sqrt(2) to meter b and f_I = -i(f - f^dag)/sqrt(2) to meter c.
struct ThreeMode {
    Operator f;
    double g = 0.0;
};
/// a_out = i g f(x) + cosh(r) a + sinh(r) a^dag.
struct SingleMode {
    SignalFunction f;
    double g = 0.0;
    double r = 0.0;
};
}  // namespace amp

using AmplifierSpec = std::variant<amp::Linear, amp::TwoModeNormal, amp::VonNeumann, amp::ThreeMode, amp::SingleMode>;

inline double gain(const AmplifierSpec& spec) {
    return std::visit([](const auto& s) { return s.g; }, spec);
}

inline std::string variant_name(const AmplifierSpec& spec) {
    static const char* names[] = {"linear", "two_mode", "von_neumann", "three_mode", "single_mode"};
    return names[spec.index()];
}

/// Number of internal (meter) modes the variant consumes.
inline int meter_count(const AmplifierSpec& spec) {
    switch (spec.index()) {
        case 3:
            return 2;
        case 4:
            return 0;
        default:
            return 1;
    }
}

/// Signal operator for the operator-valued variants; throws for linear and single-mode.
inline const Operator& signal_operator(const AmplifierSpec& spec) {
    if (const auto* s = std::get_if<amp::TwoModeNormal>(&spec)) return s->f;
    if (const auto* s = std::get_if<amp::VonNeumann>(&spec)) return s->f;
    if (const auto* s = std::get_if<amp::ThreeMode>(&spec)) return s->f;
    throw Error(variant_name(spec) + " amplifier has no signal operator");
}

inline bool has_signal_operator(const AmplifierSpec& spec) {
    return spec.index() >= 1 && spec.index() <= 3;
}

/// Checks gain range and the normality / Hermiticity requirement on f.
inline void validate(const AmplifierSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if (!std::isfinite(s.g)) throw GainOutOfRange("gain must be finite");
            if constexpr (std::is_same_v<T, amp::Linear>) {
                if (s.g < 1.0) throw GainOutOfRange("linear amplifier needs g >= 1, got " + std::to_string(s.g));
            } else {
                if (s.g < 0.0) throw GainOutOfRange("gain must be >= 0, got " + std::to_string(s.g));
            }
            if constexpr (std::is_same_v<T, amp::TwoModeNormal> || std::is_same_v<T, amp::ThreeMode>) {
                if (s.f.dims.size() != 1) throw DimensionMismatch("signal operator must act on one mode");
                const double c = normality_residual(s.f);
                if (!(c < default_normality_tol(s.f))) throw NotNormal(c);
            } else if constexpr (std::is_same_v<T, amp::VonNeumann>) {
                if (s.f.dims.size() != 1) throw DimensionMismatch("signal operator must act on one mode");
                const double h = hermiticity_residual(s.f);
                if (!(h < 1e-10 * std::max(1.0, max_abs(s.f.matrix)))) throw NotHermitian(h);
            } else if constexpr (std::is_same_v<T, amp::SingleMode>) {
                if (s.r < 0.0) throw Error("single-mode squeezing r must be >= 0");
                if (!s.f.fn) throw Error("single-mode amplifier needs a signal function");
            }
        },
        spec);
}

inline constexpr int kMaxMeterDim = 4096;

/// Meter dimension large enough to hold a meter displaced by g*|eigenvalue|.
///
/// Uses (g m + 6 e^{|r|})^2 where m is the largest |eigenvalue| carrying input
/// weight and r the meter squeeze, never below 16.
inline int auto_meter_dim(double g, double max_eigen, double meter_squeeze = 0.0) {
    const double reach = g * max_eigen + 6.0 * std::exp(std::abs(meter_squeeze));
    const double d = std::ceil(reach * reach);
    if (d > kMaxMeterDim) {
        throw TruncationError("meter would need dim " + std::to_string(static_cast<long long>(d)) + " > " +
                              std::to_string(kMaxMeterDim));
    }
    return std::max(16, static_cast<int>(d));
}

/// Largest |eigenvalue| among components whose weight in the input exceeds cutoff.
inline double occupied_eigen_reach(const SpectralDecomposition& d, const State& input, double cutoff = 1e-12) {
    const CMatrix rho_e = d.eigenvectors.adjoint() * input.density() * d.eigenvectors;
    double best = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (rho_e(i, i).real() >= cutoff) best = std::max(best, std::abs(d.eigenvalues(i)));
    }
    return best;
}

}  // namespace nlamp
