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

// Walkthrough: amplify a photon-number signal, look at the effective
// measurement it induces, and estimate <n> from simulated detector outcomes.

#include <cmath>
#include <cstdio>

#include "nlamp/amplifiers.hpp"
#include "nlamp/estimators.hpp"
#include "nlamp/measurement.hpp"

using namespace nlamp;

int main() {
    const FockSpace signal(8);
    const State input = fock_state(signal, 2);

    std::printf("Added noise, f = a^dag a, input |2>\n");
    std::printf("%6s %14s %14s\n", "g", "two-mode", "linear");
    for (double g : {1.25, 1.5, 2.0, 4.0}) {
        const AmplifierSpec nonlinear = amp::TwoModeNormal{number_op(signal), g};
        const auto meters = auto_sized_meters(nonlinear, input, {state_kind::Fock{0}});
        const auto out = simulate_output_state(nonlinear, input, meters);
        const double nl = measured_output_moments(nonlinear, out, input).added_noise;

        // Analytic moments are enough for the linear amplifier.
        const AmplifierSpec linear = amp::Linear{g};
        const double lin = predict_output_moments(linear, input, {vacuum_state(FockSpace(8))}).added_noise;
        std::printf("%6.2f %14.6f %14.6f\n", g, nl, lin);
    }

    std::printf("\nOwn-region weight of each photon number, heterodyne with eta = 0.5\n");
    const auto dec = normal_decompose(number_op(FockSpace(4)));
    const DetectorSpec het(DetectorKind::heterodyne, 0.5);
    for (double g : {0.5, 2.0, 8.0}) {
        const auto povm = effective_povm_closed_form(dec, g, het.sigma2(), PovmModel::heterodyne);
        const auto weights = coarse_grain(povm, decision_regions(povm)).own_weights();
        std::printf("g = %4.1f:", g);
        for (double w : weights) std::printf(" %.6f", w);
        std::printf("\n");
    }

    std::printf("\nEstimating <n> for a coherent state with |alpha|^2 = 1 (1e5 trials)\n");
    const auto cmp = compare_schemes(coherent_state(FockSpace(16), 1.0), 2.0, 1.0, 100000, 42);
    std::printf("nonlinear: mean %.4f  variance %.4f (expected %.4f)\n", cmp.nonlinear.mean, cmp.nonlinear.variance,
                cmp.nonlinear.analytic_variance);
    std::printf("linear:    mean %.4f  variance %.4f (expected %.4f)\n", cmp.linear.mean, cmp.linear.variance,
                cmp.linear.analytic_variance);
    std::printf("nonlinear scheme has the smaller variance: %s\n", cmp.improvement ? "yes" : "no");
    return 0;
}
