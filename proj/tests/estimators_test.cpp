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

#include <gtest/gtest.h>

#include <cmath>

#include "nlamp/estimators.hpp"
#include "test_util.hpp"

namespace nlamp {
namespace {

using testing::poisson_moments;

TrialPlan nonlinear_plan(const State& input, double g, double eta, std::size_t trials, std::uint64_t seed) {
    const FockSpace sa(input.dims().front());
    return {amp::VonNeumann{number_op(sa), g}, input, DetectorSpec(DetectorKind::homodyne, eta),
            EstimatorKind::f_hat_nonlinear, trials, seed};
}

TrialPlan linear_plan(const State& input, double g, double eta, std::size_t trials, std::uint64_t seed) {
    return {amp::Linear{g}, input, DetectorSpec(DetectorKind::heterodyne, eta), EstimatorKind::n_hat_linear, trials,
            seed};
}

State coherent(int dim, double alpha) { return coherent_state(FockSpace(dim), alpha); }

// ---------------------------------------------------------------- statistics

TEST(SampleMoments, KnownValues) {
    const auto m = sample_moments({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.se_mean, std::sqrt(5.0 / 12.0));
    // m4 = (81+1+1+81)/16/4 = 2.5625
    EXPECT_DOUBLE_EQ(m.se_variance, std::sqrt((2.5625 - 25.0 / 9.0 < 0 ? 0.0 : 2.5625 - 25.0 / 9.0) / 4.0));
    EXPECT_THROW(sample_moments({1.0}), Error);
}

TEST(SampleMoments, VarianceErrorForGaussian) {
    RandomStream rng(3);
    std::vector<double> x(200000);
    for (auto& v : x) v = 2.0 * rng.normal();
    const auto m = sample_moments(x);
    // For a normal sample SE(var) -> sqrt(2/n) sigma^2.
    EXPECT_NEAR(m.se_variance, std::sqrt(2.0 / 200000) * 4.0, 1e-3);
}

TEST(RunTrials, IndependentOfThreadCount) {
    const auto fn = [](std::size_t t, RandomStream& rng) { return rng.normal() + static_cast<double>(t % 7); };
    const auto one = run_trials(1000, 17, 1, fn);
    const auto four = run_trials(1000, 17, 4, fn);
    EXPECT_EQ(one, four);
    EXPECT_NE(one, run_trials(1000, 18, 1, fn));
}

// ---------------------------------------------------------------- nonlinear estimator

TEST(NonlinearEstimation, FockEigenstate) {
    const auto r = run_nonlinear_estimation(nonlinear_plan(fock_state(FockSpace(6), 2), 3.0, 1.0, 100000, 42));
    EXPECT_DOUBLE_EQ(r.analytic_mean, 2.0);
    EXPECT_NEAR(r.analytic_variance, 1.0 / 36.0, 1e-12);
    EXPECT_EQ(r.analytic_label, "closed_form");
    EXPECT_TRUE(r.mean_within(3.0)) << r.z_mean;
    EXPECT_TRUE(r.variance_within(3.0)) << r.z_variance;
}

TEST(NonlinearEstimation, CoherentPoissonVariance) {
    const auto pm = poisson_moments(2.0, 200);
    const auto r = run_nonlinear_estimation(nonlinear_plan(coherent(24, std::sqrt(2.0)), 2.0, 1.0, 100000, 42));
    EXPECT_NEAR(r.analytic_variance, pm.variance + 1.0 / 16.0, 1e-6);
    EXPECT_TRUE(r.mean_within(3.0)) << r.z_mean;
    EXPECT_TRUE(r.variance_within(3.0)) << r.z_variance;
}

TEST(NonlinearEstimation, TwoModeAgreesWithVonNeumann) {
    const State in = coherent(16, 1.0);
    TrialPlan p = nonlinear_plan(in, 1.5, 1.0, 50000, 9);
    p.amplifier = amp::TwoModeNormal{number_op(FockSpace(16)), 1.5};
    const auto r = run_nonlinear_estimation(p);
    EXPECT_NEAR(r.analytic_variance, poisson_moments(1.0, 100).variance + 1.0 / 9.0, 1e-6);
    EXPECT_TRUE(r.mean_within(3.0));
    EXPECT_TRUE(r.variance_within(3.0));
}

TEST(NonlinearEstimation, LargeGainProjectiveLimit) {
    TrialPlan p = nonlinear_plan(fock_state(FockSpace(6), 2), 50.0, 1.0, 100000, 42);
    EXPECT_THROW(run_nonlinear_estimation(p), TruncationError);  // shift sqrt(2) g f needs a meter beyond the cap
    p.nonlinear_sampling = NonlinearSampling::translate;
    const auto r = run_nonlinear_estimation(p);
    EXPECT_LT(r.variance - 0.0, 1e-3);
    EXPECT_TRUE(r.mean_within(3.0));
    EXPECT_TRUE(r.variance_within(3.0));
    const auto c = run_nonlinear_estimation(
        [&] {
            TrialPlan q = nonlinear_plan(coherent(24, std::sqrt(2.0)), 50.0, 1.0, 10, 1);
            q.nonlinear_sampling = NonlinearSampling::translate;
            return q;
        }());
    EXPECT_LT(c.analytic_variance - poisson_moments(2.0, 200).variance, 1e-3);
}

TEST(NonlinearEstimation, TranslateMatchesEvolve) {
    TrialPlan p = nonlinear_plan(coherent(16, 1.2), 1.0, 0.8, 40000, 5);
    const auto a = run_nonlinear_estimation(p);
    p.nonlinear_sampling = NonlinearSampling::translate;
    const auto b = run_nonlinear_estimation(p);
    EXPECT_DOUBLE_EQ(a.analytic_variance, b.analytic_variance);
    EXPECT_NEAR(a.mean, b.mean, 3 * std::hypot(a.se_mean, b.se_mean));
    EXPECT_NEAR(a.variance, b.variance, 3 * std::hypot(a.se_variance, b.se_variance));
}

TEST(NonlinearEstimation, SqueezedMeterAndDetectorNoise) {
    for (double r : {0.0, 0.5}) {
        TrialPlan p = nonlinear_plan(coherent(16, 1.0), 1.0, 0.7, 100000, 12);
        p.meters = {state_kind::SqueezedVacuum{r, 0.0}};
        const auto rep = run_nonlinear_estimation(p);
        const double s2 = (1 - 0.7) / (4 * 0.7);
        EXPECT_NEAR(rep.analytic_variance, 1.0 + (std::exp(-2 * r) + s2) / 4.0, 1e-6);
        EXPECT_EQ(rep.analytic_label, "derived");
        EXPECT_TRUE(rep.mean_within(3.0)) << r;
        EXPECT_TRUE(rep.variance_within(3.0)) << r;
    }
}

TEST(NonlinearEstimation, Preconditions) {
    const FockSpace s(4);
    TrialPlan p = nonlinear_plan(fock_state(s, 1), 1.0, 1.0, 10, 1);
    p.detector = DetectorSpec(DetectorKind::heterodyne, 1.0);
    EXPECT_THROW(run_nonlinear_estimation(p), Error);
    p = nonlinear_plan(fock_state(s, 1), 1.0, 1.0, 10, 1);
    p.amplifier = amp::TwoModeNormal{annihilation_op(s) * annihilation_op(s), 1.0};
    EXPECT_THROW(run_nonlinear_estimation(p), NotNormal);
    p.amplifier = amp::TwoModeNormal{rotation_op(s, kPi / 2), 1.0};
    EXPECT_THROW(run_nonlinear_estimation(p), NotHermitian);
    p.amplifier = amp::VonNeumann{number_op(s), 0.0};
    EXPECT_THROW(run_nonlinear_estimation(p), GainOutOfRange);
    p.amplifier = amp::Linear{2.0};
    EXPECT_THROW(run_nonlinear_estimation(p), Error);
}

// ---------------------------------------------------------------- linear estimator

TEST(LinearEstimation, SpecExamples) {
    struct Case {
        State in;
        double mean, var;
    };
    const std::vector<Case> cases{{fock_state(FockSpace(8), 2), 2.0, 3.0},
                                  {coherent(24, std::sqrt(2.0)), 2.0, 5.0},
                                  {vacuum_state(FockSpace(4)), 0.0, 1.0}};
    for (const auto& c : cases) {
        const auto r = run_linear_number_estimation(linear_plan(c.in, 2.0, 1.0, 100000, 42));
        EXPECT_NEAR(r.analytic_mean, c.mean, 1e-6);
        EXPECT_NEAR(r.analytic_variance, c.var, 1e-6);
        EXPECT_TRUE(r.mean_within(3.0)) << r.z_mean;
        EXPECT_TRUE(r.variance_within(3.0)) << r.z_variance;
    }
}

TEST(LinearEstimation, HeterodyneMomentIdentity) {
    for (double g : {1.0, 1.5}) {
        TrialPlan p = linear_plan(coherent(16, 1.0), g, 1.0, 100000, 8);
        p.keep_samples = true;
        const auto r = run_linear_number_estimation(p);
        std::vector<double> abs2;
        for (double v : r.samples) abs2.push_back(g * g * (v + 1.0));
        const auto m = sample_moments(abs2);
        EXPECT_NEAR(m.mean, g * g * 1.0 + g * g, 3 * m.se_mean) << g;
    }
}

TEST(LinearEstimation, FullSimulationMatchesShortcut) {
    for (double g : {1.0, 1.2}) {
        TrialPlan p = linear_plan(fock_state(FockSpace(32), 1), g, 1.0, 40000, 21);
        const auto shortcut = run_linear_number_estimation(p);
        p.linear_sampling = LinearSampling::full;
        const auto full = run_linear_number_estimation(p);
        EXPECT_TRUE(full.mean_within(3.0)) << g;
        EXPECT_TRUE(full.variance_within(3.0)) << g;
        EXPECT_NEAR(full.mean, shortcut.mean, 3 * std::hypot(full.se_mean, shortcut.se_mean));
        EXPECT_NEAR(full.variance, shortcut.variance, 3 * std::hypot(full.se_variance, shortcut.se_variance));
    }
}

TEST(LinearEstimation, NoisyDetector) {
    const auto r = run_linear_number_estimation(linear_plan(coherent(16, 1.0), 1.5, 0.6, 100000, 4));
    const double s2 = 0.4 / 0.6, g2 = 2.25;
    EXPECT_NEAR(r.analytic_mean, 1.0 + s2 / g2, 1e-6);
    EXPECT_NEAR(r.analytic_variance, 1.0 + 1.0 + 1.0 + 2 * s2 * 2.0 / g2 + s2 * s2 / (g2 * g2), 1e-6);
    EXPECT_EQ(r.analytic_label, "derived");
    EXPECT_TRUE(r.mean_within(3.0));
    EXPECT_TRUE(r.variance_within(3.0));
}

TEST(LinearEstimation, Preconditions) {
    TrialPlan p = linear_plan(vacuum_state(FockSpace(4)), 2.0, 1.0, 10, 1);
    p.amplifier = amp::Linear{0.5};
    EXPECT_THROW(run_linear_number_estimation(p), GainOutOfRange);
    p = linear_plan(vacuum_state(FockSpace(4)), 2.0, 1.0, 10, 1);
    p.detector = DetectorSpec(DetectorKind::homodyne, 1.0);
    EXPECT_THROW(run_linear_number_estimation(p), Error);
}

// ---------------------------------------------------------------- repeated-seed properties

TEST(Estimators, UnbiasedOverSeeds) {
    int nl_ok = 0, lin_ok = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        nl_ok += run_nonlinear_estimation(nonlinear_plan(coherent(16, 1.0), 1.0, 1.0, 10000, seed)).mean_within(3.0);
        lin_ok += run_linear_number_estimation(linear_plan(coherent(16, 1.0), 1.5, 1.0, 10000, seed)).mean_within(3.0);
    }
    // At least 99% of 20 repetitions.
    EXPECT_GE(nl_ok, 20);
    EXPECT_GE(lin_ok, 20);
}

TEST(Estimators, SeedDeterminism) {
    TrialPlan p = nonlinear_plan(coherent(16, 1.0), 2.0, 0.9, 2000, 77);
    p.keep_samples = true;
    p.threads = 1;
    const auto a = run_nonlinear_estimation(p);
    p.threads = 3;
    const auto b = run_nonlinear_estimation(p);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.variance, b.variance);
    TrialPlan q = linear_plan(coherent(16, 1.0), 2.0, 0.9, 2000, 77);
    q.keep_samples = true;
    EXPECT_EQ(run_linear_number_estimation(q).samples, run_linear_number_estimation(q).samples);
}

// ---------------------------------------------------------------- comparison and SNR

TEST(CompareSchemes, SpecExamples) {
    const auto c = compare_schemes(coherent(16, 1.0), 1.0, 1.0, 100000, 42);
    EXPECT_NEAR(c.nonlinear.analytic_variance, 1.25, 1e-6);
    EXPECT_NEAR(c.linear.analytic_variance, 3.0, 1e-6);
    EXPECT_TRUE(c.improvement);
    EXPECT_TRUE(c.analytic_improvement);

    const auto small = compare_schemes(vacuum_state(FockSpace(4)), 0.4, 1.0, 20000, 42);
    EXPECT_NEAR(small.nonlinear.analytic_variance, 1.5625, 1e-12);
    EXPECT_NEAR(small.linear.analytic_variance, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(small.linear_gain, 1.0);
    EXPECT_FALSE(small.analytic_improvement);
    EXPECT_FALSE(small.improvement);

    const auto big = compare_schemes(fock_state(FockSpace(6), 3), 10.0, 1.0, 20000, 42);
    EXPECT_NEAR(big.nonlinear.analytic_variance, 0.0025, 1e-12);
    EXPECT_GE(big.linear.analytic_variance, 1.0);
    EXPECT_TRUE(big.improvement);
}

TEST(Snr, FormulaAndSimulation) {
    EXPECT_DOUBLE_EQ(snr_report(2, 3.0, 0.0), 12.0);
    EXPECT_DOUBLE_EQ(snr_report(0, 3.0, 0.0), 0.0);
    EXPECT_NEAR(snr_report(1, 2.0, 1.0), 4.0 * std::exp(1.0), 1e-12);
    EXPECT_THROW(snr_report(-1, 1.0, 0.0), Error);
    EXPECT_NEAR(simulated_snr(2, 3.0, 0.0, 4), 12.0, 1e-6);
    EXPECT_NEAR(simulated_snr(1, 2.0, 1.0, 3), 4.0 * std::exp(1.0), 1e-5);
}

}  // namespace
}  // namespace nlamp
