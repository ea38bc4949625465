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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlamp/amplifiers.hpp"
#include "nlamp/core.hpp"
#include "nlamp/estimators/trials.hpp"
#include "nlamp/measurement.hpp"

namespace nlamp {

enum class EstimatorKind { f_hat_nonlinear, n_hat_linear };

inline std::string to_string(EstimatorKind k) {
    return k == EstimatorKind::f_hat_nonlinear ? "f_hat_nonlinear" : "n_hat_linear";
}

/// How heterodyne outcomes of the linear scheme are produced.
///  shortcut: alpha = g alpha_Q + noise with alpha_Q drawn from the input Husimi density
///            (exact for a vacuum idler);
///  full:     the two-mode output is simulated and its reduced signal mode sampled.
enum class LinearSampling { shortcut, full };

/// How meter outcomes of the nonlinear scheme are produced.
///  evolve:    conditional meter states are evolved in a truncated meter space;
///  translate: the interaction translates x_b by sqrt(2) g f_i exactly, so an
///             eigencomponent i is drawn with weight <e_i|rho|e_i> and added to a
///             homodyne draw from the initial meter (no meter truncation; used
///             when the shift does not fit in a Fock space).
enum class NonlinearSampling { evolve, translate };

struct TrialPlan {
    AmplifierSpec amplifier;
    State input;
    DetectorSpec detector;
    EstimatorKind estimator = EstimatorKind::f_hat_nonlinear;
    std::size_t trials = 100000;
    std::uint64_t seed = 0;
    /// Meter preparations; empty means vacuum.
    std::vector<StateDescriptor> meters = {};
    LinearSampling linear_sampling = LinearSampling::shortcut;
    NonlinearSampling nonlinear_sampling = NonlinearSampling::evolve;
    /// Idler dimension for LinearSampling::full (0: same as the input).
    int linear_idler_dim = 0;
    unsigned threads = 0;
    bool keep_samples = false;
};

struct EstimateReport {
    EstimatorKind estimator = EstimatorKind::f_hat_nonlinear;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double gain = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
    double analytic_mean = 0.0;
    double analytic_variance = 0.0;
    /// "closed_form" for the ideal-detector vacuum-meter formulas, "derived" for
    /// their extensions to detector noise and non-vacuum meters.
    std::string analytic_label;
    double z_mean = 0.0;
    double z_variance = 0.0;
    std::vector<double> samples;

    bool mean_within(double k) const { return std::abs(z_mean) < k; }
    bool variance_within(double k) const { return std::abs(z_variance) < k; }
};

namespace detail {

inline void fill_report(EstimateReport& r, std::vector<double> samples, bool keep) {
    const auto m = sample_moments(samples);
    r.mean = m.mean;
    r.variance = m.variance;
    r.se_mean = m.se_mean;
    r.se_variance = m.se_variance;
    r.z_mean = m.se_mean > 0.0 ? (m.mean - r.analytic_mean) / m.se_mean : 0.0;
    r.z_variance = m.se_variance > 0.0 ? (m.variance - r.analytic_variance) / m.se_variance : 0.0;
    if (keep) r.samples = std::move(samples);
}

inline State single_meter(const TrialPlan& plan) {
    std::vector<StateDescriptor> preps = plan.meters;
    if (preps.empty()) preps.push_back(state_kind::Fock{0});
    if (preps.size() != 1) throw DimensionMismatch("this estimator uses exactly one meter");
    return auto_sized_meters(plan.amplifier, plan.input, preps).front();
}

/// Top-level occupancy a branch may carry before the meter counts as truncated.
inline constexpr double kBranchTopTol = 1e-6;

}  // namespace detail

/// Nonlinear-amplifier estimate of <f>: homodyne x on the meter, f_hat = x / (sqrt(2) g).
///
/// In evolve mode the amplifier acts once; the reduced meter state is the mixture
/// sum_i <e_i|rho|e_i> |m_i><m_i| of conditional meter states, and every trial
/// draws an independent homodyne outcome from it.
///
/// Analytic reference: mean <f> + <x_m>/(sqrt(2) g) and variance
/// Var[f] + (2 Var[x_m] + sigma2)/(4 g^2), with x_m the meter quadrature before
/// the interaction (Var[x_m] = 1/2 for vacuum, e^{-2r}/2 for a squeezed meter).
inline EstimateReport run_nonlinear_estimation(const TrialPlan& plan) {
    validate(plan.amplifier);
    if (plan.amplifier.index() != 1 && plan.amplifier.index() != 2) {
        throw Error("nonlinear estimation needs a two_mode or von_neumann amplifier");
    }
    if (plan.detector.kind != DetectorKind::homodyne) throw Error("nonlinear estimation uses homodyne detection");
    if (plan.trials < 2) throw Error("need at least two trials");
    const double g = gain(plan.amplifier);
    if (!(g > 0.0)) throw GainOutOfRange("nonlinear estimation needs g > 0");
    const Operator& f = signal_operator(plan.amplifier);
    if (!detail::hermitian_signal(f)) throw NotHermitian(hermiticity_residual(f));
    if (plan.input.dims() != f.dims) throw DimensionMismatch("input and signal operator spaces differ");

    const auto dec = normal_decompose(f);
    const CMatrix rho_eig = plan.input.is_ket()
                                ? CMatrix((dec.eigenvectors.adjoint() * plan.input.ket()).cwiseAbs2().cast<cplx>().asDiagonal())
                                : CMatrix(dec.eigenvectors.adjoint() * plan.input.density() * dec.eigenvectors);
    std::vector<char> active(static_cast<std::size_t>(dec.size()), 0);
    for (Eigen::Index i = 0; i < dec.size(); ++i) active[static_cast<std::size_t>(i)] = rho_eig(i, i).real() >= 1e-12;

    std::optional<State> meter;
    std::optional<OutcomeSampler> sampler;
    std::vector<double> cdf, shift;  // translate mode
    if (plan.nonlinear_sampling == NonlinearSampling::evolve) {
        meter = detail::single_meter(plan);
        const auto br = meter_branches(plan.amplifier, {*meter}, active);
        OutcomeSampler::Mixture parts;
        for (Eigen::Index i = 0; i < dec.size(); ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            const CVector& m = br.branch[0][static_cast<std::size_t>(i)];
            if (m.tail(1).squaredNorm() > detail::kBranchTopTol) {
                throw TruncationError("meter dim " + std::to_string(m.size()) + " too small for branch " +
                                      std::to_string(i));
            }
            parts.emplace_back(rho_eig(i, i).real(), m);
        }
        sampler.emplace(parts, plan.detector);
    } else {
        std::vector<StateDescriptor> preps = plan.meters;
        if (preps.empty()) preps.push_back(state_kind::Fock{0});
        if (preps.size() != 1) throw DimensionMismatch("this estimator uses exactly one meter");
        double squeeze = 0.0;
        if (const auto* sq = std::get_if<state_kind::SqueezedVacuum>(&preps.front())) squeeze = sq->r;
        if (const auto* gm = std::get_if<state_kind::GaussianMeter>(&preps.front())) squeeze = -std::log(gm->epsilon);
        meter = make_state(FockSpace(auto_meter_dim(0.0, 0.0, squeeze)), preps.front());
        sampler.emplace(*meter, plan.detector);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < dec.size(); ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            acc += rho_eig(i, i).real();
            cdf.push_back(acc);
            shift.push_back(std::sqrt(2.0) * g * dec.eigenvalues(i).real());
        }
    }

    EstimateReport r;
    r.estimator = EstimatorKind::f_hat_nonlinear;
    r.trials = plan.trials;
    r.seed = plan.seed;
    r.gain = g;
    const FockSpace ms(meter->dims().front());
    const Operator xm = quadrature_ops(ms).first;
    const double meter_mean = expectation(*meter, xm).real();
    const double meter_var = variance(*meter, xm);
    r.analytic_mean = expectation(plan.input, f).real() + meter_mean / (std::sqrt(2.0) * g);
    r.analytic_variance = variance(plan.input, f) + (2.0 * meter_var + plan.detector.sigma2()) / (4.0 * g * g);
    const bool vacuum_meter = plan.meters.empty() || std::holds_alternative<state_kind::Fock>(plan.meters.front());
    r.analytic_label = vacuum_meter && plan.detector.sigma2() == 0.0 ? "closed_form" : "derived";

    const double scale = 1.0 / (std::sqrt(2.0) * g);
    std::vector<double> samples;
    if (plan.nonlinear_sampling == NonlinearSampling::evolve) {
        samples = run_trials(plan.trials, plan.seed, plan.threads,
                             [&](std::size_t, RandomStream& rng) { return sampler->sample(rng).real() * scale; });
    } else {
        samples = run_trials(plan.trials, plan.seed, plan.threads, [&](std::size_t, RandomStream& rng) {
            const double u = rng.uniform() * cdf.back();
            const auto k = std::min<std::size_t>(
                static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), cdf.size() - 1);
            return (shift[k] + sampler->sample(rng).real()) * scale;
        });
    }
    detail::fill_report(r, std::move(samples), plan.keep_samples);
    return r;
}

/// Linear-amplifier photon-number estimate n_hat = |alpha|^2 / g^2 - 1 from heterodyne outcomes.
///
/// Analytic reference with s2 = sigma2 of the heterodyne detector:
/// mean <n> + s2/g^2, variance Var[n] + <n> + 1 + 2 s2 (<n>+1)/g^2 + s2^2/g^4.
inline EstimateReport run_linear_number_estimation(const TrialPlan& plan) {
    validate(plan.amplifier);
    if (plan.amplifier.index() != 0) throw Error("linear estimation needs a linear amplifier");
    if (plan.detector.kind != DetectorKind::heterodyne) throw Error("linear estimation uses heterodyne detection");
    if (plan.trials < 2) throw Error("need at least two trials");
    if (plan.input.dims().size() != 1) throw DimensionMismatch("input must be a single mode");
    const double g = gain(plan.amplifier);
    const FockSpace sa(plan.input.dims().front());
    const Operator n = number_op(sa);

    EstimateReport r;
    r.estimator = EstimatorKind::n_hat_linear;
    r.trials = plan.trials;
    r.seed = plan.seed;
    r.gain = g;
    const double s2 = plan.detector.sigma2();
    const double mean_n = expectation(plan.input, n).real();
    r.analytic_mean = mean_n + s2 / (g * g);
    r.analytic_variance = variance(plan.input, n) + mean_n + 1.0 + 2.0 * s2 * (mean_n + 1.0) / (g * g) +
                          s2 * s2 / (g * g * g * g);
    r.analytic_label = s2 == 0.0 ? "closed_form" : "derived";

    std::vector<double> samples;
    const auto n_hat = [g](cplx alpha) { return std::norm(alpha) / (g * g) - 1.0; };
    if (plan.linear_sampling == LinearSampling::shortcut) {
        if (!plan.meters.empty() && !std::holds_alternative<state_kind::Fock>(plan.meters.front())) {
            throw Error("the sampling shortcut assumes a vacuum idler");
        }
        const OutcomeSampler ideal(plan.input, DetectorSpec(DetectorKind::heterodyne, 1.0));
        samples = run_trials(plan.trials, plan.seed, plan.threads, [&](std::size_t, RandomStream& rng) {
            cplx alpha = g * ideal.sample_ideal(rng);
            if (s2 > 0.0) alpha += rng.complex_normal(0.5 * s2);
            return n_hat(alpha);
        });
    } else {
        const int idler_dim = plan.linear_idler_dim > 0 ? plan.linear_idler_dim : sa.dim;
        const StateDescriptor prep = plan.meters.empty() ? StateDescriptor{state_kind::Fock{0}} : plan.meters.front();
        const State idler = make_state(FockSpace(idler_dim), prep);
        const State out = simulate_output_state(plan.amplifier, plan.input, {idler});
        const State signal = partial_trace(out, {0});
        if (top_level_occupancy(signal, 0) > detail::kBranchTopTol) {
            throw TruncationError("amplified signal reaches the top Fock level; increase the input dimension");
        }
        const OutcomeSampler sampler(signal, plan.detector);
        samples = run_trials(plan.trials, plan.seed, plan.threads,
                             [&](std::size_t, RandomStream& rng) { return n_hat(sampler.sample(rng)); });
    }
    detail::fill_report(r, std::move(samples), plan.keep_samples);
    return r;
}

inline EstimateReport run_estimation(const TrialPlan& plan) {
    return plan.estimator == EstimatorKind::f_hat_nonlinear ? run_nonlinear_estimation(plan)
                                                            : run_linear_number_estimation(plan);
}

/// Side-by-side photon-number estimation with f = a^dag a.
struct SchemeComparison {
    EstimateReport nonlinear;
    EstimateReport linear;
    /// Gain used for the linear amplifier: g, or 1 when g < 1 (its ideal-detector
    /// estimator variance does not depend on the gain).
    double linear_gain = 1.0;
    bool improvement = false;           // sample variances
    bool analytic_improvement = false;  // analytic variances
};

inline SchemeComparison compare_schemes(const State& input, double g, double eta, std::size_t trials,
                                        std::uint64_t seed, unsigned threads = 0) {
    if (input.dims().size() != 1) throw DimensionMismatch("input must be a single mode");
    const FockSpace sa(input.dims().front());
    SchemeComparison c;
    c.linear_gain = std::max(1.0, g);
    TrialPlan nl{amp::VonNeumann{number_op(sa), g}, input, DetectorSpec(DetectorKind::homodyne, eta),
                 EstimatorKind::f_hat_nonlinear, trials, seed};
    nl.threads = threads;
    TrialPlan lin{amp::Linear{c.linear_gain}, input, DetectorSpec(DetectorKind::heterodyne, eta),
                  EstimatorKind::n_hat_linear, trials, seed};
    lin.threads = threads;
    c.nonlinear = run_nonlinear_estimation(nl);
    c.linear = run_linear_number_estimation(lin);
    c.improvement = c.nonlinear.variance < c.linear.variance;
    c.analytic_improvement = c.nonlinear.analytic_variance < c.linear.analytic_variance;
    return c;
}

/// Output signal-to-noise ratio <x_out>/sqrt(Var x_out) for Fock input n through
/// the two-mode amplifier with f = a^dag a and a meter squeezed by r: 2 e^r g n.
inline double snr_report(int n, double g, double r) {
    if (n < 0) throw Error("photon number must be >= 0");
    return 2.0 * std::exp(r) * g * n;
}

/// The same ratio from simulated output moments.
inline double simulated_snr(int n, double g, double r, int dim_a) {
    const FockSpace sa(dim_a);
    const AmplifierSpec spec = amp::TwoModeNormal{number_op(sa), g};
    const State input = fock_state(sa, n);
    const auto meters = auto_sized_meters(spec, input, {state_kind::SqueezedVacuum{r, 0.0}});
    const State out = simulate_output_state(spec, input, meters);
    const FockSpace sb(meters.front().dims().front());
    const auto m = slot_moments(out, 1, quadrature_ops(sb).first.matrix);
    return m.mean.real() / std::sqrt(m.symmetrized);
}

}  // namespace nlamp
