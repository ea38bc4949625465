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
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlamp/cli/config.hpp"
#include "nlamp/estimators.hpp"
#include "nlamp/io/format.hpp"

namespace nlamp::cli {

enum ExitCode : int { kExitOk = 0, kExitCheckFailure = 1, kExitConfigError = 2, kExitTruncation = 3 };

struct OutputFile {
    std::string name;
    std::string contents;
};

struct CommandOutput {
    int exit_code = kExitOk;
    std::string text;   // printed to stdout
    std::string error;  // printed to stderr
    std::vector<OutputFile> files;
};

inline std::string exception_name(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const NotNormal*>(&e)) return "NotNormal";
    if (dynamic_cast<const NotHermitian*>(&e)) return "NotHermitian";
    if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
    if (dynamic_cast<const CoverageError*>(&e)) return "CoverageError";
    if (dynamic_cast<const GainOutOfRange*>(&e)) return "GainOutOfRange";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "std::exception";
}

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GainOutOfRange*>(&e) ||
        dynamic_cast<const DimensionMismatch*>(&e)) {
        return kExitConfigError;
    }
    if (dynamic_cast<const TruncationError*>(&e) || dynamic_cast<const CoverageError*>(&e)) return kExitTruncation;
    return kExitCheckFailure;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- shared helpers

/// Zero-pads a single-mode state into a larger Fock space.
inline State pad_state(const State& s, int dim) {
    const auto n = s.size();
    if (dim < n) throw DimensionMismatch("cannot pad a state into a smaller space");
    if (s.is_ket()) {
        CVector v = CVector::Zero(dim);
        v.head(n) = s.ket();
        return State::from_ket({dim}, std::move(v));
    }
    CMatrix r = CMatrix::Zero(dim, dim);
    r.topLeftCorner(n, n) = s.density();
    return State::from_density({dim}, std::move(r));
}

/// Mode dimension for linear-amplifier simulations: dims.meter when given,
/// otherwise enough headroom for the amplified photon number.
inline int linear_mode_dim(const RunConfig& c, double g, const State& input) {
    if (c.dims.meter > 0) return std::max(c.dims.meter, c.dims.signal);
    const double n = expectation(input, number_op(FockSpace(c.dims.signal))).real();
    const int d = 16 + static_cast<int>(std::ceil(16.0 * g * g * (n + 1.0)));
    return std::clamp(d, c.dims.signal, 160);
}

/// Simulated output moments for one gain (not single_mode).
inline MomentReport simulated_moments(const RunConfig& c, double g, MomentReport* predicted = nullptr) {
    const AmplifierSpec spec = build_amplifier(c, g);
    State input = build_input(c);
    std::vector<State> meters;
    if (spec.index() == 0) {
        const int d = linear_mode_dim(c, g, input);
        input = pad_state(input, d);
        meters.push_back(make_state(FockSpace(d), meter_prep(c)));
    } else {
        meters = build_meters(c, spec, input);
    }
    if (predicted) *predicted = predict_output_moments(spec, input, meters);
    return measured_output_moments(spec, simulate_output_state(spec, input, meters), input);
}

inline Json report_json(const EstimateReport& r) {
    return Json{{"estimator", to_string(r.estimator)},
                {"trials", r.trials},
                {"seed", r.seed},
                {"gain", r.gain},
                {"mean", r.mean},
                {"variance", r.variance},
                {"se_mean", r.se_mean},
                {"se_variance", r.se_variance},
                {"analytic_mean", r.analytic_mean},
                {"analytic_variance", r.analytic_variance},
                {"analytic_label", r.analytic_label},
                {"z_mean", r.z_mean},
                {"z_variance", r.z_variance}};
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

using CheckFn = std::function<std::pair<bool, std::string>()>;

inline CheckResult run_check(const std::string& name, const CheckFn& fn) {
    try {
        auto [ok, detail] = fn();
        return {name, ok, detail};
    } catch (const std::exception& e) {
        return {name, false, exception_name(e) + ": " + e.what()};
    }
}

/// "value < bound" check with both numbers in the detail text.
inline std::pair<bool, std::string> below(double value, double bound) {
    return {value < bound, io::format_sci(value) + " < " + io::format_sci(bound)};
}

namespace detail {

inline std::vector<std::pair<std::string, CheckFn>> core_checks() {
    std::vector<std::pair<std::string, CheckFn>> out;
    out.emplace_back("core.ladder_commutator", [] {
        const FockSpace s(12);
        const auto a = annihilation_op(s);
        const CMatrix c = commutator(a, a.adjoint()).matrix - CMatrix::Identity(12, 12);
        return below(guarded_max_abs(c, {12}), 1e-12);
    });
    out.emplace_back("core.quadrature_commutator", [] {
        const auto [x, p] = quadrature_ops(FockSpace(12));
        const CMatrix c = commutator(x, p).matrix - kI * CMatrix::Identity(12, 12);
        return below(guarded_max_abs(c, {12}), 1e-12);
    });
    out.emplace_back("core.vacuum_variance", [] {
        const FockSpace s(8);
        return below(std::abs(variance(vacuum_state(s), quadrature_ops(s).first) - 0.5), 1e-14);
    });
    out.emplace_back("core.squeezed_variance", [] {
        const FockSpace s(40);
        const double v = variance(squeezed_vacuum_state(s, 0.5), quadrature_ops(s).first);
        return below(std::abs(v - 0.5 * std::exp(-1.0)), 1e-8);
    });
    out.emplace_back("core.coherent_mean", [] {
        const FockSpace s(30);
        const cplx alpha(0.6, 0.3);
        return below(std::abs(expectation(coherent_state(s, alpha), annihilation_op(s)) - alpha), 1e-10);
    });
    out.emplace_back("core.unitary_from_generator", [] {
        const auto x = quadrature_ops(FockSpace(10)).first;
        return below(unitarity_residual(unitary_from_generator(x * x, 0.7)), 1e-12);
    });
    out.emplace_back("core.normal_decompose", [] {
        const auto f = rotation_op(FockSpace(6), kPi / 2);
        return below(max_abs(normal_decompose(f).reconstruct() - f.matrix), 1e-12);
    });
    out.emplace_back("core.partial_trace", [] {
        const auto coh = coherent_state(FockSpace(10), cplx(0.4, -0.2), 1e-4);
        const auto joint = tensor({coh, fock_state(FockSpace(3), 1)});
        return below(max_abs(partial_trace(joint, {0}).density() - coh.density()), 1e-12);
    });
    out.emplace_back("core.quadrature_density_normalized", [] {
        const auto grid = uniform_grid(-12.0, 12.0, 0.01);
        const RVector rho = quadrature_density(fock_state(FockSpace(6), 3), 0, grid);
        return below(std::abs(rho.sum() * 0.01 - 1.0), 1e-8);
    });
    out.emplace_back("core.rng_streams", [] {
        RandomStream a(7, 3), b(7, 3), c(7, 4);
        bool same = true, differs = false;
        for (int k = 0; k < 5; ++k) {
            const double u = a.uniform();
            same = same && u == b.uniform();
            differs = differs || u != c.uniform();
        }
        return std::pair<bool, std::string>{same && differs, same && differs ? "reproducible, streams independent"
                                                                              : "stream mismatch"};
    });
    return out;
}

inline std::vector<std::pair<std::string, CheckFn>> amplifier_checks(const RunConfig& c) {
    std::vector<std::pair<std::string, CheckFn>> out;
    const auto& gl = c.amplifier.g_list;
    const double g0 = gl.front();
    const double gmin = *std::min_element(gl.begin(), gl.end());
    const std::string v = c.amplifier.variant;

    out.emplace_back("amplifier.validate", [&c, gl] {
        for (double g : gl) validate(build_amplifier(c, g));
        return std::pair<bool, std::string>{true, "gates pass for " + std::to_string(gl.size()) + " gains"};
    });

    if (v == "single_mode") {
        const auto fn = SignalFunction::polynomial(c.amplifier.f.coeffs);
        const double r = c.amplifier.r;
        out.emplace_back("amplifier.output_commutator", [=, &c] {
            const auto ops = single_mode_output_ops(fn, g0, r, FockSpace(c.dims.signal));
            const CMatrix m = commutator(ops.a_out, ops.a_out.adjoint()).matrix -
                              CMatrix::Identity(c.dims.signal, c.dims.signal);
            return below(guarded_max_abs(m, {c.dims.signal}), 1e-7);
        });
        out.emplace_back("amplifier.x_out_scaling", [=, &c] {
            const State in = build_input(c);
            const double mx = expectation(in, quadrature_ops(FockSpace(c.dims.signal)).first).real();
            return below(std::abs(single_mode_output_moments(fn, g0, r, in).quad_means.first - std::exp(r) * mx), 1e-6);
        });
        out.emplace_back("amplifier.p_out_noise_formula", [=, &c] {
            const State in = build_input(c);
            const FockSpace s(c.dims.signal);
            const auto ops = single_mode_output_ops(fn, g0, r, s);
            const auto p = quadrature_ops(s).second;
            const double mf = expectation(in, ops.signal).real(), mp = expectation(in, p).real();
            const double cross = 0.5 * expectation(in, ops.signal * p + p * ops.signal).real() - mf * mp;
            const double formula = 2 * g0 * g0 * variance(in, ops.signal) + std::exp(-2 * r) * variance(in, p) +
                                   2 * std::sqrt(2.0) * g0 * std::exp(-r) * cross;
            return below(std::abs(single_mode_output_moments(fn, g0, r, in).quad_noises.second - formula), 1e-8);
        });
        out.emplace_back("amplifier.signal_commutes_with_x", [=, &c] {
            const FockSpace s(c.dims.signal);
            const auto ops = single_mode_output_ops(fn, g0, r, s);
            return below(max_abs(commutator(ops.signal, quadrature_ops(s).first).matrix), 1e-10);
        });
        out.emplace_back("amplifier.added_noise_bounded", [=, &c] {
            const State in = build_input(c);
            double worst = 0.0;
            for (double g : gl) worst = std::max(worst, std::abs(single_mode_output_moments(fn, g, r, in).added_noise) /
                                                            std::max(g, 1e-300));
            // Added p noise per unit gain stays O(e^{-r}).
            return below(worst, 5.0 * std::exp(-r) + 1e-12);
        });
        return out;
    }

    out.emplace_back("amplifier.unitarity", [&c, g0, v] {
        const AmplifierSpec spec = build_amplifier(c, g0);
        if (v == "linear") return below(unitarity_residual(linear_amp_unitary(g0, {6, 6})), 1e-10);
        const Operator& f = signal_operator(spec);
        if (v == "two_mode") return below(unitarity_residual(two_mode_unitary(f, g0, 10)), 1e-10);
        if (v == "von_neumann") return below(unitarity_residual(von_neumann_unitary(f, g0, 10)), 1e-10);
        return below(unitarity_residual(three_mode_block_unitary(f, g0, 6, 6)), 1e-10);
    });
    out.emplace_back("amplifier.factored_form", [&c, gmin, g0, v] {
        if (v == "linear") {
            const Dims d{6, 6};
            const auto direct = unitary_from_generator(linear_amp_generator(g0, d), 1.0);
            return below(max_abs(linear_amp_unitary(g0, d).matrix - direct.matrix), 1e-10);
        }
        const AmplifierSpec spec = build_amplifier(c, gmin);
        const Operator& f = signal_operator(spec);
        if (v == "two_mode") {
            const auto chk = zassenhaus_check(f, gmin, 30);
            if (chk.columns_compared == 0) return std::pair<bool, std::string>{false, "no guarded columns at dim 30"};
            return below(chk.max_deviation, 1e-8);
        }
        if (v == "von_neumann") {
            const auto dec = normal_decompose(f);
            const int db = 10;
            CMatrix blocks = CMatrix::Zero(f.size() * db, f.size() * db);
            for (Eigen::Index i = 0; i < dec.size(); ++i) {
                blocks += kron(dec.projector(i), shift_unitary(db, std::sqrt(2.0) * gmin * dec.eigenvalues(i).real()));
            }
            return below(max_abs(von_neumann_unitary(f, gmin, db).matrix - blocks), 1e-10);
        }
        return below(max_abs(three_mode_unitary(f, gmin, 6, 6).matrix - three_mode_block_unitary(f, gmin, 6, 6).matrix),
                     1e-10);
    });
    out.emplace_back("amplifier.predicted_mean", [&c, g0] {
        MomentReport pred;
        const auto meas = simulated_moments(c, g0, &pred);
        return below(std::abs(pred.mean_out - meas.mean_out) + std::abs(pred.quad_means.first - meas.quad_means.first),
                     1e-6);
    });
    out.emplace_back("amplifier.predicted_noise", [&c, g0] {
        MomentReport pred;
        const auto meas = simulated_moments(c, g0, &pred);
        return below(std::abs(pred.symmetrized_noise - meas.symmetrized_noise) +
                         std::abs(pred.added_noise - meas.added_noise),
                     1e-6);
    });
    out.emplace_back(v == "linear" ? "amplifier.added_noise_scales_with_gain" : "amplifier.added_noise_gain_independent",
                     [&c, gl, v] {
                         std::vector<double> noise;
                         for (double g : gl) noise.push_back(simulated_moments(c, g).added_noise);
                         double worst = 0.0;
                         if (v == "linear") {
                             // (g^2 - 1) times the idler's own symmetrized noise.
                             const double meter_noise =
                                 symmetrized_moment(make_state(FockSpace(40), meter_prep(c)), annihilation_op(FockSpace(40)));
                             for (std::size_t k = 0; k < gl.size(); ++k) {
                                 worst = std::max(worst, std::abs(noise[k] - (gl[k] * gl[k] - 1.0) * meter_noise));
                             }
                         } else {
                             for (double n : noise) worst = std::max(worst, std::abs(n - noise.front()));
                         }
                         return below(worst, 1e-6);
                     });
    return out;
}

inline std::vector<std::pair<std::string, CheckFn>> measurement_checks() {
    std::vector<std::pair<std::string, CheckFn>> out;
    out.emplace_back("measurement.closed_form_identity", [] {
        const auto closed = effective_povm_closed_form(normal_decompose(number_op(FockSpace(4))), 1.0, 1.0,
                                                       PovmModel::heterodyne);
        return below(coarse_grain(closed, decision_regions(closed)).identity_residual, 1e-9);
    });
    const auto numeric_case = [] {
        const FockSpace sa(4);
        const Operator f = number_op(sa);
        const DetectorSpec det(DetectorKind::homodyne, 1.0);
        const auto closed = effective_povm_closed_form(normal_decompose(f), 1.0, det.sigma2(), PovmModel::homodyne);
        const auto num = effective_povm_numeric(amp::VonNeumann{f, 1.0}, {vacuum_state(FockSpace(auto_meter_dim(1.0, 3.0)))},
                                                {det}, covering_grid(closed, 5.0, 0.25));
        return std::make_pair(closed, num);
    };
    out.emplace_back("measurement.numeric_matches_closed_form", [numeric_case] {
        const auto [closed, num] = numeric_case();
        return below(max_povm_deviation(num, closed), 1e-5);
    });
    out.emplace_back("measurement.povm_diagonal_in_eigenbasis", [numeric_case] {
        const auto [closed, num] = numeric_case();
        return below(max_off_diagonal(num, closed.decomp), 1e-8);
    });
    out.emplace_back("measurement.sharpening_with_gain", [] {
        const auto dec = normal_decompose(number_op(FockSpace(4)));
        std::vector<double> prev(4, 0.0);
        bool ok = true;
        double last = 0.0;
        for (double g : {1.0, 2.0, 4.0, 8.0}) {
            const auto closed = effective_povm_closed_form(dec, g, 1.0, PovmModel::heterodyne);
            const auto w = coarse_grain(closed, decision_regions(closed)).own_weights();
            for (std::size_t i = 0; i < w.size(); ++i) ok = ok && w[i] > prev[i];
            prev = w;
            last = *std::min_element(w.begin(), w.end());
        }
        return std::pair<bool, std::string>{ok, "min own weight at g=8: " + io::format_sci(last)};
    });
    out.emplace_back("measurement.homodyne_identity", [] {
        const FockSpace s(6);
        const HomodyneQuadrature q(6, default_homodyne_grid());
        CMatrix total = CMatrix::Zero(6, 6);
        const double step = 0.01;
        for (double x : uniform_grid(-9.0, 9.0, step)) total += step * q.element(x, 0.1).matrix;
        return below(max_abs(total - CMatrix::Identity(6, 6)), 1e-6);
    });
    out.emplace_back("measurement.sampler_vacuum_homodyne", [] {
        const auto xs = sample_outcomes(vacuum_state(FockSpace(4)), DetectorSpec(DetectorKind::homodyne, 1.0), 11, 40000);
        std::vector<double> re;
        for (auto z : xs) re.push_back(z.real());
        const auto m = sample_moments(re);
        return below(std::abs(m.variance - 0.5) / m.se_variance, 4.0);
    });
    out.emplace_back("measurement.sampler_coherent_heterodyne", [] {
        const cplx alpha(0.8, -0.4);
        const auto zs = sample_outcomes(coherent_state(FockSpace(20), alpha), DetectorSpec(DetectorKind::heterodyne, 1.0),
                                        12, 40000);
        std::vector<double> re, im;
        for (auto z : zs) {
            re.push_back(z.real());
            im.push_back(z.imag());
        }
        const auto mr = sample_moments(re), mi = sample_moments(im);
        return below(std::max(std::abs(mr.mean - alpha.real()) / mr.se_mean, std::abs(mi.mean - alpha.imag()) / mi.se_mean),
                     4.0);
    });
    return out;
}

inline std::vector<std::pair<std::string, CheckFn>> estimator_checks(unsigned threads) {
    std::vector<std::pair<std::string, CheckFn>> out;
    out.emplace_back("estimators.nonlinear_unbiased", [threads] {
        const FockSpace s(8);
        TrialPlan p{amp::VonNeumann{number_op(s), 1.0}, coherent_state(s, 1.0, 1e-4),
                    DetectorSpec(DetectorKind::homodyne, 1.0), EstimatorKind::f_hat_nonlinear, 20000, 5};
        p.threads = threads;
        const auto r = run_nonlinear_estimation(p);
        return below(std::max(std::abs(r.z_mean), std::abs(r.z_variance)), 3.0);
    });
    out.emplace_back("estimators.linear_unbiased", [threads] {
        const FockSpace s(16);
        TrialPlan p{amp::Linear{1.5}, coherent_state(s, 1.0), DetectorSpec(DetectorKind::heterodyne, 1.0),
                    EstimatorKind::n_hat_linear, 20000, 6};
        p.threads = threads;
        const auto r = run_linear_number_estimation(p);
        return below(std::max(std::abs(r.z_mean), std::abs(r.z_variance)), 3.0);
    });
    out.emplace_back("estimators.thread_count_independent", [] {
        const FockSpace s(6);
        TrialPlan p{amp::VonNeumann{number_op(s), 2.0}, fock_state(s, 2), DetectorSpec(DetectorKind::homodyne, 0.8),
                    EstimatorKind::f_hat_nonlinear, 3000, 9};
        p.keep_samples = true;
        p.threads = 1;
        const auto a = run_nonlinear_estimation(p);
        p.threads = 3;
        const auto b = run_nonlinear_estimation(p);
        const bool same = a.samples == b.samples;
        return std::pair<bool, std::string>{same, same ? "identical samples" : "samples differ"};
    });
    out.emplace_back("estimators.snr", [] {
        return below(std::abs(simulated_snr(2, 3.0, 0.0, 4) - snr_report(2, 3.0, 0.0)), 1e-6);
    });
    return out;
}

}  // namespace detail

inline std::vector<CheckResult> verify_checks(const RunConfig& c) {
    std::vector<std::pair<std::string, CheckFn>> all = detail::core_checks();
    for (auto& x : detail::amplifier_checks(c)) all.push_back(std::move(x));
    for (auto& x : detail::measurement_checks()) all.push_back(std::move(x));
    for (auto& x : detail::estimator_checks(c.threads)) all.push_back(std::move(x));
    std::vector<CheckResult> out;
    for (const auto& [name, fn] : all) out.push_back(run_check(name, fn));
    return out;
}

inline CommandOutput cmd_verify(const RunConfig& c) {
    const auto checks = verify_checks(c);
    CommandOutput out;
    std::ostringstream text;
    std::size_t passed = 0, width = 0;
    for (const auto& ch : checks) width = std::max(width, ch.name.size());
    Json list = Json::array();
    for (const auto& ch : checks) {
        passed += ch.pass;
        text << (ch.pass ? "PASS  " : "FAIL  ") << ch.name << std::string(width + 2 - ch.name.size(), ' ') << ch.detail
             << "\n";
        list.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    }
    text << passed << "/" << checks.size() << " checks passed\n";
    out.text = text.str();
    out.exit_code = passed == checks.size() ? kExitOk : kExitCheckFailure;
    out.files.push_back({"verify.json", dump(Json{{"config", to_json(c)}, {"checks", list}})});
    return out;
}

// ---------------------------------------------------------------- noise sweep

inline CommandOutput cmd_noise_sweep(const RunConfig& c) {
    std::ostringstream csv_text;
    io::CsvWriter csv(csv_text, {"g", "variant", "signal_mean", "total_noise", "added_noise"});
    for (double g : c.amplifier.g_list) {
        MomentReport rep;
        if (c.amplifier.variant == "single_mode") {
            rep = single_mode_output_moments(SignalFunction::polynomial(c.amplifier.f.coeffs), g, c.amplifier.r,
                                             build_input(c));
        } else {
            rep = simulated_moments(c, g);
        }
        csv.row() << g << c.amplifier.variant << rep.quad_means.first << rep.amplified_signal_noise + rep.added_noise
                  << rep.added_noise;
    }
    CommandOutput out;
    out.text = csv_text.str();
    out.files.push_back({"noise_sweep.csv", csv_text.str()});
    return out;
}

// ---------------------------------------------------------------- povm

inline PovmModel povm_model(const RunConfig& c) {
    const auto& v = c.amplifier.variant;
    const bool het = c.detector.kind == DetectorKind::heterodyne;
    if (v == "three_mode") {
        if (het) throw ConfigError("detector.kind: three_mode POVM uses homodyne detection");
        return PovmModel::three_mode;
    }
    if (v == "two_mode") {
        if (het && meter_eps2(c) != 1.0) {
            throw ConfigError("amplifier.r: the heterodyne closed form assumes a vacuum meter");
        }
        return het ? PovmModel::heterodyne : PovmModel::homodyne;
    }
    if (v == "von_neumann") {
        if (het) throw ConfigError("detector.kind: von_neumann POVM uses homodyne detection");
        return PovmModel::homodyne;
    }
    throw ConfigError("amplifier.variant: povm needs two_mode, von_neumann or three_mode");
}

inline CommandOutput cmd_povm(const RunConfig& c) {
    const PovmModel model = povm_model(c);
    const double eps2 = meter_eps2(c);
    Json per_gain = Json::array();
    CommandOutput out;
    for (std::size_t k = 0; k < c.amplifier.g_list.size(); ++k) {
        const double g = c.amplifier.g_list[k];
        const AmplifierSpec spec = build_amplifier(c, g);
        validate(spec);
        const auto dec = normal_decompose(signal_operator(spec));
        const auto closed = effective_povm_closed_form(dec, g, c.detector.sigma2(), model, eps2);
        const auto regions = decision_regions(closed);
        const auto coarse = coarse_grain(closed, regions);
        const auto grid = covering_grid(closed, c.povm.radius_widths, c.povm.step_sd);

        Json entry{{"g", g},
                   {"model", to_string(model)},
                   {"width", closed.width},
                   {"regions", regions.size()},
                   {"identity_residual", coarse.identity_residual},
                   {"own_region_weights", coarse.own_weights()}};
        if (c.povm.numeric) {
            double reach = 0.0;
            for (Eigen::Index i = 0; i < dec.size(); ++i) reach = std::max(reach, std::abs(dec.eigenvalues(i)));
            const double squeeze = -0.5 * std::log(eps2);
            const int dm = c.dims.meter > 0 ? c.dims.meter : auto_meter_dim(g, reach, squeeze);
            const std::vector<State> meters(static_cast<std::size_t>(meter_count(spec)),
                                            make_state(FockSpace(dm), meter_prep(c)));
            const std::vector<DetectorSpec> dets(static_cast<std::size_t>(meter_count(spec)), c.detector);
            const auto num = effective_povm_numeric(spec, meters, dets, grid);
            entry["numeric"] = {{"meter_dim", dm},
                                {"grid_points", grid.size()},
                                {"max_off_diagonal", max_off_diagonal(num, dec)},
                                {"max_deviation_from_closed_form", max_povm_deviation(num, closed)},
                                {"min_eigenvalue", num.min_eigenvalue}};
        }
        per_gain.push_back(entry);
        std::ostringstream csv;
        write_povm_csv(csv, closed, grid);
        out.files.push_back({"povm_g" + std::to_string(k) + ".csv", csv.str()});
    }
    const Json summary{{"config", to_json(c)}, {"gains", per_gain}};
    out.text = dump(summary);
    out.files.push_back({"povm_summary.json", out.text});
    return out;
}

// ---------------------------------------------------------------- estimate / compare

inline TrialPlan estimation_plan(const RunConfig& c, double g) {
    const auto& v = c.amplifier.variant;
    TrialPlan p{build_amplifier(c, g), build_input(c), c.detector, EstimatorKind::f_hat_nonlinear, c.trials, c.seed};
    p.threads = c.threads;
    if (v == "linear") {
        if (c.detector.kind != DetectorKind::heterodyne) {
            throw ConfigError("detector.kind: the linear estimator uses heterodyne detection");
        }
        p.estimator = EstimatorKind::n_hat_linear;
        // The shortcut samples the signal's Q function; the idler must be vacuum.
        if (meter_eps2(c) != 1.0) throw ConfigError("amplifier.r: the linear estimator assumes a vacuum idler");
        return p;
    }
    if (v != "two_mode" && v != "von_neumann") {
        throw ConfigError("amplifier.variant: estimate needs linear, two_mode or von_neumann");
    }
    if (c.detector.kind != DetectorKind::homodyne) {
        throw ConfigError("detector.kind: the nonlinear estimator uses homodyne detection");
    }
    p.meters = {meter_prep(c)};
    if (c.sampling == "translate") {
        p.nonlinear_sampling = NonlinearSampling::translate;
    } else if (c.sampling == "auto") {
        // Evolve the meter unless it would exceed the dimension cap.
        try {
            auto_sized_meters(p.amplifier, p.input, p.meters);
        } catch (const TruncationError&) {
            p.nonlinear_sampling = NonlinearSampling::translate;
        }
    }
    return p;
}

inline CommandOutput cmd_estimate(const RunConfig& c) {
    Json reports = Json::array();
    for (double g : c.amplifier.g_list) reports.push_back(report_json(run_estimation(estimation_plan(c, g))));
    CommandOutput out;
    out.text = dump(Json{{"config", to_json(c)}, {"reports", reports}});
    out.files.push_back({"estimate.json", out.text});
    return out;
}

inline CommandOutput cmd_compare(const RunConfig& c) {
    Json rows = Json::array();
    const State input = build_input(c);
    for (double g : c.amplifier.g_list) {
        const auto cmp = compare_schemes(input, g, c.detector.eta, c.trials, c.seed, c.threads);
        rows.push_back({{"g", g},
                        {"linear_gain", cmp.linear_gain},
                        {"improvement", cmp.improvement},
                        {"analytic_improvement", cmp.analytic_improvement},
                        {"nonlinear", report_json(cmp.nonlinear)},
                        {"linear", report_json(cmp.linear)}});
    }
    CommandOutput out;
    out.text = dump(Json{{"config", to_json(c)}, {"comparisons", rows}});
    out.files.push_back({"compare.json", out.text});
    return out;
}

/// Runs a parsed config and maps library errors to exit codes.
inline CommandOutput run_command(const RunConfig& c) {
    try {
        switch (c.command) {
            case Command::verify: return cmd_verify(c);
            case Command::noise_sweep: return cmd_noise_sweep(c);
            case Command::povm: return cmd_povm(c);
            case Command::estimate: return cmd_estimate(c);
            default: return cmd_compare(c);
        }
    } catch (const std::exception& e) {
        CommandOutput out;
        out.exit_code = exit_code_for(e);
        out.error = exception_name(e) + ": " + e.what() + "\n";
        return out;
    }
}

}  // namespace nlamp::cli
