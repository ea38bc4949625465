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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlamp/amplifiers.hpp"
#include "nlamp/estimators.hpp"
#include "nlamp/io/format.hpp"
#include "nlamp/measurement.hpp"

using namespace nlamp;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[fail] ";
        }
        detail << what << "; ";
    }
};

std::string sci(double v) { return io::format_sci(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Gain-independent half-quantum of added noise for the two-mode amplifier.
void criterion_1(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const FockSpace sa(8);
    std::vector<State> inputs;
    for (int n = 0; n <= 3; ++n) inputs.push_back(fock_state(sa, n));
    inputs.push_back(coherent_state(sa, 0.5));
    double worst = 0.0;
    for (const auto& in : inputs) {
        for (double g : {0.5, 1.0, 2.0, 4.0}) {
            const AmplifierSpec spec = amp::TwoModeNormal{number_op(sa), g};
            const auto meters = auto_sized_meters(spec, in, {state_kind::Fock{0}});
            const auto out = simulate_output_state(spec, in, meters);
            worst = std::max(worst, std::abs(measured_output_moments(spec, out, in).added_noise - 0.5));
        }
    }
    const double t = seconds_since(t0);
    o.require(worst < 1e-6, "max |added - 0.5| = " + sci(worst) + " (bound 1e-6)");
    o.require(t < 10.0, "runtime " + sci(t) + " s (bound 10 s)");
}

// 2. Linear amplifier added noise (g^2-1)/2 at dims (20,20); nonlinear below linear for g > 1.
void criterion_2(Outcome& o) {
    const FockSpace s(20);
    const State vac = vacuum_state(s);
    SimulationOptions opts;
    opts.top_level_tol = 1.0;  // report the truncated result rather than refusing it
    for (double g : {1.25, 1.5, 2.0}) {
        const AmplifierSpec spec = amp::Linear{g};
        const auto out = simulate_output_state(spec, vac, {vac}, opts);
        const double added = measured_output_moments(spec, out, vac).added_noise;
        const double expected = 0.5 * (g * g - 1.0);
        o.require(std::abs(added - expected) < 1e-6,
                  "g=" + sci(g) + ": |added - (g^2-1)/2| = " + sci(std::abs(added - expected)));
        // Nonlinear added noise with a vacuum meter is 1/2 at every gain.
        const AmplifierSpec nl = amp::TwoModeNormal{number_op(FockSpace(8)), g};
        const State in = fock_state(FockSpace(8), 1);
        const double nl_added =
            measured_output_moments(nl, simulate_output_state(nl, in, auto_sized_meters(nl, in, {state_kind::Fock{0}})),
                                    in)
                .added_noise;
        o.require(nl_added < expected, "g=" + sci(g) + ": nonlinear " + sci(nl_added) + " < linear " + sci(expected));
    }
}

// 3. Zassenhaus factorization on the guarded subspace, dims (6,30).
void criterion_3(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int columns = 0;
    for (double g : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        const auto chk = zassenhaus_check(number_op(FockSpace(6)), g, 30);
        worst = std::max(worst, chk.max_deviation);
        columns += chk.columns_compared;
        o.require(chk.columns_compared > 0, "g=" + sci(g) + ": " + std::to_string(chk.columns_compared) + " columns");
    }
    const double t = seconds_since(t0);
    o.require(worst < 1e-8, "max deviation " + sci(worst) + " (bound 1e-8)");
    o.require(t < 5.0, "runtime " + sci(t) + " s (bound 5 s)");
}

// 4. Numeric sandwich vs closed-form POVM, two-mode heterodyne, dim_a = 4.
void criterion_4(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Operator f = number_op(FockSpace(4));
    double worst = 0.0;
    for (double g : {1.0, 2.0}) {
        for (double eta : {1.0, 0.5}) {
            const DetectorSpec det(DetectorKind::heterodyne, eta);
            const auto closed = effective_povm_closed_form(normal_decompose(f), g, det.sigma2(), PovmModel::heterodyne);
            const auto grid = covering_grid(closed, 5.0, 0.25);
            const auto num = effective_povm_numeric(amp::TwoModeNormal{f, g},
                                                    {vacuum_state(FockSpace(auto_meter_dim(g, 3.0)))}, {det}, grid);
            worst = std::max(worst, max_povm_deviation(num, closed));
        }
    }
    const double t = seconds_since(t0);
    o.require(worst < 1e-5, "max elementwise deviation " + sci(worst) + " (bound 1e-5)");
    o.require(t < 60.0, "runtime " + sci(t) + " s (bound 60 s)");
}

// 5. Projective limit: own-region weights at g = 8 and monotone sharpening.
void criterion_5(Outcome& o) {
    const auto dec = normal_decompose(number_op(FockSpace(6)));
    std::vector<double> prev(6, 0.0);
    bool increasing = true;
    std::vector<double> at8;
    for (double g : {1.0, 2.0, 4.0, 8.0}) {
        const auto closed = effective_povm_closed_form(dec, g, 1.0, PovmModel::heterodyne);
        const auto w = coarse_grain(closed, decision_regions(closed)).own_weights();
        for (std::size_t i = 0; i < w.size(); ++i) increasing = increasing && w[i] > prev[i];
        prev = w;
        at8 = w;
    }
    const double worst = *std::min_element(at8.begin(), at8.end());
    o.require(worst >= 1.0 - 3e-5, "min own weight at g=8 is 1 - " + sci(1.0 - worst) + " (bound 1 - 3e-5)");
    o.require(increasing, "own weights strictly increasing over g in {1,2,4,8}");
}

// 6. Three-mode model with squeezed Gaussian meters.
void criterion_6(Outcome& o) {
    const Operator f = rotation_op(FockSpace(4), kPi / 2);  // eigenvalues 1, i, -1, -i
    const auto dec = normal_decompose(f);
    const double g = 1.0;
    for (double r : {0.5, 1.0, 2.0}) {
        const double eps2 = std::exp(-2.0 * r);
        for (double eta : {1.0, 0.5}) {
            const DetectorSpec det(DetectorKind::homodyne, eta);
            const double s2 = det.sigma2();
            const auto closed = effective_povm_closed_form(dec, g, s2, PovmModel::three_mode, eps2);
            o.require(closed.width < (s2 + 1.0) / (g * g),
                      "r=" + sci(r) + " eta=" + sci(eta) + ": width " + sci(closed.width) + " < " + sci(s2 + 1.0));
            // The meters are truncated to dim 20 whatever tail that leaves.
            const State m = gaussian_meter_state(FockSpace(20), std::exp(-r), 1.0);
            const auto num =
                effective_povm_numeric(amp::ThreeMode{f, g}, {m, m}, {det, det}, covering_grid(closed, 5.0, 0.35));
            const double dev = max_povm_deviation(num, closed);
            o.require(dev < 1e-4, "r=" + sci(r) + " eta=" + sci(eta) + ": numeric deviation " + sci(dev) +
                                      " (bound 1e-4, meter tail " + sci(m.tail_mass()) + ")");
        }
    }
}

// 7. Estimator variances from 1e5 seeded trials.
void criterion_7(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, State>> inputs{{"fock(2)", fock_state(FockSpace(8), 2)},
                                                            {"coherent(sqrt2)", coherent_state(FockSpace(24), std::sqrt(2.0))}};
    double worst = 0.0;
    for (const auto& [name, in] : inputs) {
        const FockSpace sa(in.dims().front());
        for (double g : {1.0, 2.0, 3.0}) {
            TrialPlan lin{amp::Linear{g}, in, DetectorSpec(DetectorKind::heterodyne, 1.0), EstimatorKind::n_hat_linear,
                          100000, 42};
            TrialPlan nl{amp::VonNeumann{number_op(sa), g}, in, DetectorSpec(DetectorKind::homodyne, 1.0),
                         EstimatorKind::f_hat_nonlinear, 100000, 42};
            const auto rl = run_linear_number_estimation(lin);
            const auto rn = run_nonlinear_estimation(nl);
            const double n = expectation(in, number_op(sa)).real();
            const double var_n = variance(in, number_op(sa));
            const bool lin_formula = std::abs(rl.analytic_variance - (var_n + n + 1.0)) < 1e-9;
            const bool nl_formula = std::abs(rn.analytic_variance - (var_n + 1.0 / (4 * g * g))) < 1e-9;
            worst = std::max({worst, std::abs(rl.z_variance), std::abs(rn.z_variance)});
            o.require(lin_formula && nl_formula && rl.variance_within(3.0) && rn.variance_within(3.0),
                      name + " g=" + sci(g) + ": z(n_hat)=" + sci(rl.z_variance) + " z(f_hat)=" + sci(rn.z_variance));
        }
    }
    const double t = seconds_since(t0);
    o.require(worst <= 3.0, "max |z| " + sci(worst) + " (bound 3)");
    o.require(t < 30.0, "runtime " + sci(t) + " s (bound 30 s)");
}

// 8. E|alpha|^2 = g^2 <n> + g^2 from heterodyne samples of the simulated output.
void criterion_8(Outcome& o) {
    const State in = coherent_state(FockSpace(40), 0.5);
    for (double g : {1.0, 1.5}) {
        TrialPlan p{amp::Linear{g}, in, DetectorSpec(DetectorKind::heterodyne, 1.0), EstimatorKind::n_hat_linear,
                    100000, 42};
        p.linear_sampling = LinearSampling::full;
        p.linear_idler_dim = 40;
        p.keep_samples = true;
        const auto r = run_linear_number_estimation(p);
        std::vector<double> abs2;
        for (double v : r.samples) abs2.push_back(g * g * (v + 1.0));
        const auto m = sample_moments(abs2);
        const double expected = g * g * 0.25 + g * g;
        const double z = (m.mean - expected) / m.se_mean;
        o.require(std::abs(z) <= 3.0, "g=" + sci(g) + ": mean |alpha|^2 " + sci(m.mean) + " vs " + sci(expected) +
                                          ", z=" + sci(z));
    }
}

// 9. Single-mode amplifier with f(x) = x^2, r = 3, dim 48.
void criterion_9(Outcome& o) {
    const FockSpace s(48);
    const auto fx = SignalFunction::polynomial({0.0, 0.0, 1.0});
    const double r = 3.0;
    const auto x = quadrature_ops(s).first;
    double mean_err = 0.0, comm = 0.0, worst_ratio = 0.0;
    for (double g : {0.5, 1.0, 2.0}) {
        for (const auto& in : {vacuum_state(s), fock_state(s, 2), coherent_state(s, cplx(0.4, 0.0)),
                               coherent_state(s, cplx(1.5, 1.0))}) {
            const auto rep = single_mode_output_moments(fx, g, r, in);
            mean_err = std::max(mean_err, std::abs(rep.quad_means.first - std::exp(r) * expectation(in, x).real()));
            const auto ops = single_mode_output_ops(fx, g, r, s);
            const double dp = std::abs(rep.quad_noises.second - 2 * g * g * variance(in, ops.signal));
            worst_ratio = std::max(worst_ratio, dp / (5 * g * std::exp(-r)));
        }
        const auto ops = single_mode_output_ops(fx, g, r, s);
        const CMatrix c = commutator(ops.a_out, ops.a_out.adjoint()).matrix - CMatrix::Identity(48, 48);
        comm = std::max(comm, guarded_max_abs(c, {48}));
    }
    o.require(mean_err < 1e-6, "max |<x_out> - e^r <x_in>| " + sci(mean_err) + " (bound 1e-6)");
    o.require(worst_ratio <= 1.0, "max |Var p_out - 2g^2 Var f| / (5 g e^-r) = " + sci(worst_ratio));
    o.require(comm < 1e-7, "guarded commutator residual " + sci(comm) + " (bound 1e-7)");
}

// 10. Quadratic normality gate vs brute-force commutator.
void criterion_10(Outcome& o) {
    const FockSpace s(12);
    struct Named {
        const char* name;
        cplx a, b, c, d;
        bool normal;
    };
    const std::vector<Named> fixed{{"f+", 0.5, 1.0, 0.5, 0.5, true},
                                   {"f-", -0.5, 1.0, -0.5, 0.5, true},
                                   {"a^dag a", 0.0, 1.0, 0.0, 0.0, true},
                                   {"diagonal", 0.0, cplx(2, 1), 0.0, cplx(0, 7), true},
                                   {"(1,0,0,0)", 1.0, 0.0, 0.0, 0.0, false},
                                   {"(1,1,0,0)", 1.0, 1.0, 0.0, 0.0, false}};
    for (const auto& n : fixed) {
        o.require(quadratic_signal_op(s, n.a, n.b, n.c, n.d).is_normal == n.normal,
                  std::string(n.name) + (n.normal ? " normal" : " not normal"));
    }
    // Levels 0..8 only touch levels <= 10, so the guarded commutator is the untruncated one.
    const CMatrix p = low_level_projector(12, 9);
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
    int agree = 0;
    for (int k = 0; k < 50; ++k) {
        cplx al, be, ga;
        if (k % 2 == 0) {
            const double m = std::abs(nd(rng)), pa = phase(rng), pg = phase(rng);
            al = std::polar(m, pa);
            ga = std::polar(m, pg);
            be = std::polar(nd(rng), 0.5 * (pa + pg));
        } else {
            al = cplx(nd(rng), nd(rng));
            be = cplx(nd(rng), nd(rng));
            ga = cplx(nd(rng), nd(rng));
        }
        const auto q = quadratic_signal_op(s, al, be, ga, cplx(nd(rng), nd(rng)), 1e-9);
        const CMatrix c = q.op.matrix * q.op.matrix.adjoint() - q.op.matrix.adjoint() * q.op.matrix;
        agree += q.is_normal == (max_abs(p * c * p) < 1e-8);
    }
    o.require(agree == 50, std::to_string(agree) + "/50 random cases agree with the brute-force check");
}

}  // namespace

int main() {
    const std::vector<std::function<void(Outcome&)>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                              criterion_5, criterion_6, criterion_7, criterion_8,
                                                              criterion_9, criterion_10};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            criteria[k](o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
