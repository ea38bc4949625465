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
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlamp/amplifiers.hpp"
#include "nlamp/measurement.hpp"

namespace nlamp::cli {

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range configuration. what() names the offending field.
class ConfigError : public Error {
   public:
    using Error::Error;
};

enum class Command { verify, noise_sweep, povm, estimate, compare };

inline std::string to_string(Command c) {
    switch (c) {
        case Command::verify: return "verify";
        case Command::noise_sweep: return "noise-sweep";
        case Command::povm: return "povm";
        case Command::estimate: return "estimate";
        default: return "compare";
    }
}

inline Command parse_command(const std::string& s) {
    if (s == "verify") return Command::verify;
    if (s == "noise-sweep") return Command::noise_sweep;
    if (s == "povm") return Command::povm;
    if (s == "estimate") return Command::estimate;
    if (s == "compare") return Command::compare;
    throw ConfigError("command: unknown command '" + s + "'");
}

/// f descriptor: a_dag_a | parity | quadratic(alpha, beta, gamma, delta) | poly_x(coeffs).
struct SignalConfig {
    std::string kind = "a_dag_a";
    cplx alpha{0.0, 0.0}, beta{0.0, 0.0}, gamma{0.0, 0.0}, delta{0.0, 0.0};
    std::vector<double> coeffs;
};

struct AmplifierConfig {
    std::string variant = "two_mode";  // linear | two_mode | von_neumann | three_mode | single_mode
    SignalConfig f;
    std::vector<double> g_list{0.5, 1.0, 2.0, 4.0};
    double r = 0.0;        // meter squeeze; the amplifier squeeze for single_mode
    double epsilon = 1.0;  // Gaussian meter width (1 = vacuum)
};

struct InputConfig {
    std::string kind = "fock";  // fock | coherent | squeezed
    int n = 1;
    cplx alpha{0.0, 0.0};
    double r = 0.0;
    double phi = 0.0;
};

struct DimsConfig {
    int signal = 8;
    int meter = 0;  // 0: sized automatically
};

struct PovmConfig {
    double radius_widths = 5.0;
    double step_sd = 0.25;
    bool numeric = true;
};

struct RunConfig {
    Command command = Command::verify;
    AmplifierConfig amplifier;
    InputConfig input;
    DetectorSpec detector{DetectorKind::homodyne, 1.0};
    DimsConfig dims;
    std::size_t trials = 100000;
    std::uint64_t seed = 42;
    std::string sampling = "auto";  // auto | evolve | translate (nonlinear estimator)
    PovmConfig povm;
    unsigned threads = 0;
    std::string output;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw ConfigError((where.empty() ? "" : where + ".") + key + ": unknown key");
    }
}

inline double get_number(const Json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field + ": must be finite");
    return d;
}

inline int get_int(const Json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
    return v.get<int>();
}

inline cplx get_complex(const Json& v, const std::string& field) {
    if (v.is_number()) return {get_number(v, field), 0.0};
    if (v.is_array() && v.size() == 2) return {get_number(v[0], field), get_number(v[1], field)};
    throw ConfigError(field + ": expected a number or [re, im]");
}

inline Json complex_json(cplx c) { return Json::array({c.real(), c.imag()}); }

inline std::string get_string(const Json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field + ": expected a string");
    return v.get<std::string>();
}

}  // namespace detail

/// Range checks that need no numerics; everything else surfaces from the library.
inline void check_ranges(const RunConfig& c) {
    const auto& a = c.amplifier;
    static const std::set<std::string> variants{"linear", "two_mode", "von_neumann", "three_mode", "single_mode"};
    if (!variants.count(a.variant)) throw ConfigError("amplifier.variant: unknown variant '" + a.variant + "'");
    static const std::set<std::string> kinds{"a_dag_a", "parity", "quadratic", "poly_x"};
    if (!kinds.count(a.f.kind)) throw ConfigError("amplifier.f.kind: unknown signal '" + a.f.kind + "'");
    if (a.f.kind == "poly_x" && a.f.coeffs.empty()) throw ConfigError("amplifier.f.coeffs: need at least one coefficient");
    if (a.variant == "single_mode" && a.f.kind != "poly_x") {
        throw ConfigError("amplifier.f.kind: single_mode needs a poly_x signal");
    }
    if (a.g_list.empty()) throw ConfigError("amplifier.g: need at least one gain");
    for (double g : a.g_list) {
        if (a.variant == "linear" && !(g >= 1.0)) {
            throw ConfigError("amplifier.g: linear amplifier needs g >= 1, got " + io::format_sci(g));
        }
        if (!(g >= 0.0)) throw ConfigError("amplifier.g: gain must be >= 0, got " + io::format_sci(g));
        const bool needs_positive = c.command == Command::povm || c.command == Command::estimate ||
                                    c.command == Command::compare;
        if (needs_positive && !(g > 0.0)) throw ConfigError("amplifier.g: " + to_string(c.command) + " needs g > 0");
    }
    if (a.r < 0.0) throw ConfigError("amplifier.r: must be >= 0");
    if (!(a.epsilon > 0.0)) throw ConfigError("amplifier.epsilon: must be > 0");
    if (a.epsilon != 1.0 && a.r != 0.0 && a.variant != "single_mode") {
        throw ConfigError("amplifier.epsilon: give either a meter squeeze r or a width epsilon, not both");
    }
    static const std::set<std::string> inputs{"fock", "coherent", "squeezed"};
    if (!inputs.count(c.input.kind)) throw ConfigError("input.kind: unknown input '" + c.input.kind + "'");
    if (c.input.n < 0 || c.input.n >= c.dims.signal) throw ConfigError("input.n: outside the signal dimension");
    if (c.input.r < 0.0) throw ConfigError("input.r: must be >= 0");
    if (c.dims.signal < 2) throw ConfigError("dims.signal: must be >= 2");
    if (c.dims.meter != 0 && c.dims.meter < 2) throw ConfigError("dims.meter: must be 0 (auto) or >= 2");
    if (c.dims.meter > kMaxMeterDim) throw ConfigError("dims.meter: above the cap " + std::to_string(kMaxMeterDim));
    if ((c.command == Command::estimate || c.command == Command::compare) && c.trials < 2) {
        throw ConfigError("trials: need at least 2");
    }
    if (c.sampling != "auto" && c.sampling != "evolve" && c.sampling != "translate") {
        throw ConfigError("sampling: expected auto, evolve or translate");
    }
    if (!(c.povm.radius_widths > 0.0)) throw ConfigError("povm.radius_widths: must be > 0");
    if (!(c.povm.step_sd > 0.0)) throw ConfigError("povm.step_sd: must be > 0");
}

/// Parses a config document; every level rejects unknown keys. A report
/// (anything with an embedded "config" object) is re-run from that config.
inline RunConfig parse_config(const Json& j) {
    using namespace detail;
    if (j.is_object() && j.contains("config") && j["config"].is_object()) return parse_config(j["config"]);
    RunConfig c;
    reject_unknown(j, "", {"command", "amplifier", "input", "detector", "dims", "trials", "seed", "sampling", "povm",
                           "threads", "output"});
    if (j.contains("command")) c.command = parse_command(get_string(j["command"], "command"));

    if (j.contains("amplifier")) {
        const Json& a = j["amplifier"];
        reject_unknown(a, "amplifier", {"variant", "f", "g", "r", "epsilon"});
        if (a.contains("variant")) c.amplifier.variant = get_string(a["variant"], "amplifier.variant");
        if (a.contains("f")) {
            const Json& f = a["f"];
            reject_unknown(f, "amplifier.f", {"kind", "alpha", "beta", "gamma", "delta", "coeffs"});
            auto& s = c.amplifier.f;
            if (f.contains("kind")) s.kind = get_string(f["kind"], "amplifier.f.kind");
            if (f.contains("alpha")) s.alpha = get_complex(f["alpha"], "amplifier.f.alpha");
            if (f.contains("beta")) s.beta = get_complex(f["beta"], "amplifier.f.beta");
            if (f.contains("gamma")) s.gamma = get_complex(f["gamma"], "amplifier.f.gamma");
            if (f.contains("delta")) s.delta = get_complex(f["delta"], "amplifier.f.delta");
            if (f.contains("coeffs")) {
                if (!f["coeffs"].is_array()) throw ConfigError("amplifier.f.coeffs: expected an array");
                s.coeffs.clear();
                for (const auto& v : f["coeffs"]) s.coeffs.push_back(get_number(v, "amplifier.f.coeffs"));
            }
        }
        if (a.contains("g")) {
            c.amplifier.g_list.clear();
            if (a["g"].is_array()) {
                for (const auto& v : a["g"]) c.amplifier.g_list.push_back(get_number(v, "amplifier.g"));
            } else {
                c.amplifier.g_list.push_back(get_number(a["g"], "amplifier.g"));
            }
        }
        if (a.contains("r")) c.amplifier.r = get_number(a["r"], "amplifier.r");
        if (a.contains("epsilon")) c.amplifier.epsilon = get_number(a["epsilon"], "amplifier.epsilon");
    }

    if (j.contains("input")) {
        const Json& in = j["input"];
        reject_unknown(in, "input", {"kind", "n", "alpha", "r", "phi"});
        if (in.contains("kind")) c.input.kind = get_string(in["kind"], "input.kind");
        if (in.contains("n")) c.input.n = get_int(in["n"], "input.n");
        if (in.contains("alpha")) c.input.alpha = get_complex(in["alpha"], "input.alpha");
        if (in.contains("r")) c.input.r = get_number(in["r"], "input.r");
        if (in.contains("phi")) c.input.phi = get_number(in["phi"], "input.phi");
    }

    if (j.contains("detector")) {
        const Json& d = j["detector"];
        reject_unknown(d, "detector", {"kind", "eta"});
        DetectorKind kind = c.detector.kind;
        double eta = c.detector.eta;
        if (d.contains("kind")) {
            const auto k = get_string(d["kind"], "detector.kind");
            if (k == "heterodyne") {
                kind = DetectorKind::heterodyne;
            } else if (k == "homodyne") {
                kind = DetectorKind::homodyne;
            } else {
                throw ConfigError("detector.kind: expected heterodyne or homodyne");
            }
        }
        if (d.contains("eta")) eta = get_number(d["eta"], "detector.eta");
        if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("detector.eta: must lie in (0, 1]");
        c.detector = DetectorSpec(kind, eta);
    }

    if (j.contains("dims")) {
        const Json& d = j["dims"];
        reject_unknown(d, "dims", {"signal", "meter"});
        if (d.contains("signal")) c.dims.signal = get_int(d["signal"], "dims.signal");
        if (d.contains("meter")) c.dims.meter = get_int(d["meter"], "dims.meter");
    }

    if (j.contains("trials")) {
        if (!j["trials"].is_number_integer() || j["trials"].get<long long>() < 0) {
            throw ConfigError("trials: expected a non-negative integer");
        }
        c.trials = j["trials"].get<std::size_t>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected an unsigned 64-bit integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("sampling")) c.sampling = get_string(j["sampling"], "sampling");
    if (j.contains("povm")) {
        const Json& p = j["povm"];
        reject_unknown(p, "povm", {"radius_widths", "step_sd", "numeric"});
        if (p.contains("radius_widths")) c.povm.radius_widths = get_number(p["radius_widths"], "povm.radius_widths");
        if (p.contains("step_sd")) c.povm.step_sd = get_number(p["step_sd"], "povm.step_sd");
        if (p.contains("numeric")) {
            if (!p["numeric"].is_boolean()) throw ConfigError("povm.numeric: expected true or false");
            c.povm.numeric = p["numeric"].get<bool>();
        }
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_unsigned()) throw ConfigError("threads: expected a non-negative integer");
        c.threads = j["threads"].get<unsigned>();
    }
    if (j.contains("output")) c.output = get_string(j["output"], "output");
    check_ranges(c);
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
    }
    return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Fully resolved config. Thread count and output location are left out: they
/// do not change any result, so reports stay byte-identical across machines.
inline Json to_json(const RunConfig& c) {
    using detail::complex_json;
    Json f{{"kind", c.amplifier.f.kind}};
    if (c.amplifier.f.kind == "quadratic") {
        f["alpha"] = complex_json(c.amplifier.f.alpha);
        f["beta"] = complex_json(c.amplifier.f.beta);
        f["gamma"] = complex_json(c.amplifier.f.gamma);
        f["delta"] = complex_json(c.amplifier.f.delta);
    }
    if (c.amplifier.f.kind == "poly_x") f["coeffs"] = c.amplifier.f.coeffs;
    Json input{{"kind", c.input.kind}};
    if (c.input.kind == "fock") input["n"] = c.input.n;
    if (c.input.kind == "coherent") input["alpha"] = complex_json(c.input.alpha);
    if (c.input.kind == "squeezed") {
        input["r"] = c.input.r;
        input["phi"] = c.input.phi;
    }
    return Json{{"command", to_string(c.command)},
                {"amplifier",
                 {{"variant", c.amplifier.variant},
                  {"f", f},
                  {"g", c.amplifier.g_list},
                  {"r", c.amplifier.r},
                  {"epsilon", c.amplifier.epsilon}}},
                {"input", input},
                {"detector", {{"kind", nlamp::to_string(c.detector.kind)}, {"eta", c.detector.eta}}},
                {"dims", {{"signal", c.dims.signal}, {"meter", c.dims.meter}}},
                {"trials", c.trials},
                {"seed", c.seed},
                {"sampling", c.sampling},
                {"povm",
                 {{"radius_widths", c.povm.radius_widths}, {"step_sd", c.povm.step_sd}, {"numeric", c.povm.numeric}}}};
}

// ---------------------------------------------------------------- model construction

inline Operator build_signal(const SignalConfig& s, int dim) {
    const FockSpace sp(dim);
    if (s.kind == "a_dag_a") return number_op(sp);
    if (s.kind == "parity") return parity_op(sp);
    if (s.kind == "quadratic") return quadratic_signal_op(sp, s.alpha, s.beta, s.gamma, s.delta).op;
    // poly_x: functional calculus on the truncated position operator.
    const auto fn = SignalFunction::polynomial(s.coeffs);
    const auto basis = quadrature_basis(dim);
    RVector vals(dim);
    for (int k = 0; k < dim; ++k) vals(k) = fn(basis->nodes(k));
    const RMatrix m = basis->vectors * vals.asDiagonal() * basis->vectors.transpose();
    return {sp, m.cast<cplx>()};
}

inline AmplifierSpec build_amplifier(const RunConfig& c, double g) {
    const auto& a = c.amplifier;
    if (a.variant == "linear") return amp::Linear{g};
    if (a.variant == "single_mode") return amp::SingleMode{SignalFunction::polynomial(a.f.coeffs), g, a.r};
    const Operator f = build_signal(a.f, c.dims.signal);
    if (a.variant == "two_mode") return amp::TwoModeNormal{f, g};
    if (a.variant == "von_neumann") return amp::VonNeumann{f, g};
    return amp::ThreeMode{f, g};
}

inline State build_input(const RunConfig& c) {
    const FockSpace sp(c.dims.signal);
    if (c.input.kind == "fock") return fock_state(sp, c.input.n);
    if (c.input.kind == "coherent") return coherent_state(sp, c.input.alpha);
    return squeezed_vacuum_state(sp, c.input.r, c.input.phi);
}

/// Meter preparation: Gaussian of width epsilon, squeezed vacuum r, or vacuum.
inline StateDescriptor meter_prep(const RunConfig& c) {
    if (c.amplifier.epsilon != 1.0) return state_kind::GaussianMeter{c.amplifier.epsilon};
    if (c.amplifier.r > 0.0) return state_kind::SqueezedVacuum{c.amplifier.r, 0.0};
    return state_kind::Fock{0};
}

/// Twice the meter x variance: 1 for vacuum, e^{-2r} squeezed, epsilon^2 Gaussian.
inline double meter_eps2(const RunConfig& c) {
    if (c.amplifier.epsilon != 1.0) return c.amplifier.epsilon * c.amplifier.epsilon;
    return std::exp(-2.0 * c.amplifier.r);
}

inline std::vector<State> build_meters(const RunConfig& c, const AmplifierSpec& spec, const State& input) {
    const std::vector<StateDescriptor> preps(static_cast<std::size_t>(meter_count(spec)), meter_prep(c));
    if (c.dims.meter == 0) return auto_sized_meters(spec, input, preps);
    std::vector<State> out;
    for (const auto& p : preps) out.push_back(make_state(FockSpace(c.dims.meter), p));
    return out;
}

}  // namespace nlamp::cli
