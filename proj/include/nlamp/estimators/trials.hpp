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
#include <functional>
#include <thread>
#include <vector>

#include "nlamp/core.hpp"

namespace nlamp {

/// Sample moments with standard errors; the variance SE uses the fourth central moment.
struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se_mean = 0.0;
    double se_variance = 0.0;
};

inline SampleMoments sample_moments(const std::vector<double>& x) {
    SampleMoments m;
    m.count = x.size();
    if (x.size() < 2) throw Error("need at least two samples for moments");
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    m.mean = sum / n;
    double s2 = 0.0, s4 = 0.0;
    for (double v : x) {
        const double d = (v - m.mean) * (v - m.mean);
        s2 += d;
        s4 += d * d;
    }
    m.variance = s2 / (n - 1.0);
    const double m4 = s4 / n;
    m.se_mean = std::sqrt(m.variance / n);
    m.se_variance = std::sqrt(std::max(0.0, m4 - m.variance * m.variance) / n);
    return m;
}

/// Runs fn(trial, rng) for every trial with stream (seed, trial) and stores the
/// results by trial index, so output does not depend on the thread count.
inline std::vector<double> run_trials(std::size_t trials, std::uint64_t seed, unsigned threads,
                                      const std::function<double(std::size_t, RandomStream&)>& fn) {
    std::vector<double> out(trials);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, trials)));
    const auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            RandomStream rng(seed, t);
            out[t] = fn(t, rng);
        }
    };
    if (threads == 1) {
        work(0, trials);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
        const std::size_t lo = k * chunk, hi = std::min(trials, lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace nlamp
