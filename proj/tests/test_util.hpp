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

#include <random>

#include "nlamp/core.hpp"

namespace nlamp::testing {

inline CMatrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = cplx(nd(rng), nd(rng));
    }
    return m;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n) {
    const CMatrix m = random_matrix(rng, n);
    return 0.5 * (m + m.adjoint());
}

inline CMatrix random_unitary(std::mt19937_64& rng, int n) {
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

inline CVector random_ket(std::mt19937_64& rng, int n, int support) {
    std::normal_distribution<double> nd;
    CVector v = CVector::Zero(n);
    for (int i = 0; i < support; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

/// Poisson photon-number moments of a coherent state, summed directly.
struct PoissonMoments {
    double mean = 0.0;
    double variance = 0.0;
};
inline PoissonMoments poisson_moments(double mean_photons, int terms) {
    double p = std::exp(-mean_photons), m1 = 0.0, m2 = 0.0;
    for (int n = 0; n < terms; ++n) {
        if (n > 0) p *= mean_photons / n;
        m1 += n * p;
        m2 += double(n) * n * p;
    }
    return {m1, m2 - m1 * m1};
}

}  // namespace nlamp::testing
