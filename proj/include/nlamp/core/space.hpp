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

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nlamp/core/errors.hpp"

namespace nlamp {

/// A single truncated bosonic mode holding Fock levels 0..dim-1.
///
/// Conventions are fixed library-wide: hbar = 1, x = (a + a^dag)/sqrt(2),
/// p = -i(a - a^dag)/sqrt(2), so [x, p] = i away from the cutoff.
struct FockSpace {
    int dim = 2;

    explicit FockSpace(int d) : dim(d) {
        if (d < 2) throw DimensionMismatch("Fock space needs dim >= 2, got " + std::to_string(d));
    }

    friend bool operator==(const FockSpace&, const FockSpace&) = default;
};

/// Ordered per-mode dimensions of a composite space. Mode 0 is the most
/// significant index, matching Kronecker products A (x) B (x) ...
using Dims = std::vector<int>;

inline std::size_t total_dim(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string dims_to_string(const Dims& dims) {
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(dims[i]);
    }
    return s + ")";
}

/// Number of low-lying levels on which truncated identities are trusted:
/// the top ceil(dim/4) levels are excluded.
inline int guarded_levels(int dim) { return dim - (dim + 3) / 4; }

/// Decomposes a flat composite index into per-mode indices.
inline std::vector<int> unravel(std::size_t index, const Dims& dims) {
    std::vector<int> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        idx[k] = static_cast<int>(index % static_cast<std::size_t>(dims[k]));
        index /= static_cast<std::size_t>(dims[k]);
    }
    return idx;
}

/// True when every mode index of the flat index lies in that mode's guarded range.
inline bool in_guarded_subspace(std::size_t index, const Dims& dims) {
    const auto idx = unravel(index, dims);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (idx[k] >= guarded_levels(dims[k])) return false;
    }
    return true;
}

}  // namespace nlamp
