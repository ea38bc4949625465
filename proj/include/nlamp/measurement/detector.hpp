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

#include <string>

#include "nlamp/core/errors.hpp"

namespace nlamp {

enum class DetectorKind { heterodyne, homodyne };

inline std::string to_string(DetectorKind k) { return k == DetectorKind::heterodyne ? "heterodyne" : "homodyne"; }

/// Linear detector with efficiency eta. Inefficiency is modelled as Gaussian
/// smearing of the ideal POVM with parameter sigma2.
struct DetectorSpec {
    DetectorKind kind = DetectorKind::heterodyne;
    double eta = 1.0;

    DetectorSpec() = default;
    DetectorSpec(DetectorKind k, double efficiency) : kind(k), eta(efficiency) {
        if (!(eta > 0.0 && eta <= 1.0)) throw Error("detector efficiency must lie in (0, 1], got " + std::to_string(eta));
    }

    /// (1-eta)/eta for heterodyne, (1-eta)/(4 eta) for homodyne.
    double sigma2() const {
        const double s = (1.0 - eta) / eta;
        return kind == DetectorKind::heterodyne ? s : 0.25 * s;
    }
};

}  // namespace nlamp
