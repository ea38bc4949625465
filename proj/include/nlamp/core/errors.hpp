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

#include <stdexcept>
#include <string>

namespace nlamp {

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
   public:
    using Error::Error;
};

class NotHermitian : public Error {
   public:
    explicit NotHermitian(double residual)
        : Error("operator is not Hermitian (residual " + std::to_string(residual) + ")"), residual(residual) {}
    double residual;
};

class NotNormal : public Error {
   public:
    explicit NotNormal(double commutator_norm)
        : Error("operator is not normal (|[f,f^dag]|_max = " + std::to_string(commutator_norm) + ")"),
          commutator_norm(commutator_norm) {}
    double commutator_norm;
};

/// Raised when a state or evolution leaks probability past the Fock cutoff.
class TruncationError : public Error {
   public:
    using Error::Error;
};

class GainOutOfRange : public Error {
   public:
    using Error::Error;
};

/// A POVM grid does not extend far enough around the decision regions.
class CoverageError : public Error {
   public:
    using Error::Error;
};

}  // namespace nlamp
