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

#include "nlamp/core/errors.hpp"
#include "nlamp/core/expm.hpp"
#include "nlamp/core/hermite.hpp"
#include "nlamp/core/moments.hpp"
#include "nlamp/core/operators.hpp"
#include "nlamp/core/rng.hpp"
#include "nlamp/core/slot_moments.hpp"
#include "nlamp/core/space.hpp"
#include "nlamp/core/spectral.hpp"
#include "nlamp/core/state.hpp"
#include "nlamp/core/tensor.hpp"
#include "nlamp/core/types.hpp"
