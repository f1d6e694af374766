// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sensel/error.hpp"
#include "sensel/examples.hpp"
#include "sensel/filter.hpp"
#include "sensel/linalg.hpp"
#include "sensel/lp.hpp"
#include "sensel/measure.hpp"
#include "sensel/model.hpp"
#include "sensel/parallel.hpp"
#include "sensel/problem.hpp"
#include "sensel/rng.hpp"
#include "sensel/scenario_io.hpp"
#include "sensel/sdp.hpp"
#include "sensel/select_lp.hpp"
#include "sensel/select_sdr.hpp"
#include "sensel/select_separable.hpp"
#include "sensel/sim.hpp"
