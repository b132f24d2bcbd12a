// Copyright 2026 The finsler_ccm Authors
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

#include <string>
#include <vector>

#include "finsler_ccm/numerics.h"

namespace finsler_ccm {

/// One recorded instant of an open- or closed-loop run.
struct TrajectorySample {
  double t = 0.0;
  Vector state;    // path end point c(t, 1)
  Vector control;  // control applied from t on, k_p at s = 1
  double energy = 0.0;  // integral of V(c, c_s)^(1/p)
  double length = 0.0;  // integral of F(c, c_s), an upper bound on d(x*, x)
  std::vector<double> node_values;  // V(c(t, s_j), c_s(t, s_j))
  bool path_replaced = false;  // a new path was adopted at this instant
};

/// Outcome of a path replacement attempt at a sample time.
struct SampleEvent {
  double t = 0.0;
  double forward_energy = 0.0;
  double candidate_energy = 0.0;
  bool adopted = false;
};

enum class Termination { kCompleted, kConditionViolated };

struct Trajectory {
  int state_dim = 0;
  int input_dim = 0;
  std::vector<TrajectorySample> samples;
  std::vector<SampleEvent> events;  // closed loop only
  bool boundary_touched = false;
  bool regularity_lost = false;
  Termination termination = Termination::kCompleted;
  std::string diagnostic;

  bool empty() const { return samples.empty(); }
  const TrajectorySample& back() const { return samples.back(); }
};

}  // namespace finsler_ccm
