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

#include <vector>

#include "finsler_ccm/controller.h"

namespace finsler_ccm {

/// Times at which the state is measured and the path may be replaced.
class SampleSchedule {
 public:
  /// `times` must be strictly increasing; the first entry is the run start.
  explicit SampleSchedule(std::vector<double> times);
  /// t0, t0 + period, ... up to and including the horizon.
  static SampleSchedule uniform(double t0, double period, double horizon);

  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

struct PathUpdatePolicy {
  enum class Kind { kKeepForwardImage, kLocalShorten };
  Kind kind = Kind::kKeepForwardImage;
  int iters = 20;
  double smoothing = 0.5;

  static PathUpdatePolicy keep_forward_image() { return {}; }
  static PathUpdatePolicy local_shorten(int iters) {
    return {Kind::kLocalShorten, iters, 0.5};
  }
};

/// Sampled-data controller. Between sample times the open-loop forward-image
/// construction runs unchanged. At each sample time the policy proposes a new
/// path; it is adopted only if its energy integral does not exceed that of
/// the forward image at the same instant. Sample times are snapped to the
/// first step of the time grid at or after them.
Trajectory closed_loop_run(const ControlAffineSystem& sys,
                           const FinslerMetric& metric, const RateSpec& rate,
                           const TargetTrajectory& target, const Vector& x0,
                           const SampleSchedule& schedule,
                           const PathUpdatePolicy& policy, const RunOptions& opts);

}  // namespace finsler_ccm
