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

#include "finsler_ccm/sampled_loop.h"

#include <cmath>
#include <set>
#include <stdexcept>

namespace finsler_ccm {

SampleSchedule::SampleSchedule(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw std::invalid_argument("sample schedule is empty");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) {
      throw std::invalid_argument("sample times must be finite");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("sample times must be strictly increasing");
    }
  }
}

SampleSchedule SampleSchedule::uniform(double t0, double period, double horizon) {
  if (!(period > 0.0)) throw std::invalid_argument("sample period must be > 0");
  std::vector<double> times;
  const long count = std::lround(std::floor((horizon - t0) / period + 1e-9));
  for (long i = 0; i <= count; ++i) times.push_back(t0 + static_cast<double>(i) * period);
  return SampleSchedule(std::move(times));
}

Trajectory closed_loop_run(const ControlAffineSystem& sys,
                           const FinslerMetric& metric, const RateSpec& rate,
                           const TargetTrajectory& target, const Vector& x0,
                           const SampleSchedule& schedule,
                           const PathUpdatePolicy& policy, const RunOptions& opts) {
  sys.check_state(x0);
  opts.tol.validate();
  if (opts.path_nodes < 2) throw std::invalid_argument("path_nodes must be >= 2");
  if (std::abs(schedule.times().front()) > 1e-12) {
    throw std::invalid_argument("sample schedule must start at the run start t = 0");
  }

  // Step indices at which a sample falls.
  std::set<long> sample_steps;
  for (double ts : schedule.times()) {
    sample_steps.insert(static_cast<long>(std::ceil(ts / opts.dt - 1e-9)));
  }

  DiscretizedPath initial =
      make_straight_path(target.x_star(0.0), x0, opts.path_nodes, opts.tol.reg_eps);

  auto hook = [&](int k, double t, DiscretizedPath& path, Trajectory& traj) {
    if (!sample_steps.contains(k)) return false;
    SampleEvent event;
    event.t = t;
    event.forward_energy = energy_integral(path, metric);
    event.candidate_energy = event.forward_energy;
    if (policy.kind == PathUpdatePolicy::Kind::kLocalShorten) {
      DiscretizedPath candidate =
          shorten_path(path, metric, policy.iters, policy.smoothing, opts.tol.reg_eps);
      event.candidate_energy = energy_integral(candidate, metric);
      if (event.candidate_energy <= event.forward_energy &&
          candidate.is_regular(opts.tol.reg_eps) && candidate.nodes() != path.nodes()) {
        path = std::move(candidate);
        event.adopted = true;
      }
    }
    traj.events.push_back(event);
    return event.adopted;
  };

  return detail::run_forward_images(sys, metric, rate, target, std::move(initial), opts,
                                    hook);
}

}  // namespace finsler_ccm
