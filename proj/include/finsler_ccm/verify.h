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

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "finsler_ccm/controller.h"
#include "finsler_ccm/trajectory.h"

namespace finsler_ccm {

/// A sample at which a checked condition failed.
struct Violation {
  Vector x;
  Vector u;
  Vector delta;
  double lhs = 0.0;
  double rhs = 0.0;
  double t = std::numeric_limits<double>::quiet_NaN();  // dissipation only
  int node = -1;                                        // dissipation only
};

struct VerificationReport {
  std::string check;
  int checked_samples = 0;
  std::vector<Violation> violations;
  double max_ratio = 0.0;  // ratio check only; +inf when unbounded
  double ratio_cap = std::numeric_limits<double>::infinity();
  std::vector<std::string> notes;

  bool ratio_unbounded() const { return !(max_ratio < ratio_cap); }
  bool passed() const { return violations.empty() && !ratio_unbounded(); }
};

/// Unit tangents in the kernel of dV/ddelta B at a given state.
using KernelSampler = std::function<std::vector<Vector>(const Vector& x)>;

struct Th1Options {
  Box state_box;
  Box control_box;
  int samples = 1000;
  double kernel_tol = 1e-6;
  double margin_eps = 1e-6;
  std::uint64_t seed = 0;
  /// For single-input systems, search the kernel by root finding along great
  /// circles in delta and along coordinate lines in x.
  bool search_kernel = true;
  /// Explicit kernel parametrization; replaces the search when set.
  KernelSampler kernel_sampler;
};

/// Samples (x, u, delta) with |delta| = 1 and checks
///   dV/ddelta B = 0  =>  dV/dx (f + B u) + dV/ddelta A delta < -alpha(V)
/// with margin `margin_eps` wherever |B^T dV/ddelta| < kernel_tol.
VerificationReport check_th1(const ControlAffineSystem& sys,
                             const FinslerMetric& metric, const RateSpec& rate,
                             const Th1Options& opts);

struct RatioOptions {
  Box state_box;
  double delta_min = 0.1;  // tangents are sampled with |delta| in [min, max]
  double delta_max = 10.0;
  int samples = 1000;
  std::uint64_t seed = 0;
  double cap = 1e9;
};

/// Largest |(dV/dx b_i + dV/ddelta (db_i/dx) delta) / b| over the box
/// vertices plus random samples.
VerificationReport check_ratio_bound(const ControlAffineSystem& sys,
                                     const FinslerMetric& metric,
                                     const RatioOptions& opts);

/// Forward-difference dV/dt at every interior node and step, flagged when it
/// exceeds -alpha(V) + diss_tol. Steps that end on a path replacement are
/// skipped.
VerificationReport dissipation_monitor(const Trajectory& traj, const RateSpec& rate,
                                       double diss_tol);

struct ConvergenceReport {
  double fitted_rate = 0.0;        // -slope of log(energy) on [T/5, T]
  double predicted_rate = 0.0;     // lambda / p
  double overshoot_observed = 0.0; // max_t energy(t) / energy(0)
  double overshoot_bound = 0.0;    // (c2 / c1)^(1/p)
  /// max_t energy(t) / (energy(0) exp(-lambda/p t))
  double envelope_ratio = 0.0;

  bool rate_ok() const { return fitted_rate >= 0.9 * predicted_rate; }
  bool overshoot_ok() const { return overshoot_observed <= 1.05 * overshoot_bound; }
};

/// Throws RateNotExponential unless `rate` is linear, InsufficientSamples for
/// fewer than 10 samples.
ConvergenceReport convergence_report(const Trajectory& traj,
                                     const FinslerMetric& metric,
                                     const RateSpec& rate);

}  // namespace finsler_ccm
