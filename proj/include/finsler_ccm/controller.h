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

#include <functional>
#include <optional>

#include "finsler_ccm/geometry.h"
#include "finsler_ccm/metrics.h"
#include "finsler_ccm/systems.h"
#include "finsler_ccm/trajectory.h"

namespace finsler_ccm {

/// The decay rate alpha(V) demanded of the differential storage function.
class RateSpec {
 public:
  enum class Kind { kZero, kLinear, kClassK };

  static RateSpec zero();
  /// alpha(V) = lambda V, lambda > 0.
  static RateSpec linear(double lambda);
  /// alpha = fn, which must vanish at 0 and increase strictly; checked on a
  /// grid of sample points.
  static RateSpec class_k(std::function<double(double)> fn);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double operator()(double v) const;

 private:
  RateSpec(Kind kind, double lambda, std::function<double(double)> fn)
      : kind_(kind), lambda_(lambda), fn_(std::move(fn)) {}

  Kind kind_;
  double lambda_;
  std::function<double(double)> fn_;
};

/// How rho is chosen when a < 0. kSontagSmooth uses the universal formula
/// whenever b > b_eps; kPaperPiecewise zeroes rho as soon as a < 0.
enum class RhoVariant { kSontagSmooth, kPaperPiecewise };

struct ABValues {
  double a;
  double b;
};

/// a = dV/dx (f + B u) + dV/ddelta A delta + alpha(V),
/// b = dV/ddelta B B^T dV/ddelta^T.
ABValues eval_ab(const ControlAffineSystem& sys, const FinslerMetric& metric,
                 const RateSpec& rate, const Vector& x, const Vector& delta,
                 const Vector& u);

/// The gain rho(a, b) >= 0. Throws ConditionViolated when b <= b_eps while
/// a >= b_eps.
double eval_rho(double a, double b, RhoVariant variant, double b_eps);

/// k_delta = -rho B^T dV/ddelta^T. The degeneracy thresholds apply to a and b
/// divided by |dV/ddelta|^2.
Vector eval_k_delta(const ControlAffineSystem& sys, const FinslerMetric& metric,
                    const RateSpec& rate, const Vector& x, const Vector& delta,
                    const Vector& u, RhoVariant variant, double b_eps = 1e-12);

/// v(s_j) along a path: the solution of dv/ds = k_delta(c(s), c_s(s), v),
/// v(0) = u*.
struct ControlProfile {
  Grid1D grid;
  std::vector<Vector> values;
  /// dv/ds at each node, i.e. k_delta(c(s_j), c_s(s_j), v(s_j)).
  std::vector<Vector> slopes;
};

/// Differential feedback (x, delta, u) -> du/ds.
using DifferentialFeedback =
    std::function<Vector(const Vector& x, const Vector& delta, const Vector& u)>;

/// RK4 march in s over the path grid for an arbitrary differential feedback.
/// Path values between nodes come from cubic Hermite interpolation of the
/// nodes and tangents.
ControlProfile integrate_control_profile(const DiscretizedPath& path,
                                         const Vector& u_star,
                                         const DifferentialFeedback& feedback);

ControlProfile integrate_kp(const ControlAffineSystem& sys,
                            const FinslerMetric& metric, const RateSpec& rate,
                            const DiscretizedPath& path, const Vector& u_star,
                            RhoVariant variant, const ToleranceConfig& tol = {});

struct ForwardImage {
  DiscretizedPath path;
  Vector applied_control;
  ControlProfile profile;
  bool regularity_lost = false;
  bool boundary_touched = false;
};

/// Advances every node of `path` by one RK4 step of length dt under its own
/// control v(s_j), holding the profile fixed over the step. Tangents follow
/// the differential dynamics c_s' = A c_s + B dv/ds.
ForwardImage propagate_forward_image(const ControlAffineSystem& sys,
                                     const FinslerMetric& metric,
                                     const RateSpec& rate,
                                     const DiscretizedPath& path,
                                     const Vector& u_star_t, double dt,
                                     RhoVariant variant,
                                     const ToleranceConfig& tol = {});

struct RunOptions {
  double horizon = 5.0;
  double dt = 0.01;
  int path_nodes = 50;
  RhoVariant variant = RhoVariant::kSontagSmooth;
  ToleranceConfig tol;
};

/// Builds the straight path x*(0) -> x0 and repeatedly propagates its forward
/// image up to the horizon. A ConditionViolated during the run ends it early;
/// the partial trajectory carries the diagnostic.
Trajectory open_loop_run(const ControlAffineSystem& sys,
                         const FinslerMetric& metric, const RateSpec& rate,
                         const TargetTrajectory& target, const Vector& x0,
                         const RunOptions& opts);

namespace detail {

/// Called at the start of step k (time t) with the current path; may replace
/// it. Returns true when the path was replaced.
using PathHook = std::function<bool(int k, double t, DiscretizedPath& path,
                                    Trajectory& traj)>;

Trajectory run_forward_images(const ControlAffineSystem& sys,
                              const FinslerMetric& metric, const RateSpec& rate,
                              const TargetTrajectory& target,
                              DiscretizedPath initial, const RunOptions& opts,
                              const PathHook& hook);

}  // namespace detail

}  // namespace finsler_ccm
