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

#include "finsler_ccm/controller.h"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace finsler_ccm {

RateSpec RateSpec::zero() { return RateSpec(Kind::kZero, 0.0, nullptr); }

RateSpec RateSpec::linear(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("linear rate needs a finite lambda > 0");
  }
  return RateSpec(Kind::kLinear, lambda, nullptr);
}

RateSpec RateSpec::class_k(std::function<double(double)> fn) {
  if (!fn) throw std::invalid_argument("class-K rate needs a function");
  if (fn(0.0) != 0.0) throw std::invalid_argument("class-K rate must vanish at 0");
  double previous = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double value = fn(0.1 * i);
    if (!(value > previous)) {
      throw std::invalid_argument("class-K rate must be strictly increasing");
    }
    previous = value;
  }
  return RateSpec(Kind::kClassK, 0.0, std::move(fn));
}

double RateSpec::operator()(double v) const {
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kLinear:
      return lambda_ * v;
    case Kind::kClassK:
      return fn_(v);
  }
  return 0.0;
}

ABValues eval_ab(const ControlAffineSystem& sys, const FinslerMetric& metric,
                 const RateSpec& rate, const Vector& x, const Vector& delta,
                 const Vector& u) {
  sys.check_state(delta);
  const MetricEval me = eval_metric(metric, x, delta);
  const Matrix b_mat = sys.input_matrix(x);
  const Vector xdot = eval_dynamics(sys, x, u);
  const double a = me.d_state.dot(xdot) + me.d_tangent.dot(eval_A(sys, x, u) * delta) +
                   rate(me.value);
  const double b = (b_mat.transpose() * me.d_tangent).squaredNorm();
  return ABValues{a, b};
}

double eval_rho(double a, double b, RhoVariant variant, double b_eps) {
  if (b <= b_eps) {
    if (a >= b_eps) {
      std::ostringstream msg;
      msg << "b = " << b << " vanishes while a = " << a
          << " >= 0: no differential control decreases V here";
      throw ConditionViolated(msg.str(), Vector(), Vector(), Vector(), a, b);
    }
    return 0.0;
  }
  if (variant == RhoVariant::kPaperPiecewise && a < 0.0) return 0.0;
  const double r = std::hypot(a, b);
  // (a + r) / b, rewritten for a < 0 to avoid cancellation.
  return a >= 0.0 ? (a + r) / b : b / (r - a);
}

Vector eval_k_delta(const ControlAffineSystem& sys, const FinslerMetric& metric,
                    const RateSpec& rate, const Vector& x, const Vector& delta,
                    const Vector& u, RhoVariant variant, double b_eps) {
  const ABValues ab = eval_ab(sys, metric, rate, x, delta, u);
  const Vector grad = metric.tangent_gradient(x, delta);
  // rho is invariant under (a, b) -> (s a, s b); dividing by |dV/ddelta|^2
  // makes b_eps a test on the direction of dV/ddelta relative to ker B^T
  // rather than on the magnitude of delta.
  double scale = grad.squaredNorm();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  double rho = 0.0;
  try {
    rho = eval_rho(ab.a / scale, ab.b / scale, variant, b_eps);
  } catch (const ConditionViolated& e) {
    throw ConditionViolated(e.what(), x, delta, u, ab.a, ab.b);
  }
  if (rho == 0.0) return Vector::Zero(sys.input_dim());
  return -rho * (sys.input_matrix(x).transpose() * grad);
}

ControlProfile integrate_control_profile(const DiscretizedPath& path,
                                         const Vector& u_star,
                                         const DifferentialFeedback& feedback) {
  const Grid1D& grid = path.grid();
  const double h = grid.step();
  const int count = path.size();
  ControlProfile profile{grid, std::vector<Vector>(count), std::vector<Vector>(count)};
  profile.values[0] = u_star;

  auto slope = [&](int node, const Vector& x, const Vector& delta, const Vector& v) {
    try {
      Vector dv = feedback(x, delta, v);
      require_finite(dv, "control profile at node " + std::to_string(node));
      return dv;
    } catch (const ConditionViolated& e) {
      throw e.at_node(node);
    }
  };

  for (int j = 0; j + 1 < count; ++j) {
    const Vector& c0 = path.node(j);
    const Vector& c1 = path.node(j + 1);
    const Vector& t0 = path.tangent(j);
    const Vector& t1 = path.tangent(j + 1);
    const Vector c_mid = 0.5 * (c0 + c1) + (h / 8.0) * (t0 - t1);
    const Vector t_mid = (1.5 / h) * (c1 - c0) - 0.25 * (t0 + t1);
    const Vector& v = profile.values[j];

    const Vector k1 = slope(j, c0, t0, v);
    const Vector k2 = slope(j, c_mid, t_mid, Vector(v + 0.5 * h * k1));
    const Vector k3 = slope(j, c_mid, t_mid, Vector(v + 0.5 * h * k2));
    const Vector k4 = slope(j + 1, c1, t1, Vector(v + h * k3));
    profile.slopes[j] = k1;
    profile.values[j + 1] = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  profile.slopes[count - 1] =
      slope(count - 1, path.back(), path.tangent(count - 1), profile.values.back());
  return profile;
}

ControlProfile integrate_kp(const ControlAffineSystem& sys,
                            const FinslerMetric& metric, const RateSpec& rate,
                            const DiscretizedPath& path, const Vector& u_star,
                            RhoVariant variant, const ToleranceConfig& tol) {
  sys.check_control(u_star);
  if (!path.is_regular(tol.reg_eps)) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "integrate_kp needs a regular path (min |c_s| = %.3g < %.3g)",
                  path.min_tangent_norm(), tol.reg_eps);
    throw DegeneratePath(msg);
  }
  return integrate_control_profile(
      path, u_star, [&](const Vector& x, const Vector& delta, const Vector& u) {
        return eval_k_delta(sys, metric, rate, x, delta, u, variant, tol.b_eps);
      });
}

ForwardImage propagate_forward_image(const ControlAffineSystem& sys,
                                     const FinslerMetric& metric,
                                     const RateSpec& rate,
                                     const DiscretizedPath& path,
                                     const Vector& u_star_t, double dt,
                                     RhoVariant variant,
                                     const ToleranceConfig& tol) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("propagate_forward_image needs a finite dt >= 0");
  }
  ControlProfile profile = integrate_kp(sys, metric, rate, path, u_star_t, variant, tol);
  Vector applied = profile.values.back();
  if (dt == 0.0) {
    return ForwardImage{path, std::move(applied), std::move(profile)};
  }

  const int n = sys.state_dim();
  const Box& domain = sys.domain();
  std::vector<Vector> nodes(path.size());
  std::vector<Vector> tangents(path.size());
  bool boundary_touched = false;
  for (int j = 0; j < path.size(); ++j) {
    const Vector& v = profile.values[j];
    const Vector& dv_ds = profile.slopes[j];
    auto field = [&](const Vector& z) {
      const Vector x = z.head(n);
      const Vector delta = z.tail(n);
      const Matrix b_mat = sys.input_matrix(x);
      Vector out(2 * n);
      out.head(n) = sys.drift(x) + b_mat * v;
      out.tail(n) = eval_A(sys, x, v) * delta + b_mat * dv_ds;
      return out;
    };
    Vector z(2 * n);
    z << path.node(j), path.tangent(j);
    z = rk4_step(field, z, dt);
    Vector x = z.head(n);
    const Vector clamped = domain.clamp(x);
    if (clamped != x) boundary_touched = true;
    nodes[j] = clamped;
    tangents[j] = z.tail(n);
  }
  DiscretizedPath next(std::move(nodes), std::move(tangents));
  const bool regularity_lost = !next.is_regular(tol.reg_eps);
  return ForwardImage{std::move(next), std::move(applied), std::move(profile),
                      regularity_lost, boundary_touched};
}

namespace detail {

Trajectory run_forward_images(const ControlAffineSystem& sys,
                              const FinslerMetric& metric, const RateSpec& rate,
                              const TargetTrajectory& target,
                              DiscretizedPath initial, const RunOptions& opts,
                              const PathHook& hook) {
  opts.tol.validate();
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt) || !(opts.horizon > 0.0) ||
      !std::isfinite(opts.horizon)) {
    throw std::invalid_argument("run needs finite dt > 0 and horizon > 0");
  }
  const long steps = std::lround(opts.horizon / opts.dt);
  if (steps < 1) throw std::invalid_argument("horizon shorter than one time step");

  Trajectory traj;
  traj.state_dim = sys.state_dim();
  traj.input_dim = sys.input_dim();
  traj.samples.reserve(steps + 1);

  DiscretizedPath path = std::move(initial);
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    const bool replaced = (k > 0 && hook) ? hook(static_cast<int>(k), t, path, traj) : false;
    const Vector u_star = target.u_star(t);

    std::optional<ForwardImage> next;
    Vector applied;
    try {
      if (k < steps) {
        next = propagate_forward_image(sys, metric, rate, path, u_star, opts.dt,
                                       opts.variant, opts.tol);
        applied = next->applied_control;
      } else {
        applied = integrate_kp(sys, metric, rate, path, u_star, opts.variant, opts.tol)
                      .values.back();
      }
    } catch (const ConditionViolated& e) {
      std::ostringstream msg;
      Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ");
      msg << "ConditionViolated at t = " << t << ", node " << e.node() << ": "
          << e.what() << "; x = (" << e.state().format(fmt) << "), delta = ("
          << e.tangent().format(fmt) << "), u = (" << e.control().format(fmt) << ")";
      traj.termination = Termination::kConditionViolated;
      traj.diagnostic = msg.str();
      break;
    } catch (const DegeneratePath& e) {
      if (k == 0) throw;
      traj.regularity_lost = true;
      traj.diagnostic =
          std::string("run stopped: path collapsed below the regularity floor, the state is "
                      "within reg_eps of the target (") + e.what() + ")";
      break;
    }

    TrajectorySample sample;
    sample.t = t;
    sample.state = path.back();
    sample.control = std::move(applied);
    sample.energy = energy_integral(path, metric);
    sample.length = length_integral(path, metric);
    sample.node_values = node_values(path, metric);
    sample.path_replaced = replaced;
    traj.samples.push_back(std::move(sample));

    if (next) {
      traj.boundary_touched = traj.boundary_touched || next->boundary_touched;
      traj.regularity_lost = traj.regularity_lost || next->regularity_lost;
      path = std::move(next->path);
    }
  }
  return traj;
}

}  // namespace detail

Trajectory open_loop_run(const ControlAffineSystem& sys,
                         const FinslerMetric& metric, const RateSpec& rate,
                         const TargetTrajectory& target, const Vector& x0,
                         const RunOptions& opts) {
  sys.check_state(x0);
  opts.tol.validate();
  if (opts.path_nodes < 2) throw std::invalid_argument("path_nodes must be >= 2");
  DiscretizedPath initial =
      make_straight_path(target.x_star(0.0), x0, opts.path_nodes, opts.tol.reg_eps);
  return detail::run_forward_images(sys, metric, rate, target, std::move(initial), opts,
                                    nullptr);
}

}  // namespace finsler_ccm
