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
#include <string>
#include <string_view>
#include <vector>

#include "finsler_ccm/numerics.h"

namespace finsler_ccm {

/// Axis-aligned box; infinite bounds mean the coordinate is unbounded.
struct Box {
  Vector lower;
  Vector upper;

  static Box unbounded(int dim);
  static Box uniform(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lower.size()); }
  bool bounded() const;
  bool contains(const Vector& x) const;
  /// Returns true if any coordinate of `x` lies on or beyond a finite bound.
  bool touches_boundary(const Vector& x) const;
  Vector clamp(const Vector& x) const;
};

/// Control-affine dynamics x' = f(x) + B(x) u with state dimension n and
/// input dimension m = number of columns of B.
class ControlAffineSystem {
 public:
  using DriftFn = std::function<Vector(const Vector&)>;
  using InputFn = std::function<Matrix(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;
  /// Returns d b_i / dx for every column i of B (each n x n).
  using InputJacobianFn = std::function<std::vector<Matrix>(const Vector&)>;

  ControlAffineSystem(std::string name, int state_dim, int input_dim,
                      DriftFn drift, InputFn input);

  ControlAffineSystem& set_drift_jacobian(JacobianFn fn);
  ControlAffineSystem& set_input_jacobian(InputJacobianFn fn);
  ControlAffineSystem& set_domain(Box domain);
  ControlAffineSystem& set_fd_step(double step);

  const std::string& name() const { return name_; }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  const Box& domain() const { return domain_; }
  bool has_analytic_jacobians() const {
    return drift_jacobian_ != nullptr && input_jacobian_ != nullptr;
  }

  Vector drift(const Vector& x) const;
  Matrix input_matrix(const Vector& x) const;
  /// df/dx; finite differences when no analytic Jacobian was supplied.
  Matrix drift_jacobian(const Vector& x) const;
  /// d b_i/dx for each column; finite differences when not supplied.
  std::vector<Matrix> input_jacobian(const Vector& x) const;

  /// Finite-difference versions, always available for cross-checking.
  Matrix drift_jacobian_fd(const Vector& x) const;
  std::vector<Matrix> input_jacobian_fd(const Vector& x) const;

  void check_state(const Vector& x) const;
  void check_control(const Vector& u) const;

 private:
  std::string name_;
  int n_;
  int m_;
  DriftFn drift_;
  InputFn input_;
  JacobianFn drift_jacobian_;
  InputJacobianFn input_jacobian_;
  Box domain_;
  double fd_step_ = 1e-6;
};

/// f(x) + B(x) u.
Vector eval_dynamics(const ControlAffineSystem& sys, const Vector& x,
                     const Vector& u);

/// A(x, u) = df/dx + sum_i (d b_i/dx) u_i.
Matrix eval_A(const ControlAffineSystem& sys, const Vector& x, const Vector& u);

/// A(x, u) dx + B(x) du.
Vector eval_differential(const ControlAffineSystem& sys, const Vector& x,
                         const Vector& u, const Vector& dx, const Vector& du);

/// Built-in systems: "example1" (planar saddle with one input), "pendulum"
/// (overdamped pendulum on [0, pi]), "example3" (x' = -x + x^2 u) and
/// "uncontrollable" (x' = x with B = 0).
ControlAffineSystem load_example(std::string_view name);
std::vector<std::string> example_names();

/// Target pair (x*(t), u*(t)) that the controllers steer toward.
struct TargetTrajectory {
  std::function<Vector(double)> x_star;
  std::function<Vector(double)> u_star;

  static TargetTrajectory constant(Vector state, Vector control);
};

/// max over the sampled times of |x*'(t) - f(x*) - B(x*) u*|, with x*'
/// from central differences of step `h`.
double target_residual(const ControlAffineSystem& sys,
                       const TargetTrajectory& target, double t0, double t1,
                       int samples = 11, double h = 1e-4);

}  // namespace finsler_ccm
