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
#include <sstream>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "finsler_ccm/errors.h"

namespace finsler_ccm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform grid of `count` nodes spanning [lower, upper]. The last node is
/// exactly `upper`.
class Grid1D {
 public:
  Grid1D(double lower, double upper, int count);

  int count() const { return count_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double step() const { return step_; }
  double node(int j) const;

 private:
  double lower_;
  double upper_;
  int count_;
  double step_;
};

/// Every numeric threshold used to realize a strict inequality.
struct ToleranceConfig {
  double fd_step = 1e-6;   // central-difference step
  double reg_eps = 1e-8;   // minimum tangent norm of a regular path
  double b_eps = 1e-12;    // b <= b_eps is treated as b == 0
  double diss_tol = 1e-3;  // slack in the dissipation check

  /// Throws std::invalid_argument unless every field is finite and > 0.
  void validate() const;
};

bool all_finite(const Vector& v);

/// Throws NumericalBlowup if `v` has a non-finite entry.
void require_finite(const Vector& v, const std::string& context);

/// Classical fourth-order Runge-Kutta step of x' = field(x).
template <typename Field>
Vector rk4_step(Field&& field, const Vector& state, double dt) {
  const Vector k1 = field(state);
  const Vector k2 = field(Vector(state + 0.5 * dt * k1));
  const Vector k3 = field(Vector(state + 0.5 * dt * k2));
  const Vector k4 = field(Vector(state + dt * k3));
  Vector next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(next)) {
    Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ");
    std::ostringstream msg;
    msg << "rk4_step: non-finite result from state (" << state.format(fmt)
        << ") with dt = " << dt;
    throw NumericalBlowup(msg.str());
  }
  return next;
}

/// Composite trapezoid rule over uniformly spaced samples.
double trapezoid_integral(std::span<const double> samples, double step);

/// Central-difference Jacobian of `fn` at `point`.
Matrix finite_diff_jacobian(const std::function<Vector(const Vector&)>& fn,
                            const Vector& point, double step);

}  // namespace finsler_ccm
