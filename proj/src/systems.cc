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

#include "finsler_ccm/systems.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace finsler_ccm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shape_message(const std::string& what, Eigen::Index got_rows,
                          Eigen::Index got_cols, int want_rows, int want_cols) {
  std::ostringstream msg;
  msg << what << ": got " << got_rows << "x" << got_cols << ", expected "
      << want_rows << "x" << want_cols;
  return msg.str();
}

}  // namespace

Box Box::unbounded(int dim) {
  return Box{Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf)};
}

Box Box::uniform(int dim, double lower, double upper) {
  return Box{Vector::Constant(dim, lower), Vector::Constant(dim, upper)};
}

bool Box::bounded() const { return lower.allFinite() && upper.allFinite(); }

bool Box::contains(const Vector& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

bool Box::touches_boundary(const Vector& x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isfinite(lower(i)) && x(i) <= lower(i)) return true;
    if (std::isfinite(upper(i)) && x(i) >= upper(i)) return true;
  }
  return false;
}

Vector Box::clamp(const Vector& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

ControlAffineSystem::ControlAffineSystem(std::string name, int state_dim,
                                         int input_dim, DriftFn drift,
                                         InputFn input)
    : name_(std::move(name)),
      n_(state_dim),
      m_(input_dim),
      drift_(std::move(drift)),
      input_(std::move(input)),
      domain_(Box::unbounded(state_dim)) {
  if (state_dim < 1 || input_dim < 1) {
    throw ShapeError("ControlAffineSystem needs n >= 1 and m >= 1");
  }
}

ControlAffineSystem& ControlAffineSystem::set_drift_jacobian(JacobianFn fn) {
  drift_jacobian_ = std::move(fn);
  return *this;
}

ControlAffineSystem& ControlAffineSystem::set_input_jacobian(InputJacobianFn fn) {
  input_jacobian_ = std::move(fn);
  return *this;
}

ControlAffineSystem& ControlAffineSystem::set_domain(Box domain) {
  if (domain.dim() != n_ || domain.upper.size() != n_) {
    throw ShapeError("domain box dimension differs from the state dimension");
  }
  domain_ = std::move(domain);
  return *this;
}

ControlAffineSystem& ControlAffineSystem::set_fd_step(double step) {
  fd_step_ = step;
  return *this;
}

void ControlAffineSystem::check_state(const Vector& x) const {
  if (x.size() != n_) {
    throw ShapeError(shape_message(name_ + " state", x.size(), 1, n_, 1));
  }
}

void ControlAffineSystem::check_control(const Vector& u) const {
  if (u.size() != m_) {
    throw ShapeError(shape_message(name_ + " control", u.size(), 1, m_, 1));
  }
}

Vector ControlAffineSystem::drift(const Vector& x) const {
  check_state(x);
  Vector f = drift_(x);
  if (f.size() != n_) {
    throw ShapeError(shape_message(name_ + " f(x)", f.size(), 1, n_, 1));
  }
  return f;
}

Matrix ControlAffineSystem::input_matrix(const Vector& x) const {
  check_state(x);
  Matrix b = input_(x);
  if (b.rows() != n_ || b.cols() != m_) {
    throw ShapeError(shape_message(name_ + " B(x)", b.rows(), b.cols(), n_, m_));
  }
  return b;
}

Matrix ControlAffineSystem::drift_jacobian(const Vector& x) const {
  if (!drift_jacobian_) return drift_jacobian_fd(x);
  check_state(x);
  Matrix jac = drift_jacobian_(x);
  if (jac.rows() != n_ || jac.cols() != n_) {
    throw ShapeError(shape_message(name_ + " df/dx", jac.rows(), jac.cols(), n_, n_));
  }
  return jac;
}

std::vector<Matrix> ControlAffineSystem::input_jacobian(const Vector& x) const {
  if (!input_jacobian_) return input_jacobian_fd(x);
  check_state(x);
  std::vector<Matrix> jacs = input_jacobian_(x);
  if (static_cast<int>(jacs.size()) != m_) {
    throw ShapeError(name_ + ": input Jacobian must have one matrix per column of B");
  }
  for (const Matrix& jac : jacs) {
    if (jac.rows() != n_ || jac.cols() != n_) {
      throw ShapeError(shape_message(name_ + " db_i/dx", jac.rows(), jac.cols(), n_, n_));
    }
  }
  return jacs;
}

Matrix ControlAffineSystem::drift_jacobian_fd(const Vector& x) const {
  return finite_diff_jacobian([this](const Vector& p) { return drift(p); }, x,
                              fd_step_);
}

std::vector<Matrix> ControlAffineSystem::input_jacobian_fd(const Vector& x) const {
  std::vector<Matrix> jacs;
  jacs.reserve(m_);
  for (int i = 0; i < m_; ++i) {
    jacs.push_back(finite_diff_jacobian(
        [this, i](const Vector& p) -> Vector { return input_matrix(p).col(i); }, x,
        fd_step_));
  }
  return jacs;
}

Vector eval_dynamics(const ControlAffineSystem& sys, const Vector& x,
                     const Vector& u) {
  sys.check_control(u);
  return sys.drift(x) + sys.input_matrix(x) * u;
}

Matrix eval_A(const ControlAffineSystem& sys, const Vector& x, const Vector& u) {
  sys.check_control(u);
  Matrix a = sys.drift_jacobian(x);
  const std::vector<Matrix> db = sys.input_jacobian(x);
  for (int i = 0; i < sys.input_dim(); ++i) a += db[i] * u(i);
  return a;
}

Vector eval_differential(const ControlAffineSystem& sys, const Vector& x,
                         const Vector& u, const Vector& dx, const Vector& du) {
  sys.check_state(dx);
  sys.check_control(du);
  return eval_A(sys, x, u) * dx + sys.input_matrix(x) * du;
}

ControlAffineSystem load_example(std::string_view name) {
  if (name == "example1") {
    ControlAffineSystem sys(
        "example1", 2, 1,
        [](const Vector& x) { return Vector{{x(0), -x(1)}}; },
        [](const Vector&) { return Matrix{{1.0}, {0.0}}; });
    sys.set_drift_jacobian([](const Vector&) { return Matrix{{1.0, 0.0}, {0.0, -1.0}}; });
    sys.set_input_jacobian(
        [](const Vector&) { return std::vector<Matrix>{Matrix::Zero(2, 2)}; });
    return sys;
  }
  if (name == "pendulum") {
    ControlAffineSystem sys(
        "pendulum", 1, 1, [](const Vector& x) { return Vector{{-std::sin(x(0))}}; },
        [](const Vector&) { return Matrix{{1.0}}; });
    sys.set_drift_jacobian([](const Vector& x) { return Matrix{{-std::cos(x(0))}}; });
    sys.set_input_jacobian(
        [](const Vector&) { return std::vector<Matrix>{Matrix::Zero(1, 1)}; });
    sys.set_domain(Box::uniform(1, 0.0, std::numbers::pi));
    return sys;
  }
  if (name == "example3") {
    ControlAffineSystem sys(
        "example3", 1, 1, [](const Vector& x) { return Vector{{-x(0)}}; },
        [](const Vector& x) { return Matrix{{x(0) * x(0)}}; });
    sys.set_drift_jacobian([](const Vector&) { return Matrix{{-1.0}}; });
    sys.set_input_jacobian(
        [](const Vector& x) { return std::vector<Matrix>{Matrix{{2.0 * x(0)}}}; });
    return sys;
  }
  if (name == "uncontrollable") {
    ControlAffineSystem sys(
        "uncontrollable", 1, 1, [](const Vector& x) { return Vector{{x(0)}}; },
        [](const Vector&) { return Matrix{{0.0}}; });
    sys.set_drift_jacobian([](const Vector&) { return Matrix{{1.0}}; });
    sys.set_input_jacobian(
        [](const Vector&) { return std::vector<Matrix>{Matrix::Zero(1, 1)}; });
    return sys;
  }
  throw UnknownExample("unknown example system '" + std::string(name) + "'");
}

std::vector<std::string> example_names() {
  return {"example1", "pendulum", "example3", "uncontrollable"};
}

TargetTrajectory TargetTrajectory::constant(Vector state, Vector control) {
  return TargetTrajectory{[state](double) { return state; },
                          [control](double) { return control; }};
}

double target_residual(const ControlAffineSystem& sys,
                       const TargetTrajectory& target, double t0, double t1,
                       int samples, double h) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t =
        samples == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(k) / (samples - 1);
    const Vector xdot = (target.x_star(t + h) - target.x_star(t - h)) / (2.0 * h);
    const Vector r = xdot - eval_dynamics(sys, target.x_star(t), target.u_star(t));
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace finsler_ccm
