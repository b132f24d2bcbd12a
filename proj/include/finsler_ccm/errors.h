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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace finsler_ccm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced NaN or Inf.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions disagree with the declared system/metric sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class UnknownExample : public Error {
 public:
  using Error::Error;
};

class UnknownMetric : public Error {
 public:
  using Error::Error;
};

/// The metric was evaluated at a zero tangent where it is not differentiable.
class NonSmoothAtZero : public Error {
 public:
  using Error::Error;
};

/// The metric returned a negative value.
class InvalidMetric : public Error {
 public:
  using Error::Error;
};

/// A path with (numerically) zero tangent, e.g. identical endpoints.
class DegeneratePath : public Error {
 public:
  using Error::Error;
};

/// The convergence report only applies to linear rates alpha(V) = lambda V.
class RateNotExponential : public Error {
 public:
  using Error::Error;
};

/// b vanished while a was nonnegative: the kernel implication failed at this
/// point and no differential feedback can make V decrease.
class ConditionViolated : public Error {
 public:
  ConditionViolated(const std::string& what, Eigen::VectorXd state,
                    Eigen::VectorXd tangent, Eigen::VectorXd control, double a,
                    double b, int node = -1)
      : Error(what),
        state_(std::move(state)),
        tangent_(std::move(tangent)),
        control_(std::move(control)),
        a_(a),
        b_(b),
        node_(node) {}

  const Eigen::VectorXd& state() const { return state_; }
  const Eigen::VectorXd& tangent() const { return tangent_; }
  const Eigen::VectorXd& control() const { return control_; }
  double a() const { return a_; }
  double b() const { return b_; }
  /// Path node index at which the violation occurred, -1 when not on a path.
  int node() const { return node_; }

  ConditionViolated at_node(int node) const {
    return ConditionViolated(what(), state_, tangent_, control_, a_, b_, node);
  }

 private:
  Eigen::VectorXd state_;
  Eigen::VectorXd tangent_;
  Eigen::VectorXd control_;
  double a_;
  double b_;
  int node_;
};

}  // namespace finsler_ccm
