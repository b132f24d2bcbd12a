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

#include "finsler_ccm/numerics.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace finsler_ccm {

Grid1D::Grid1D(double lower, double upper, int count)
    : lower_(lower), upper_(upper), count_(count) {
  if (count < 2) {
    throw std::invalid_argument("Grid1D needs at least 2 nodes");
  }
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower)) {
    throw std::invalid_argument("Grid1D needs finite endpoints with upper > lower");
  }
  step_ = (upper - lower) / (count - 1);
}

double Grid1D::node(int j) const {
  if (j == count_ - 1) return upper_;
  return lower_ + j * step_;
}

void ToleranceConfig::validate() const {
  for (double v : {fd_step, reg_eps, b_eps, diss_tol}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("ToleranceConfig fields must be finite and positive");
    }
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Vector& v, const std::string& context) {
  if (!v.allFinite()) {
    throw NumericalBlowup(context + ": non-finite value");
  }
}

double trapezoid_integral(std::span<const double> samples, double step) {
  if (samples.size() < 2) {
    throw InsufficientSamples("trapezoid_integral needs at least 2 samples, got " +
                              std::to_string(samples.size()));
  }
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) interior += samples[i];
  return step * (0.5 * (samples.front() + samples.back()) + interior);
}

Matrix finite_diff_jacobian(const std::function<Vector(const Vector&)>& fn,
                            const Vector& point, double step) {
  const Vector f0 = fn(point);
  Matrix jac(f0.size(), point.size());
  Vector probe = point;
  for (Eigen::Index j = 0; j < point.size(); ++j) {
    probe(j) = point(j) + step;
    const Vector plus = fn(probe);
    probe(j) = point(j) - step;
    const Vector minus = fn(probe);
    probe(j) = point(j);
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  if (!jac.allFinite()) {
    std::ostringstream msg;
    msg << "finite_diff_jacobian: non-finite entries at step " << step;
    throw NumericalBlowup(msg.str());
  }
  return jac;
}

}  // namespace finsler_ccm
