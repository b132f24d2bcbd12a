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
#include <string_view>
#include <vector>

#include "finsler_ccm/numerics.h"
#include "finsler_ccm/systems.h"

namespace finsler_ccm {

/// Candidate Finsler-Lyapunov function V(x, delta) with its Finsler structure
/// F and the bounds c1 F^p <= V <= c2 F^p.
class FinslerMetric {
 public:
  using ScalarFn = std::function<double(const Vector& x, const Vector& delta)>;
  using GradientFn = std::function<Vector(const Vector& x, const Vector& delta)>;

  FinslerMetric(std::string name, int dim, ScalarFn value,
                GradientFn tangent_gradient, double p, double c1, double c2);

  /// dV/dx; defaults to zero (state-independent metric).
  FinslerMetric& set_state_gradient(GradientFn fn);
  /// F(x, delta); defaults to V^(1/p).
  FinslerMetric& set_structure(ScalarFn fn);
  /// Marks V as not differentiable at delta = 0.
  FinslerMetric& set_nonsmooth_at_zero(bool nonsmooth = true);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  bool nonsmooth_at_zero() const { return nonsmooth_at_zero_; }
  bool has_structure() const { return structure_ != nullptr; }

  double value(const Vector& x, const Vector& delta) const;
  Vector state_gradient(const Vector& x, const Vector& delta) const;
  Vector tangent_gradient(const Vector& x, const Vector& delta) const;
  double structure(const Vector& x, const Vector& delta) const;

 private:
  void check(const Vector& x, const Vector& delta) const;

  std::string name_;
  int dim_;
  ScalarFn value_;
  GradientFn state_gradient_;
  GradientFn tangent_gradient_;
  ScalarFn structure_;
  double p_;
  double c1_;
  double c2_;
  bool nonsmooth_at_zero_ = false;
};

struct MetricEval {
  double value;
  Vector d_state;    // dV/dx
  Vector d_tangent;  // dV/d(delta)
};

/// V and both gradients. Throws NonSmoothAtZero for delta = 0 on metrics that
/// are not differentiable there.
MetricEval eval_metric(const FinslerMetric& metric, const Vector& x,
                       const Vector& delta);

/// F(x, delta). Throws InvalidMetric when the default V^(1/p) would need a
/// negative V.
double eval_F(const FinslerMetric& metric, const Vector& x, const Vector& delta);

struct AxiomResult {
  std::string axiom;
  bool passed = true;
  int checked = 0;
  /// Worst observed value of the axiom's residual (<= 0 means satisfied).
  double worst = -std::numeric_limits<double>::infinity();
  Vector x;
  Vector delta;
  Vector delta2;
  std::string note;
};

struct AxiomReport {
  std::string metric;
  std::vector<AxiomResult> results;

  bool passed() const;
  const AxiomResult& result(std::string_view axiom) const;
};

struct SampleSpec {
  Box box;  // unbounded coordinates are sampled from [-10, 10]
  int count = 1000;
  std::uint64_t seed = 0;
  double delta_min = 0.1;
  double delta_max = 10.0;
};

/// Samples (x, delta), pairs and scalings lambda in (0, 10] and checks
/// smoothness away from zero, positivity, positive homogeneity, strict
/// subadditivity on non-parallel pairs and the declared c1/c2/p bounds.
AxiomReport check_finsler_axioms(const FinslerMetric& metric,
                                 const SampleSpec& spec);

/// Built-ins: quartic2d, euclidean2d, quadratic_pendulum, randers_pendulum
/// (alias "randers"), quadratic1d and the deliberately broken signed_line.
FinslerMetric load_metric(std::string_view name);
std::vector<std::string> metric_names();

}  // namespace finsler_ccm
