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

#include "finsler_ccm/metrics.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace finsler_ccm {

FinslerMetric::FinslerMetric(std::string name, int dim, ScalarFn value,
                             GradientFn tangent_gradient, double p, double c1,
                             double c2)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::move(value)),
      tangent_gradient_(std::move(tangent_gradient)),
      p_(p),
      c1_(c1),
      c2_(c2) {
  if (dim < 1) throw ShapeError("metric dimension must be >= 1");
  if (!(p >= 1.0) || !(c1 > 0.0) || !(c2 >= c1)) {
    throw InvalidMetric("metric '" + name_ + "' needs p >= 1 and 0 < c1 <= c2");
  }
}

FinslerMetric& FinslerMetric::set_state_gradient(GradientFn fn) {
  state_gradient_ = std::move(fn);
  return *this;
}

FinslerMetric& FinslerMetric::set_structure(ScalarFn fn) {
  structure_ = std::move(fn);
  return *this;
}

FinslerMetric& FinslerMetric::set_nonsmooth_at_zero(bool nonsmooth) {
  nonsmooth_at_zero_ = nonsmooth;
  return *this;
}

void FinslerMetric::check(const Vector& x, const Vector& delta) const {
  if (x.size() != dim_ || delta.size() != dim_) {
    std::ostringstream msg;
    msg << "metric '" << name_ << "' expects dimension " << dim_ << ", got x["
        << x.size() << "], delta[" << delta.size() << "]";
    throw ShapeError(msg.str());
  }
}

double FinslerMetric::value(const Vector& x, const Vector& delta) const {
  check(x, delta);
  return value_(x, delta);
}

Vector FinslerMetric::state_gradient(const Vector& x, const Vector& delta) const {
  check(x, delta);
  if (!state_gradient_) return Vector::Zero(dim_);
  return state_gradient_(x, delta);
}

Vector FinslerMetric::tangent_gradient(const Vector& x, const Vector& delta) const {
  check(x, delta);
  return tangent_gradient_(x, delta);
}

double FinslerMetric::structure(const Vector& x, const Vector& delta) const {
  check(x, delta);
  if (structure_) return structure_(x, delta);
  const double v = value_(x, delta);
  if (v < 0.0) {
    throw InvalidMetric("metric '" + name_ + "' returned a negative V");
  }
  return std::pow(v, 1.0 / p_);
}

MetricEval eval_metric(const FinslerMetric& metric, const Vector& x,
                       const Vector& delta) {
  if (metric.nonsmooth_at_zero() && delta.size() == metric.dim() &&
      delta.isZero(0.0)) {
    throw NonSmoothAtZero("metric '" + metric.name() +
                          "' is not differentiable at delta = 0");
  }
  return MetricEval{metric.value(x, delta), metric.state_gradient(x, delta),
                    metric.tangent_gradient(x, delta)};
}

double eval_F(const FinslerMetric& metric, const Vector& x, const Vector& delta) {
  return metric.structure(x, delta);
}

bool AxiomReport::passed() const {
  for (const AxiomResult& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

const AxiomResult& AxiomReport::result(std::string_view axiom) const {
  for (const AxiomResult& r : results) {
    if (r.axiom == axiom) return r;
  }
  throw std::out_of_range("no axiom result named '" + std::string(axiom) + "'");
}

namespace {

class Sampler {
 public:
  Sampler(const SampleSpec& spec, int dim) : spec_(spec), dim_(dim), rng_(spec.seed) {}

  Vector state() {
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) {
      double lo = spec_.box.dim() == dim_ ? spec_.box.lower(i) : -10.0;
      double hi = spec_.box.dim() == dim_ ? spec_.box.upper(i) : 10.0;
      if (!std::isfinite(lo)) lo = -10.0;
      if (!std::isfinite(hi)) hi = 10.0;
      x(i) = std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    return x;
  }

  Vector direction() {
    std::normal_distribution<double> normal;
    Vector d(dim_);
    do {
      for (int i = 0; i < dim_; ++i) d(i) = normal(rng_);
    } while (d.norm() < 1e-12);
    return d.normalized();
  }

  Vector tangent() {
    return direction() *
           std::uniform_real_distribution<double>(spec_.delta_min, spec_.delta_max)(rng_);
  }

  double scale() {
    // lambda in (0, 10]
    return 10.0 - std::uniform_real_distribution<double>(0.0, 10.0)(rng_);
  }

 private:
  const SampleSpec& spec_;
  int dim_;
  std::mt19937_64 rng_;
};

void record(AxiomResult& r, double residual, const Vector& x, const Vector& d,
            const Vector& d2 = Vector()) {
  ++r.checked;
  if (residual > r.worst) {
    r.worst = residual;
    r.x = x;
    r.delta = d;
    r.delta2 = d2;
  }
}

}  // namespace

AxiomReport check_finsler_axioms(const FinslerMetric& metric,
                                 const SampleSpec& spec) {
  const int n = metric.dim();
  Sampler sampler(spec, n);
  auto named = [](const char* axiom, const char* note) {
    AxiomResult r;
    r.axiom = axiom;
    r.note = note;
    return r;
  };
  AxiomResult smooth =
      named("smoothness", "one-sided difference quotients of F agree away from delta = 0");
  AxiomResult positive = named("positivity", "F(x, delta) > 0 for delta != 0");
  AxiomResult homogeneous = named(
      "homogeneity", "|F(x, l delta) - l F(x, delta)| <= 1e-9 (1 + l F), l in (0, 10]");
  AxiomResult subadditive = named(
      "subadditivity", "F(x, d1 + d2) < F(x, d1) + F(x, d2), pairs at angle >= 1e-3 rad");
  AxiomResult bounds = named("bounds", "c1 F^p <= V <= c2 F^p");
  constexpr double kParallelAngle = 1e-3;

  for (int k = 0; k < spec.count; ++k) {
    const Vector x = sampler.state();
    const Vector d = sampler.tangent();
    const double f = eval_F(metric, x, d);

    // C^1 away from zero: forward and backward difference quotients along a
    // random direction must agree up to O(h).
    {
      const Vector dir = sampler.direction();
      const double h = 1e-6 * d.norm();
      const double fwd = (eval_F(metric, x, d + h * dir) - f) / h;
      const double bwd = (f - eval_F(metric, x, d - h * dir)) / h;
      const double gap = std::abs(fwd - bwd) - 1e-3 * (1.0 + std::abs(fwd));
      record(smooth, gap, x, d, dir);
    }

    record(positive, -f, x, d);

    {
      const double lambda = sampler.scale();
      const double residual = std::abs(eval_F(metric, x, Vector(lambda * d)) - lambda * f) -
                              1e-9 * (1.0 + lambda * std::abs(f));
      record(homogeneous, residual, x, d);
    }

    if (n > 1) {
      const Vector d2 = sampler.tangent();
      const double cosine = std::clamp(d.dot(d2) / (d.norm() * d2.norm()), -1.0, 1.0);
      const double angle = std::acos(cosine);
      if (angle >= kParallelAngle && std::numbers::pi - angle >= kParallelAngle) {
        const double residual =
            eval_F(metric, x, Vector(d + d2)) - f - eval_F(metric, x, d2);
        record(subadditive, residual, x, d, d2);
      }
    }

    {
      const double v = metric.value(x, d);
      const double fp = std::pow(std::abs(f), metric.p());
      const double slack = 1e-9 * (1.0 + std::abs(v));
      const double residual = std::max(metric.c1() * fp - v, v - metric.c2() * fp) - slack;
      record(bounds, residual, x, d);
    }
  }

  smooth.passed = smooth.worst <= 0.0;
  positive.passed = positive.worst < 0.0 || positive.checked == 0;
  homogeneous.passed = homogeneous.worst <= 0.0;
  subadditive.passed = subadditive.worst < 0.0 || subadditive.checked == 0;
  if (n == 1) subadditive.note += " (vacuous in one dimension: all pairs are parallel)";
  bounds.passed = bounds.worst <= 0.0;

  AxiomReport report{metric.name(), {smooth, positive, homogeneous, subadditive, bounds}};
  return report;
}

FinslerMetric load_metric(std::string_view name) {
  if (name == "quartic2d") {
    return FinslerMetric(
        "quartic2d", 2,
        [](const Vector&, const Vector& d) { return d.array().pow(4).sum(); },
        [](const Vector&, const Vector& d) -> Vector { return 4.0 * d.array().cube(); },
        4.0, 1.0, 1.0);
  }
  if (name == "euclidean2d") {
    FinslerMetric m(
        "euclidean2d", 2, [](const Vector&, const Vector& d) { return d.squaredNorm(); },
        [](const Vector&, const Vector& d) -> Vector { return 2.0 * d; }, 2.0, 1.0, 1.0);
    m.set_structure([](const Vector&, const Vector& d) { return d.norm(); });
    return m;
  }
  if (name == "quadratic_pendulum") {
    // V = 4 delta^2 against the Euclidean structure |delta|.
    FinslerMetric m(
        "quadratic_pendulum", 1,
        [](const Vector&, const Vector& d) { return 4.0 * d(0) * d(0); },
        [](const Vector&, const Vector& d) { return Vector{{8.0 * d(0)}}; }, 2.0, 4.0, 4.0);
    m.set_structure([](const Vector&, const Vector& d) { return std::abs(d(0)); });
    return m;
  }
  if (name == "randers_pendulum" || name == "randers") {
    // Square of the Randers metric 2|delta| - delta. The declared c2 = 9 also
    // covers the Euclidean reference structure |delta|.
    FinslerMetric m(
        "randers_pendulum", 1,
        [](const Vector&, const Vector& d) {
          const double r = 2.0 * std::abs(d(0)) - d(0);
          return r * r;
        },
        [](const Vector&, const Vector& d) {
          const double r = 2.0 * std::abs(d(0)) - d(0);
          const double sign = d(0) > 0.0 ? 1.0 : -1.0;
          return Vector{{2.0 * r * (2.0 * sign - 1.0)}};
        },
        2.0, 1.0, 9.0);
    m.set_structure(
        [](const Vector&, const Vector& d) { return 2.0 * std::abs(d(0)) - d(0); });
    m.set_nonsmooth_at_zero();
    return m;
  }
  if (name == "quadratic1d") {
    FinslerMetric m(
        "quadratic1d", 1, [](const Vector&, const Vector& d) { return d(0) * d(0); },
        [](const Vector&, const Vector& d) { return Vector{{2.0 * d(0)}}; }, 2.0, 1.0, 1.0);
    m.set_structure([](const Vector&, const Vector& d) { return std::abs(d(0)); });
    return m;
  }
  if (name == "signed_line") {
    // Broken fixture: F(delta) = delta is negative for delta < 0.
    FinslerMetric m(
        "signed_line", 1, [](const Vector&, const Vector& d) { return d(0) * d(0); },
        [](const Vector&, const Vector& d) { return Vector{{2.0 * d(0)}}; }, 2.0, 1.0, 1.0);
    m.set_structure([](const Vector&, const Vector& d) { return d(0); });
    return m;
  }
  throw UnknownMetric("unknown metric '" + std::string(name) + "'");
}

std::vector<std::string> metric_names() {
  return {"quartic2d",   "euclidean2d", "quadratic_pendulum", "randers_pendulum",
          "quadratic1d", "signed_line"};
}

}  // namespace finsler_ccm
