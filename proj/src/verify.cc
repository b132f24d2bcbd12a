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

#include "finsler_ccm/verify.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace finsler_ccm {
namespace {

constexpr int kScanPoints = 64;

Violation make_violation(const Vector& x, const Vector& u, const Vector& delta,
                         double lhs, double rhs) {
  Violation v;
  v.x = x;
  v.u = u;
  v.delta = delta;
  v.lhs = lhs;
  v.rhs = rhs;
  return v;
}

double sample_coordinate(std::mt19937_64& rng, double lo, double hi) {
  if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 20.0 : -10.0;
  if (!std::isfinite(hi)) hi = lo + 20.0;
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector sample_box(std::mt19937_64& rng, const Box& box) {
  Vector x(box.dim());
  for (int i = 0; i < box.dim(); ++i) x(i) = sample_coordinate(rng, box.lower(i), box.upper(i));
  return x;
}

Vector unit_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Vector d(n);
  do {
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
  } while (d.norm() < 1e-12);
  return d.normalized();
}

std::pair<double, double> finite_range(double lo, double hi) {
  if (!std::isfinite(lo)) lo = -10.0;
  if (!std::isfinite(hi)) hi = 10.0;
  return {lo, hi};
}

/// Zeros of a scalar function on [lo, hi]: sign changes refined by
/// bisection, plus local minima of |g| refined by golden section (double
/// roots such as x^2 never change sign). Only points with |g| < tol count.
std::vector<double> scalar_roots(const std::function<double(double)>& g, double lo,
                                 double hi, double tol) {
  std::vector<double> params(kScanPoints + 1);
  std::vector<double> values(kScanPoints + 1);
  for (int i = 0; i <= kScanPoints; ++i) {
    params[i] = lo + (hi - lo) * static_cast<double>(i) / kScanPoints;
    values[i] = g(params[i]);
  }
  std::vector<double> roots;
  auto accept = [&](double p) {
    if (std::abs(g(p)) < tol) roots.push_back(p);
  };
  for (int i = 0; i < kScanPoints; ++i) {
    if (values[i] == 0.0) {
      roots.push_back(params[i]);
      continue;
    }
    if (values[i] * values[i + 1] < 0.0) {
      double a = params[i], b = params[i + 1], ga = values[i];
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (gm == 0.0) {
          a = b = mid;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      accept(0.5 * (a + b));
    }
  }
  for (int i = 1; i < kScanPoints; ++i) {
    const double m = std::abs(values[i]);
    const double left = std::abs(values[i - 1]);
    const double right = std::abs(values[i + 1]);
    if (m == 0.0 || m > left || m > right || m == std::max(left, right)) continue;
    if (values[i - 1] * values[i + 1] < 0.0) continue;  // handled by bisection
    double a = params[i - 1], b = params[i + 1];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
      const double c = b - ratio * (b - a);
      const double d = a + ratio * (b - a);
      if (std::abs(g(c)) < std::abs(g(d))) {
        b = d;
      } else {
        a = c;
      }
    }
    accept(0.5 * (a + b));
  }
  return roots;
}

}  // namespace

VerificationReport check_th1(const ControlAffineSystem& sys,
                             const FinslerMetric& metric, const RateSpec& rate,
                             const Th1Options& opts) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  if (opts.state_box.dim() != n || opts.control_box.dim() != m) {
    throw ShapeError("check_th1: box dimensions differ from the system");
  }
  VerificationReport report;
  report.check = "th1";
  report.notes.push_back("kernel membership: |B^T dV/ddelta| < kernel_tol = " +
                         std::to_string(opts.kernel_tol));
  std::mt19937_64 rng(opts.seed);

  auto kernel_gap = [&](const Vector& x, const Vector& delta) {
    return (sys.input_matrix(x).transpose() * metric.tangent_gradient(x, delta)).norm();
  };
  auto check_point = [&](const Vector& x, const Vector& u, const Vector& delta) {
    if (kernel_gap(x, delta) >= opts.kernel_tol) return;
    ++report.checked_samples;
    const ABValues ab = eval_ab(sys, metric, rate, x, delta, u);
    const double alpha = rate(metric.value(x, delta));
    if (!(ab.a < -opts.margin_eps)) {
      report.violations.push_back(make_violation(x, u, delta, ab.a - alpha, -alpha));
    }
  };

  const bool explicit_kernel = static_cast<bool>(opts.kernel_sampler);
  const bool search = !explicit_kernel && opts.search_kernel && m == 1;
  if (explicit_kernel) {
    report.notes.push_back("kernel sampled from an explicit parametrization");
  } else if (search) {
    report.notes.push_back("kernel located by root finding in delta and x");
  } else {
    report.notes.push_back("kernel located by filtering random samples only");
  }

  for (int i = 0; i < opts.samples; ++i) {
    const Vector x = sample_box(rng, opts.state_box);
    const Vector u = sample_box(rng, opts.control_box);
    const Vector delta = unit_direction(rng, n);
    check_point(x, u, delta);

    if (explicit_kernel) {
      for (const Vector& d : opts.kernel_sampler(x)) check_point(x, u, d);
      continue;
    }
    if (!search) continue;

    // Scalar kernel function for the single input.
    auto g = [&](const Vector& xx, const Vector& dd) {
      return (sys.input_matrix(xx).transpose() * metric.tangent_gradient(xx, dd))(0);
    };
    if (n >= 2) {
      Vector e2 = unit_direction(rng, n);
      e2 -= e2.dot(delta) * delta;
      if (e2.norm() > 1e-9) {
        e2.normalize();
        auto circle = [&](double theta) -> Vector {
          return std::cos(theta) * delta + std::sin(theta) * e2;
        };
        for (double theta : scalar_roots([&](double th) { return g(x, circle(th)); }, 0.0,
                                         2.0 * std::numbers::pi, opts.kernel_tol)) {
          check_point(x, u, circle(theta));
        }
      }
    }
    const int axis = i % n;
    const auto [lo, hi] = finite_range(opts.state_box.lower(axis), opts.state_box.upper(axis));
    auto along = [&](double value) {
      Vector xx = x;
      xx(axis) = value;
      return xx;
    };
    for (double value :
         scalar_roots([&](double v) { return g(along(v), delta); }, lo, hi, opts.kernel_tol)) {
      check_point(along(value), u, delta);
    }
  }
  return report;
}

VerificationReport check_ratio_bound(const ControlAffineSystem& sys,
                                     const FinslerMetric& metric,
                                     const RatioOptions& opts) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  if (opts.state_box.dim() != n) throw ShapeError("check_ratio_bound: box dimension");
  if (!(opts.delta_min > 0.0) || !(opts.delta_max >= opts.delta_min)) {
    throw std::invalid_argument("tangent shell must exclude zero: 0 < delta_min <= delta_max");
  }
  VerificationReport report;
  report.check = "ratio";
  report.ratio_cap = opts.cap;
  std::mt19937_64 rng(opts.seed);

  auto evaluate = [&](const Vector& x) {
    const Vector delta =
        unit_direction(rng, n) *
        std::uniform_real_distribution<double>(opts.delta_min, opts.delta_max)(rng);
    const MetricEval me = eval_metric(metric, x, delta);
    const Matrix b_mat = sys.input_matrix(x);
    const std::vector<Matrix> db = sys.input_jacobian(x);
    const double b = (b_mat.transpose() * me.d_tangent).squaredNorm();
    ++report.checked_samples;
    for (int i = 0; i < m; ++i) {
      const double numerator =
          me.d_state.dot(b_mat.col(i)) + me.d_tangent.dot(db[i] * delta);
      if (numerator == 0.0) continue;
      const double ratio = std::abs(numerator) / b;  // b == 0 gives +inf
      if (!(ratio < report.max_ratio)) {
        report.max_ratio = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
        if (!(ratio < opts.cap)) {
          report.violations.clear();
          report.violations.push_back(make_violation(x, Vector(), delta, numerator, b));
        }
      }
    }
  };

  if (opts.state_box.bounded() && n <= 10) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vector vertex(n);
      for (int i = 0; i < n; ++i) {
        vertex(i) = (mask >> i) & 1 ? opts.state_box.upper(i) : opts.state_box.lower(i);
      }
      evaluate(vertex);
    }
  }
  for (int k = 0; k < opts.samples; ++k) evaluate(sample_box(rng, opts.state_box));
  report.notes.push_back("ratio cap = " + std::to_string(opts.cap));
  return report;
}

VerificationReport dissipation_monitor(const Trajectory& traj, const RateSpec& rate,
                                       double diss_tol) {
  VerificationReport report;
  report.check = "dissipation";
  for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
    const TrajectorySample& s0 = traj.samples[k];
    const TrajectorySample& s1 = traj.samples[k + 1];
    if (s1.path_replaced) continue;
    const double dt = s1.t - s0.t;
    const std::size_t nodes = std::min(s0.node_values.size(), s1.node_values.size());
    for (std::size_t j = 1; j + 1 < nodes; ++j) {
      const double v0 = s0.node_values[j];
      const double v1 = s1.node_values[j];
      const double vdot = (v1 - v0) / dt;
      const double bound = -rate(0.5 * (v0 + v1)) + diss_tol;
      ++report.checked_samples;
      if (vdot > bound) {
        Violation violation;
        violation.x = s0.state;
        violation.u = s0.control;
        violation.lhs = vdot;
        violation.rhs = bound;
        violation.t = s0.t;
        violation.node = static_cast<int>(j);
        report.violations.push_back(std::move(violation));
      }
    }
  }
  return report;
}

ConvergenceReport convergence_report(const Trajectory& traj,
                                     const FinslerMetric& metric,
                                     const RateSpec& rate) {
  if (rate.kind() != RateSpec::Kind::kLinear) {
    throw RateNotExponential("convergence_report needs alpha(V) = lambda V");
  }
  if (traj.samples.size() < 10) {
    throw InsufficientSamples("convergence_report needs at least 10 samples");
  }
  ConvergenceReport report;
  report.predicted_rate = rate.lambda() / metric.p();
  report.overshoot_bound = std::pow(metric.c2() / metric.c1(), 1.0 / metric.p());

  const double t0 = traj.samples.front().t;
  const double t_end = traj.samples.back().t;
  const double e0 = traj.samples.front().energy;
  const double window_start = t0 + 0.2 * (t_end - t0);

  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  int count = 0;
  for (const TrajectorySample& s : traj.samples) {
    report.overshoot_observed = std::max(report.overshoot_observed, s.energy / e0);
    report.envelope_ratio = std::max(
        report.envelope_ratio, s.energy / (e0 * std::exp(-report.predicted_rate * (s.t - t0))));
    if (s.t < window_start || !(s.energy > 0.0)) continue;
    const double y = std::log(s.energy);
    sum_t += s.t;
    sum_y += y;
    sum_tt += s.t * s.t;
    sum_ty += s.t * y;
    ++count;
  }
  if (count < 2) throw InsufficientSamples("too few positive energies in the fit window");
  const double slope = (count * sum_ty - sum_t * sum_y) / (count * sum_tt - sum_t * sum_t);
  report.fitted_rate = -slope;
  return report;
}

}  // namespace finsler_ccm
