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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "finsler_ccm/metrics.h"
#include "finsler_ccm/systems.h"

namespace finsler_ccm {
namespace {

Vector integrate_linear(const Matrix& a, Vector x, double t_end, int steps) {
  const double dt = t_end / steps;
  for (int k = 0; k < steps; ++k) {
    x = rk4_step([&](const Vector& s) -> Vector { return a * s; }, x, dt);
  }
  return x;
}

TEST(Grid1DTest, EndpointsAreExact) {
  const Grid1D grid(0.0, 1.0, 7);
  EXPECT_EQ(grid.node(0), 0.0);
  EXPECT_EQ(grid.node(6), 1.0);
  EXPECT_DOUBLE_EQ(grid.step(), 1.0 / 6.0);
  const Grid1D odd(-0.3, 2.9, 13);
  EXPECT_EQ(odd.node(12), 2.9);
  EXPECT_THROW(Grid1D(0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(Grid1D(1.0, 1.0, 5), std::invalid_argument);
}

TEST(ToleranceConfigTest, RejectsNonPositiveFields) {
  ToleranceConfig tol;
  EXPECT_NO_THROW(tol.validate());
  tol.b_eps = 0.0;
  EXPECT_THROW(tol.validate(), std::invalid_argument);
  tol = ToleranceConfig{};
  tol.diss_tol = std::nan("");
  EXPECT_THROW(tol.validate(), std::invalid_argument);
}

TEST(Rk4Test, ZeroFieldLeavesStateUnchanged) {
  const Vector x{{1.0, 2.0}};
  const Vector next = rk4_step([](const Vector& s) -> Vector { return Vector::Zero(s.size()); },
                               x, 0.1);
  EXPECT_EQ(next, x);
}

TEST(Rk4Test, ScalarDecayMatchesExponential) {
  const Vector x = integrate_linear(Matrix{{-1.0}}, Vector{{1.0}}, 1.0, 100);
  EXPECT_NEAR(x(0), std::exp(-1.0), 1e-8);
}

TEST(Rk4Test, DiagonalSystemMatchesMatrixExponential) {
  const Matrix a{{1.0, 0.0}, {0.0, -1.0}};
  const Vector x = integrate_linear(a, Vector{{1.0, 1.0}}, 1.0, 1000);
  EXPECT_NEAR(x(0), std::exp(1.0), 1e-9);
  EXPECT_NEAR(x(1), std::exp(-1.0), 1e-9);
}

TEST(Rk4Test, FourthOrderConvergence) {
  const Matrix a{{1.0, 0.0}, {0.0, -1.0}};
  const Vector exact{{std::exp(1.0), std::exp(-1.0)}};
  double previous = 0.0;
  for (int steps : {10, 20, 40}) {
    const double err = (integrate_linear(a, Vector{{1.0, 1.0}}, 1.0, steps) - exact).norm();
    if (previous > 0.0) EXPECT_GE(previous / err, 12.0) << "steps = " << steps;
    previous = err;
  }
}

TEST(Rk4Test, NonFiniteResultThrows) {
  auto blowup = [](const Vector& s) -> Vector {
    return Vector::Constant(s.size(), std::numeric_limits<double>::infinity());
  };
  EXPECT_THROW(rk4_step(blowup, Vector{{1.0}}, 0.1), NumericalBlowup);
}

TEST(TrapezoidTest, ZeroSamples) {
  const std::vector<double> zeros(11, 0.0);
  EXPECT_EQ(trapezoid_integral(zeros, 0.1), 0.0);
}

TEST(TrapezoidTest, ExactOnAffineIntegrands) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<int> nodes(2, 200);
  for (int trial = 0; trial < 100; ++trial) {
    const double slope = coef(rng), offset = coef(rng);
    const Grid1D grid(0.0, 1.0, nodes(rng));
    std::vector<double> samples(grid.count());
    for (int j = 0; j < grid.count(); ++j) samples[j] = slope * grid.node(j) + offset;
    EXPECT_NEAR(trapezoid_integral(samples, grid.step()), 0.5 * slope + offset, 1e-12);
  }
  const Grid1D grid(0.0, 1.0, 5);
  std::vector<double> identity(5);
  for (int j = 0; j < 5; ++j) identity[j] = grid.node(j);
  EXPECT_EQ(trapezoid_integral(identity, grid.step()), 0.5);
}

TEST(TrapezoidTest, SquareOnFineGrid) {
  const Grid1D grid(0.0, 1.0, 101);
  std::vector<double> samples(101);
  for (int j = 0; j < 101; ++j) samples[j] = grid.node(j) * grid.node(j);
  EXPECT_NEAR(trapezoid_integral(samples, grid.step()), 1.0 / 3.0, 1e-4);
}

TEST(TrapezoidTest, NeedsTwoSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(trapezoid_integral(one, 0.1), InsufficientSamples);
  EXPECT_THROW(trapezoid_integral({}, 0.1), InsufficientSamples);
}

TEST(FiniteDiffJacobianTest, Identity) {
  const Matrix jac =
      finite_diff_jacobian([](const Vector& x) { return x; }, Vector{{0.3, -2.0, 5.0}}, 1e-6);
  EXPECT_TRUE(jac.isApprox(Matrix::Identity(3, 3), 1e-10));
}

TEST(FiniteDiffJacobianTest, QuadraticMap) {
  auto fn = [](const Vector& x) { return Vector{{x(0) * x(0), x(0) * x(1)}}; };
  const Matrix jac = finite_diff_jacobian(fn, Vector{{1.0, 2.0}}, 1e-5);
  const Matrix expected{{2.0, 0.0}, {2.0, 1.0}};
  EXPECT_LT((jac - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FiniteDiffJacobianTest, ConstantMap) {
  const Matrix jac = finite_diff_jacobian([](const Vector&) { return Vector{{4.0, -1.0}}; },
                                          Vector{{1.0, 1.0}}, 1e-6);
  EXPECT_LT(jac.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FiniteDiffJacobianTest, NonFiniteEntriesThrow) {
  auto fn = [](const Vector& x) { return Vector{{1.0 / (x(0) - 1e-7)}}; };
  EXPECT_THROW(finite_diff_jacobian(fn, Vector{{0.0}}, 1e-7), NumericalBlowup);
}

double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

// Analytic Jacobians of every built-in system agree with finite differences.
TEST(FiniteDiffJacobianTest, AgreesWithAnalyticSystemJacobians) {
  std::mt19937_64 rng(11);
  for (const std::string& name : example_names()) {
    const ControlAffineSystem sys = load_example(name);
    const Box& dom = sys.domain();
    for (int k = 0; k < 100; ++k) {
      Vector x(sys.state_dim());
      for (int i = 0; i < sys.state_dim(); ++i) {
        const double lo = std::isfinite(dom.lower(i)) ? dom.lower(i) : -5.0;
        const double hi = std::isfinite(dom.upper(i)) ? dom.upper(i) : 5.0;
        x(i) = std::uniform_real_distribution<double>(lo, hi)(rng);
      }
      EXPECT_LT(relative_error(sys.drift_jacobian_fd(x), sys.drift_jacobian(x)), 1e-5) << name;
      const auto fd = sys.input_jacobian_fd(x);
      const auto exact = sys.input_jacobian(x);
      for (int i = 0; i < sys.input_dim(); ++i) {
        EXPECT_LT(relative_error(fd[i], exact[i]), 1e-5) << name;
      }
    }
  }
}

// Analytic metric gradients agree with finite differences.
TEST(FiniteDiffJacobianTest, AgreesWithAnalyticMetricGradients) {
  std::mt19937_64 rng(12);
  for (const std::string& name : metric_names()) {
    const FinslerMetric metric = load_metric(name);
    const int n = metric.dim();
    for (int k = 0; k < 100; ++k) {
      Vector x = Vector::Random(n);
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
      if (d.norm() < 0.1) continue;
      const Matrix fd = finite_diff_jacobian(
          [&](const Vector& dd) { return Vector{{metric.value(x, dd)}}; }, d, 1e-6);
      EXPECT_LT(relative_error(fd.transpose(), metric.tangent_gradient(x, d)), 1e-5) << name;
    }
  }
}

}  // namespace
}  // namespace finsler_ccm
