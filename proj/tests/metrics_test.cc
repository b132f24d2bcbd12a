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
#include <random>

#include <gtest/gtest.h>

namespace finsler_ccm {
namespace {

TEST(EvalMetricTest, Quartic) {
  const auto metric = load_metric("quartic2d");
  const MetricEval e = eval_metric(metric, Vector{{0.3, -2.0}}, Vector{{1.0, 1.0}});
  EXPECT_EQ(e.value, 2.0);
  EXPECT_EQ(e.d_state, (Vector{{0.0, 0.0}}));
  EXPECT_EQ(e.d_tangent, (Vector{{4.0, 4.0}}));
}

TEST(EvalMetricTest, RandersSquareIsAsymmetric) {
  const auto metric = load_metric("randers_pendulum");
  EXPECT_EQ(eval_metric(metric, Vector{{1.0}}, Vector{{1.0}}).value, 1.0);
  EXPECT_EQ(eval_metric(metric, Vector{{1.0}}, Vector{{-1.0}}).value, 9.0);
  EXPECT_THROW(eval_metric(metric, Vector{{1.0}}, Vector{{0.0}}), NonSmoothAtZero);
}

TEST(EvalMetricTest, QuadraticPendulum) {
  const auto metric = load_metric("quadratic_pendulum");
  const MetricEval e = eval_metric(metric, Vector{{2.0}}, Vector{{0.5}});
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.d_tangent(0), 4.0);
}

TEST(EvalMetricTest, ShapeMismatch) {
  const auto metric = load_metric("quartic2d");
  EXPECT_THROW(eval_metric(metric, Vector{{0.0}}, Vector{{1.0, 1.0}}), ShapeError);
}

TEST(EvalFTest, Examples) {
  EXPECT_NEAR(eval_F(load_metric("quartic2d"), Vector::Zero(2), Vector{{1.0, 1.0}}),
              std::pow(2.0, 0.25), 1e-15);
  EXPECT_EQ(eval_F(load_metric("randers_pendulum"), Vector{{0.0}}, Vector{{-1.0}}), 3.0);
  EXPECT_EQ(eval_F(load_metric("euclidean2d"), Vector::Zero(2), Vector{{3.0, 4.0}}), 5.0);
}

TEST(EvalFTest, ZeroTangentGivesZero) {
  for (const std::string& name : metric_names()) {
    const auto metric = load_metric(name);
    EXPECT_EQ(eval_F(metric, Vector::Ones(metric.dim()), Vector::Zero(metric.dim())), 0.0)
        << name;
  }
}

TEST(EvalFTest, NegativeValueIsInvalid) {
  FinslerMetric bad("negative", 1, [](const Vector&, const Vector& d) { return -d(0) * d(0); },
                    [](const Vector&, const Vector& d) { return Vector{{-2.0 * d(0)}}; }, 2.0,
                    1.0, 1.0);
  EXPECT_THROW(eval_F(bad, Vector{{0.0}}, Vector{{1.0}}), InvalidMetric);
}

TEST(FinslerMetricTest, RejectsBadConstants) {
  auto v = [](const Vector&, const Vector& d) { return d.squaredNorm(); };
  auto g = [](const Vector&, const Vector& d) -> Vector { return 2.0 * d; };
  EXPECT_THROW(FinslerMetric("m", 1, v, g, 0.5, 1.0, 1.0), InvalidMetric);
  EXPECT_THROW(FinslerMetric("m", 1, v, g, 2.0, 0.0, 1.0), InvalidMetric);
  EXPECT_THROW(FinslerMetric("m", 1, v, g, 2.0, 2.0, 1.0), InvalidMetric);
}

TEST(LoadMetricTest, Constants) {
  const auto quartic = load_metric("quartic2d");
  EXPECT_EQ(quartic.p(), 4.0);
  EXPECT_EQ(quartic.c1(), 1.0);
  EXPECT_EQ(quartic.c2(), 1.0);
  const auto randers = load_metric("randers_pendulum");
  EXPECT_EQ(randers.p(), 2.0);
  EXPECT_EQ(randers.c1(), 1.0);
  EXPECT_EQ(randers.c2(), 9.0);
  EXPECT_EQ(load_metric("randers").name(), "randers_pendulum");
  const auto pend = load_metric("quadratic_pendulum");
  EXPECT_EQ(pend.c1(), 4.0);
  EXPECT_EQ(pend.c2(), 4.0);
  EXPECT_THROW(load_metric("riemannian3d"), UnknownMetric);
}

// The Randers constants are the extremes of V / delta^2 over delta = +-1.
TEST(LoadMetricTest, RandersConstantsMatchExtremes) {
  const auto randers = load_metric("randers_pendulum");
  const double plus = randers.value(Vector{{0.0}}, Vector{{1.0}});
  const double minus = randers.value(Vector{{0.0}}, Vector{{-1.0}});
  EXPECT_EQ(std::min(plus, minus), randers.c1());
  EXPECT_EQ(std::max(plus, minus), randers.c2());
}

TEST(AxiomsTest, EuclideanPasses) {
  const auto report = check_finsler_axioms(load_metric("euclidean2d"),
                                           SampleSpec{Box::unbounded(2), 1000, 1});
  EXPECT_TRUE(report.passed());
  EXPECT_GT(report.result("subadditivity").checked, 900);
  EXPECT_EQ(report.result("positivity").checked, 1000);
}

TEST(AxiomsTest, SignedLineFailsPositivity) {
  const auto report = check_finsler_axioms(load_metric("signed_line"),
                                           SampleSpec{Box::unbounded(1), 1000, 1});
  EXPECT_FALSE(report.passed());
  const AxiomResult& pos = report.result("positivity");
  EXPECT_FALSE(pos.passed);
  EXPECT_LT(pos.delta(0), 0.0);
  EXPECT_GT(eval_F(load_metric("signed_line"), Vector{{0.0}}, Vector{{1.0}}), 0.0);
  EXPECT_LT(eval_F(load_metric("signed_line"), Vector{{0.0}}, Vector{{-1.0}}), 0.0);
}

TEST(AxiomsTest, RandersPasses) {
  const auto metric = load_metric("randers_pendulum");
  const auto report = check_finsler_axioms(metric, SampleSpec{Box::uniform(1, 0.0, 3.2), 1000, 1});
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(eval_F(metric, Vector{{0.0}}, Vector{{1.0}}), 1.0);
  EXPECT_EQ(eval_F(metric, Vector{{0.0}}, Vector{{-1.0}}), 3.0);
  EXPECT_EQ(eval_F(metric, Vector{{0.0}}, Vector{{-2.0}}), 6.0);
}

TEST(AxiomsTest, DetectsNonHomogeneousStructure) {
  FinslerMetric cubic("cubic", 1, [](const Vector&, const Vector& d) { return d(0) * d(0); },
                      [](const Vector&, const Vector& d) { return Vector{{2.0 * d(0)}}; }, 2.0,
                      1.0, 1.0);
  cubic.set_structure([](const Vector&, const Vector& d) { return std::abs(d(0) * d(0)); });
  const auto report = check_finsler_axioms(cubic, SampleSpec{Box::unbounded(1), 200, 3});
  EXPECT_FALSE(report.result("homogeneity").passed);
}

TEST(AxiomsTest, DetectsBoundsViolation) {
  // Declared constants are too tight for V = 2 |delta|^2.
  FinslerMetric loose("loose", 2, [](const Vector&, const Vector& d) { return 2.0 * d.squaredNorm(); },
                      [](const Vector&, const Vector& d) -> Vector { return 4.0 * d; }, 2.0, 1.0,
                      1.5);
  loose.set_structure([](const Vector&, const Vector& d) { return d.norm(); });
  const auto report = check_finsler_axioms(loose, SampleSpec{Box::unbounded(2), 100, 3});
  EXPECT_FALSE(report.result("bounds").passed);
  EXPECT_TRUE(report.result("homogeneity").passed);
}

TEST(AxiomsTest, DeterministicForSeed) {
  const auto metric = load_metric("quartic2d");
  const auto a = check_finsler_axioms(metric, SampleSpec{Box::unbounded(2), 300, 9});
  const auto b = check_finsler_axioms(metric, SampleSpec{Box::unbounded(2), 300, 9});
  for (size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].worst, b.results[i].worst);
  }
}

class BuiltinMetricTest : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinMetricTest, Homogeneity) {
  const auto metric = load_metric(GetParam());
  const int n = metric.dim();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    Vector x(n), d(n);
    for (int i = 0; i < n; ++i) {
      x(i) = coord(rng);
      d(i) = coord(rng);
    }
    const double lambda = 10.0 * (1.0 - unit(rng));
    const double f = eval_F(metric, x, d);
    EXPECT_LE(std::abs(eval_F(metric, x, Vector(lambda * d)) - lambda * f),
              1e-9 * (1.0 + lambda * std::abs(f)));
  }
}

TEST_P(BuiltinMetricTest, GradientMatchesCentralDifferences) {
  const auto metric = load_metric(GetParam());
  const int n = metric.dim();
  std::mt19937_64 rng(22);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  constexpr double kH = 1e-6;
  for (int k = 0; k < 200; ++k) {
    Vector x(n), d(n);
    for (int i = 0; i < n; ++i) {
      x(i) = normal(rng);
      d(i) = normal(rng);
    }
    d *= radius(rng) / d.norm();
    const Vector grad = metric.tangent_gradient(x, d);
    Vector fd(n);
    for (int i = 0; i < n; ++i) {
      const double h = kH * std::max(1.0, std::abs(d(i)));
      Vector plus = d, minus = d;
      plus(i) += h;
      minus(i) -= h;
      fd(i) = (metric.value(x, plus) - metric.value(x, minus)) / (2.0 * h);
    }
    EXPECT_LE((grad - fd).norm(), 1e-5 * std::max(1.0, grad.norm()));
  }
}

TEST_P(BuiltinMetricTest, Bounds) {
  const auto metric = load_metric(GetParam());
  const int n = metric.dim();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    Vector x(n), d(n);
    for (int i = 0; i < n; ++i) {
      x(i) = coord(rng);
      d(i) = coord(rng);
    }
    const double v = metric.value(x, d);
    const double fp = std::pow(std::abs(eval_F(metric, x, d)), metric.p());
    EXPECT_LE(metric.c1() * fp, v * (1.0 + 1e-12) + 1e-300);
    EXPECT_LE(v, metric.c2() * fp * (1.0 + 1e-12));
  }
}

TEST_P(BuiltinMetricTest, ValueVanishesOnlyAtZero) {
  const auto metric = load_metric(GetParam());
  const int n = metric.dim();
  EXPECT_EQ(metric.value(Vector::Zero(n), Vector::Zero(n)), 0.0);
  std::mt19937_64 rng(24);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 100; ++k) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
    EXPECT_GT(metric.value(Vector::Zero(n), d), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(AllMetrics, BuiltinMetricTest, ::testing::ValuesIn(metric_names()));

}  // namespace
}  // namespace finsler_ccm
