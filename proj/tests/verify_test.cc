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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

namespace finsler_ccm {
namespace {

Th1Options example1_box(int samples, std::uint64_t seed = 0) {
  Th1Options opts;
  opts.state_box = Box::uniform(2, -5.0, 5.0);
  opts.control_box = Box::uniform(1, -5.0, 5.0);
  opts.samples = samples;
  opts.seed = seed;
  return opts;
}

Trajectory synthetic(double rate, int count, double dt, double v_node) {
  Trajectory traj;
  traj.state_dim = 1;
  traj.input_dim = 1;
  for (int k = 0; k < count; ++k) {
    TrajectorySample s;
    s.t = k * dt;
    s.state = Vector{{1.0}};
    s.control = Vector{{0.0}};
    s.energy = std::exp(-rate * s.t);
    s.node_values = {v_node, v_node, v_node};
    traj.samples.push_back(s);
  }
  return traj;
}

TEST(CheckTh1Test, Example1PassesWithMargin) {
  const auto report = check_th1(load_example("example1"), load_metric("quartic2d"),
                                RateSpec::linear(3.0), example1_box(2000));
  EXPECT_TRUE(report.passed());
  EXPECT_GT(report.checked_samples, 1000);
}

TEST(CheckTh1Test, Example1FailsWhenRateTooLarge) {
  // On the kernel a = -4 d2^4 + 5 d2^4 > 0.
  const auto report = check_th1(load_example("example1"), load_metric("quartic2d"),
                                RateSpec::linear(5.0), example1_box(500));
  EXPECT_FALSE(report.passed());
  const Violation& w = report.violations.front();
  EXPECT_LT(std::abs(w.delta(0)), 1e-2);
  EXPECT_GE(w.lhs, w.rhs);
}

TEST(CheckTh1Test, ExplicitKernelParametrization) {
  Th1Options opts = example1_box(500);
  opts.kernel_sampler = [](const Vector&) {
    return std::vector<Vector>{Vector{{0.0, 1.0}}, Vector{{0.0, -1.0}}};
  };
  const auto report =
      check_th1(load_example("example1"), load_metric("quartic2d"), RateSpec::linear(3.0), opts);
  EXPECT_TRUE(report.passed());
  EXPECT_GE(report.checked_samples, 1000);
  EXPECT_NE(report.notes.back().find("explicit"), std::string::npos);
}

TEST(CheckTh1Test, UncontrollableFailsWithWitness) {
  Th1Options opts;
  opts.state_box = Box::uniform(1, -2.0, 2.0);
  opts.control_box = Box::uniform(1, -1.0, 1.0);
  opts.samples = 100;
  const auto report = check_th1(load_example("uncontrollable"), load_metric("quadratic1d"),
                                RateSpec::zero(), opts);
  EXPECT_FALSE(report.passed());
  ASSERT_FALSE(report.violations.empty());
  const Violation& w = report.violations.front();
  EXPECT_NEAR(w.lhs, 2.0 * w.delta(0) * w.delta(0), 1e-12);
}

TEST(CheckTh1Test, Example3Passes) {
  Th1Options opts;
  opts.state_box = Box::uniform(1, -1.0, 1.0);
  opts.control_box = Box::uniform(1, -5.0, 5.0);
  opts.samples = 500;
  const auto report = check_th1(load_example("example3"), load_metric("quadratic1d"),
                                RateSpec::zero(), opts);
  EXPECT_TRUE(report.passed());
  EXPECT_GT(report.checked_samples, 0);
}

TEST(CheckTh1Test, DeterministicForSeed) {
  for (const RateSpec& rate : {RateSpec::linear(3.0), RateSpec::linear(5.0)}) {
    const auto a = check_th1(load_example("example1"), load_metric("quartic2d"), rate,
                             example1_box(300, 17));
    const auto b = check_th1(load_example("example1"), load_metric("quartic2d"), rate,
                             example1_box(300, 17));
    EXPECT_EQ(a.checked_samples, b.checked_samples);
    EXPECT_EQ(a.violations.size(), b.violations.size());
    EXPECT_EQ(a.passed(), b.passed());
  }
}

TEST(CheckTh1Test, BoxShapeMismatch) {
  Th1Options opts = example1_box(10);
  opts.state_box = Box::uniform(1, -1.0, 1.0);
  EXPECT_THROW(check_th1(load_example("example1"), load_metric("quartic2d"), RateSpec::zero(),
                         opts),
               ShapeError);
}

TEST(CheckRatioBoundTest, Example1IsExactlyZero) {
  RatioOptions opts;
  opts.state_box = Box::uniform(2, -5.0, 5.0);
  const auto report = check_ratio_bound(load_example("example1"), load_metric("quartic2d"), opts);
  EXPECT_EQ(report.max_ratio, 0.0);
  EXPECT_TRUE(report.passed());
  EXPECT_GE(report.checked_samples, 1000);
}

TEST(CheckRatioBoundTest, Example3InverseCube) {
  const auto sys = load_example("example3");
  const auto metric = load_metric("quadratic1d");
  RatioOptions opts;
  opts.state_box = Box::uniform(1, 0.01, 1.0);
  const auto near_zero = check_ratio_bound(sys, metric, opts);
  EXPECT_NEAR(near_zero.max_ratio, 1e6, 1e4);
  EXPECT_TRUE(near_zero.passed());
  opts.state_box = Box::uniform(1, 0.5, 1.0);
  EXPECT_NEAR(check_ratio_bound(sys, metric, opts).max_ratio, 8.0, 0.08);
}

// Oracle: the ratio for example3 with V = delta^2 is 1 / x^3 at every delta.
TEST(CheckRatioBoundTest, Example3MatchesClosedFormPointwise) {
  const auto sys = load_example("example3");
  const auto metric = load_metric("quadratic1d");
  for (double x : {0.2, 0.5, 0.9}) {
    RatioOptions opts;
    opts.state_box = Box::uniform(1, x, x);
    opts.samples = 10;
    EXPECT_NEAR(check_ratio_bound(sys, metric, opts).max_ratio, 1.0 / (x * x * x),
                1e-9 / (x * x * x));
  }
}

TEST(CheckRatioBoundTest, Example3UnboundedNearZero) {
  RatioOptions opts;
  opts.state_box = Box::uniform(1, 0.001, 1.0);
  const auto report =
      check_ratio_bound(load_example("example3"), load_metric("quadratic1d"), opts);
  EXPECT_FALSE(report.passed());
  EXPECT_TRUE(report.ratio_unbounded());
  EXPECT_NEAR(report.max_ratio, 1e9, 1e7);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_NEAR(report.violations.front().x(0), 0.001, 1e-12);
}

TEST(CheckRatioBoundTest, TangentShellMustExcludeZero) {
  RatioOptions opts;
  opts.state_box = Box::uniform(1, 0.5, 1.0);
  opts.delta_min = 0.0;
  EXPECT_THROW(check_ratio_bound(load_example("example3"), load_metric("quadratic1d"), opts),
               std::invalid_argument);
}

TEST(DissipationMonitorTest, Example1RunHasNoViolations) {
  const auto sys = load_example("example1");
  const auto metric = load_metric("quartic2d");
  const auto origin = TargetTrajectory::constant(Vector::Zero(2), Vector::Zero(1));
  const Trajectory traj =
      open_loop_run(sys, metric, RateSpec::zero(), origin, Vector{{1.0, 1.0}}, RunOptions{});
  const auto report = dissipation_monitor(traj, RateSpec::zero(), 1e-3);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.checked_samples, 500 * 48);
}

TEST(DissipationMonitorTest, ConstantValueViolatesEverywhere) {
  const Trajectory traj = synthetic(0.0, 12, 0.1, 2.0);
  const auto report = dissipation_monitor(traj, RateSpec::linear(1.0), 1e-3);
  EXPECT_EQ(report.checked_samples, 11);
  EXPECT_EQ(report.violations.size(), 11u);
  EXPECT_FALSE(report.passed());
}

TEST(DissipationMonitorTest, EmptyTrajectoryPasses) {
  const auto report = dissipation_monitor(Trajectory{}, RateSpec::linear(1.0), 1e-3);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.checked_samples, 0);
}

TEST(DissipationMonitorTest, SkipsReplacementInstants) {
  Trajectory traj = synthetic(0.0, 3, 0.1, 1.0);
  traj.samples[1].node_values = {5.0, 5.0, 5.0};
  traj.samples[1].path_replaced = true;
  traj.samples[2].node_values = {4.0, 4.0, 4.0};
  const auto report = dissipation_monitor(traj, RateSpec::zero(), 1e-3);
  EXPECT_EQ(report.checked_samples, 1);
  EXPECT_TRUE(report.passed());
}

TEST(DissipationMonitorTest, ShippedConfigurationsPass) {
  struct Case {
    const char* system;
    const char* metric;
    Vector x0;
    Vector target;
  };
  const double pi = std::numbers::pi;
  const std::vector<Case> cases = {
      {"example1", "quartic2d", Vector{{1.0, 1.0}}, Vector::Zero(2)},
      {"pendulum", "quadratic_pendulum", Vector{{0.0}}, Vector{{pi}}},
      {"pendulum", "quadratic_pendulum", Vector{{pi}}, Vector{{0.0}}},
      {"pendulum", "randers_pendulum", Vector{{0.0}}, Vector{{pi}}},
      {"pendulum", "randers_pendulum", Vector{{pi}}, Vector{{0.0}}},
  };
  for (const Case& c : cases) {
    const RateSpec rate = RateSpec::linear(1.0);
    const Trajectory traj = open_loop_run(load_example(c.system), load_metric(c.metric), rate,
                                          TargetTrajectory::constant(c.target, Vector{{0.0}}),
                                          c.x0, RunOptions{});
    const auto report = dissipation_monitor(traj, rate, 1e-3);
    EXPECT_TRUE(report.passed()) << c.system << " / " << c.metric << " from " << c.x0(0)
                                 << ": " << report.violations.size() << " violations";
    EXPECT_GT(report.checked_samples, 0);
  }
}

TEST(ConvergenceReportTest, PredictedRatesAndBounds) {
  const Trajectory traj = synthetic(0.7, 50, 0.1, 1.0);
  const auto quartic = convergence_report(traj, load_metric("quartic2d"), RateSpec::linear(1.0));
  EXPECT_EQ(quartic.predicted_rate, 0.25);
  EXPECT_EQ(quartic.overshoot_bound, 1.0);
  const auto euclid = convergence_report(traj, load_metric("euclidean2d"), RateSpec::linear(2.0));
  EXPECT_EQ(euclid.predicted_rate, 1.0);
  const auto randers =
      convergence_report(traj, load_metric("randers_pendulum"), RateSpec::linear(1.0));
  EXPECT_EQ(randers.overshoot_bound, 3.0);
}

TEST(ConvergenceReportTest, FitsExponentialExactly) {
  const Trajectory traj = synthetic(0.7, 50, 0.1, 1.0);
  const auto report = convergence_report(traj, load_metric("quartic2d"), RateSpec::linear(1.0));
  EXPECT_NEAR(report.fitted_rate, 0.7, 1e-10);
  EXPECT_EQ(report.overshoot_observed, 1.0);
  EXPECT_TRUE(report.rate_ok());
  EXPECT_TRUE(report.overshoot_ok());
}

TEST(ConvergenceReportTest, Errors) {
  const Trajectory traj = synthetic(0.7, 50, 0.1, 1.0);
  EXPECT_THROW(convergence_report(traj, load_metric("quartic2d"), RateSpec::zero()),
               RateNotExponential);
  EXPECT_THROW(convergence_report(synthetic(0.7, 5, 0.1, 1.0), load_metric("quartic2d"),
                                  RateSpec::linear(1.0)),
               InsufficientSamples);
}

TEST(ConvergenceReportTest, Example1Run) {
  const auto sys = load_example("example1");
  const auto metric = load_metric("quartic2d");
  const RateSpec rate = RateSpec::linear(1.0);
  const Trajectory traj = open_loop_run(
      sys, metric, rate, TargetTrajectory::constant(Vector::Zero(2), Vector::Zero(1)),
      Vector{{1.0, 1.0}}, RunOptions{});
  const auto report = convergence_report(traj, metric, rate);
  EXPECT_TRUE(report.rate_ok());
  EXPECT_TRUE(report.overshoot_ok());
  EXPECT_LE(report.envelope_ratio, 1.05);
}

}  // namespace
}  // namespace finsler_ccm
