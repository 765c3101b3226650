// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "qoc/experiments.hpp"
#include "test_support.hpp"

namespace qoc {
namespace {

ExperimentConfig toy() { return preset("custom"); }

// Target equal to the free evolution, so the zero train is optimal.
ControlProblem drift_problem(int spins, Layout layout) {
  ControlProblem p;
  p.system = d_norleucine().leading(spins);
  p.horizon = 50e-6;
  p.intervals = 20;
  p.layout = layout;
  p.axes = layout == Layout::centered ? std::vector<Axis>{Axis::x} : std::vector<Axis>{Axis::x, Axis::y};
  p.target = TargetGate(expm_spectral(eigendecompose(p.drift()), p.horizon));
  return p;
}

void expect_same(const OptimizationReport& a, const OptimizationReport& b) {
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.perturbed, b.perturbed);
  EXPECT_EQ(a.final_train, b.final_train);
  EXPECT_EQ(a.final_field.has_value(), b.final_field.has_value());
  if (a.final_field && b.final_field) EXPECT_EQ(*a.final_field, *b.final_field);
  EXPECT_EQ(a.error, b.error);
}

void expect_monotone(const OptimizationReport& r) {
  ASSERT_EQ(r.trace.size(), r.perturbed.size());
  for (std::size_t j = 1; j < r.trace.size(); ++j) {
    if (!r.perturbed[j]) EXPECT_LE(r.trace[j], r.trace[j - 1]) << "iteration " << j;
  }
}

TEST(Optimizer, DriftTargetConvergesAtZero) {
  for (Layout layout : {Layout::centered, Layout::nested}) {
    const ControlProblem p = drift_problem(2, layout);
    const PwmTrain zero = zero_train(p.pwm_config(), std::vector<double>(p.axes.size(), p.system.eps));
    const OptimizationReport r = optimize_pwm(p, OptimizerConfig{}, zero);
    EXPECT_EQ(r.status, RunStatus::converged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_LE(r.final_infidelity(), 1e-12);
    EXPECT_EQ(*r.final_train, zero);
  }
}

TEST(Optimizer, GrapeDriftTargetConvergesAtZero) {
  const ControlProblem p = drift_problem(2, Layout::centered);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, p.intervals);
  const OptimizationReport r = optimize_grape(p, OptimizerConfig{}, zero);
  EXPECT_EQ(r.status, RunStatus::converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LE(r.final_infidelity(), 1e-12);
}

TEST(Optimizer, ToyReachesHighPrecisionPwm) {
  const ExperimentConfig c = toy();
  const OptimizationReport r = optimize_pwm(c.problem(), c.optimizer);
  EXPECT_EQ(r.status, RunStatus::converged);
  EXPECT_LE(r.iterations, 200);
  EXPECT_LE(r.final_infidelity(), 1e-6);
  expect_monotone(r);
  ASSERT_TRUE(r.final_train);
  EXPECT_NO_THROW(r.final_train->validate());
  // The reported infidelity is that of the returned train.
  const ControlProblem p = c.problem();
  const SpectralCache cache = SpectralCache::for_train(p.drift(), p.generators(), *r.final_train);
  EXPECT_NEAR(infidelity(p.target, pwm_propagate(cache, *r.final_train).U), r.final_infidelity(), 1e-14);
}

TEST(Optimizer, ToyReachesHighPrecisionGrape) {
  const ExperimentConfig c = toy();
  const OptimizationReport r = optimize_grape(c.problem(), c.optimizer);
  EXPECT_EQ(r.status, RunStatus::converged);
  EXPECT_LE(r.iterations, 200);
  EXPECT_LE(r.final_infidelity(), 1e-6);
  expect_monotone(r);
  ASSERT_TRUE(r.final_field);
  EXPECT_LE(r.final_field->cwiseAbs().maxCoeff(), c.problem().system.eps);
}

TEST(Optimizer, ToyAcrossSeeds) {
  ExperimentConfig c = toy();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    c.optimizer.seed = seed;
    EXPECT_LE(optimize_pwm(c.problem(), c.optimizer).final_infidelity(), 1e-6) << "seed " << seed;
    EXPECT_LE(optimize_grape(c.problem(), c.optimizer).final_infidelity(), 1e-6) << "seed " << seed;
  }
}

TEST(Optimizer, IteratesStayFeasible) {
  // A tight bound forces widths onto the box.
  ExperimentConfig c = toy();
  c.eps = kTwoPi * 5e3;
  c.system->eps = c.eps;
  c.optimizer.max_iterations = 30;
  c.optimizer.target_infidelity = 0.0;
  const ControlProblem p = c.problem();
  const OptimizationReport r = optimize_pwm(p, c.optimizer);
  const double b = r.final_train->width_bound();
  int at_bound = 0;
  for (double w : r.final_train->controls[0].widths) {
    EXPECT_LE(std::abs(w), b);
    at_bound += std::abs(w) == b;
  }
  EXPECT_GT(at_bound, 0);
  expect_monotone(r);
  const OptimizationReport g = optimize_grape(p, c.optimizer);
  EXPECT_LE(g.final_field->cwiseAbs().maxCoeff(), p.system.eps);
  expect_monotone(g);
}

TEST(Optimizer, ZeroGradientStopsWithoutMoving) {
  const ExperimentConfig c = toy();
  OptimizerConfig cfg = c.optimizer;
  cfg.gradient_tolerance = 1e300;
  const ControlProblem p = c.problem();
  const PwmTrain start = random_train(p, 3);
  const OptimizationReport r = optimize_pwm(p, cfg, start);
  EXPECT_EQ(r.status, RunStatus::stalled);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(*r.final_train, start);
}

TEST(Optimizer, StallTriggersFlaggedPerturbation) {
  ExperimentConfig c = toy();
  c.optimizer.target_infidelity = 0.0;
  c.optimizer.max_iterations = 40;
  c.optimizer.stall_window = 5;
  c.optimizer.stall_threshold = 10.0;
  const OptimizationReport r = optimize_pwm(c.problem(), c.optimizer);
  int flagged = 0;
  for (bool p : r.perturbed) flagged += p;
  EXPECT_GT(flagged, 0);
  EXPECT_FALSE(r.perturbed[0]);
  expect_monotone(r);
}

TEST(Optimizer, SeededDeterminism) {
  ExperimentConfig c = toy();
  c.optimizer.seed = 42;
  expect_same(optimize_pwm(c.problem(), c.optimizer), optimize_pwm(c.problem(), c.optimizer));
  expect_same(optimize_grape(c.problem(), c.optimizer), optimize_grape(c.problem(), c.optimizer));
}

TEST(Optimizer, RandomStartRange) {
  const ControlProblem p = toy().problem();
  const PwmTrain t = random_train(p, 9);
  for (double w : t.controls[0].widths) EXPECT_LE(std::abs(w), 0.5 * p.tau());
  const PwmTrain small = random_train(p, 9, 0.01);
  for (double w : small.controls[0].widths) EXPECT_LE(std::abs(w), 0.01 * p.tau());
  const Eigen::MatrixXd f = random_field(p, 9);
  EXPECT_LE(f.cwiseAbs().maxCoeff(), 0.5 * p.system.eps);
  EXPECT_NE(random_train(p, 1), random_train(p, 2));
}

TEST(Optimizer, ConfigValidation) {
  OptimizerConfig c;
  c.armijo_shrink = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.stall_window = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.initial_range = 0.0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(OptimizerConfig{}.validate());
}

TEST(Optimizer, MismatchedInitialTrain) {
  const ControlProblem p = toy().problem();
  PwmTrain t = random_train(p, 0);
  t.config.intervals = 10;
  t.controls[0].widths.resize(10);
  EXPECT_THROW(optimize_pwm(p, OptimizerConfig{}, t), Error);
}

TEST(MultiStart, SingleStartEqualsDirectCall) {
  ExperimentConfig c = toy();
  c.optimizer.seed = 7;
  const auto reports = multi_start(c.problem(), c.optimizer, 1);
  ASSERT_EQ(reports.size(), 1u);
  expect_same(reports[0], optimize_pwm(c.problem(), c.optimizer));
  const auto grape = multi_start(c.problem(), c.optimizer, 1, 1, Method::grape);
  expect_same(grape[0], optimize_grape(c.problem(), c.optimizer));
}

TEST(MultiStart, IndependentOfParallelism) {
  ExperimentConfig c = toy();
  c.optimizer.max_iterations = 40;
  const auto serial = multi_start(c.problem(), c.optimizer, 10, 1);
  const auto parallel = multi_start(c.problem(), c.optimizer, 10, 8);
  ASSERT_EQ(serial.size(), 10u);
  ASSERT_EQ(parallel.size(), 10u);
  for (int i = 0; i < 10; ++i) expect_same(serial[i], parallel[i]);
  for (int i = 1; i < 10; ++i) EXPECT_LE(serial[i - 1].final_infidelity(), serial[i].final_infidelity());
  std::vector<std::uint64_t> seeds;
  for (const auto& r : serial) seeds.push_back(r.seed);
  std::sort(seeds.begin(), seeds.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(seeds[i], c.optimizer.seed + i);
}

TEST(MultiStart, ErrorsStayPerRun) {
  ExperimentConfig c = toy();
  // A callback that throws mid-run.
  c.optimizer.on_iteration = [](const IterationInfo& info) {
    if (info.iteration == 2) throw NumericalError("injected");
  };
  const auto reports = multi_start(c.problem(), c.optimizer, 3, 1);
  for (const auto& r : reports) {
    EXPECT_EQ(r.status, RunStatus::failed);
    EXPECT_EQ(r.error, "injected");
  }
}

TEST(Problem, Validation) {
  ControlProblem p = toy().problem();
  p.axes = {Axis::z};
  EXPECT_THROW(p.validate(), Error);
  p = toy().problem();
  p.layout = Layout::nested;
  EXPECT_THROW(p.validate(), Error);
  p = toy().problem();
  p.target = TargetGate(CMatrix::Identity(4, 4));
  EXPECT_THROW(p.validate(), Error);
}

TEST(Problem, InterleavedGeometry) {
  ControlProblem p = drift_problem(2, Layout::interleaved);
  p.scale = 1.5;
  const PwmConfig cfg = p.pwm_config();
  EXPECT_EQ(cfg.scale, 3.0);
  EXPECT_EQ(cfg.layout, Layout::interleaved);
  const PwmTrain t = random_train(p, 0);
  for (const auto& c : t.controls) EXPECT_EQ(c.eps, 3.0 * p.system.eps);
}

}  // namespace
}  // namespace qoc
