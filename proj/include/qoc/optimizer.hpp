// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Projected gradient descent on gate infidelity, over PWM pulse widths or
// over piecewise-constant GRAPE amplitudes.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qoc/propagation.hpp"
#include "qoc/pwm.hpp"
#include "qoc/spin_system.hpp"

namespace qoc {

struct ControlProblem {
  SpinSystem system;
  TargetGate target;
  double horizon = 0.0;
  int intervals = 0;
  std::vector<Axis> axes{Axis::x};
  Layout layout = Layout::centered;
  /// Extra amplitude scale f >= 1 applied on top of the layout's own scaling.
  double scale = 1.0;

  double tau() const { return horizon / intervals; }
  int spins() const { return system.size(); }
  void validate() const;

  HermitianOperator drift() const;
  /// Unit-amplitude generators, one per axis.
  std::vector<HermitianOperator> generators() const;
  /// Train geometry: interleaved trains carry scale f * n.
  PwmConfig pwm_config() const;
};

struct IterationInfo {
  int iteration = 0;
  double infidelity = 0.0;
  double wall_ms = 0.0;
  bool perturbed = false;
};

struct OptimizerConfig {
  int max_iterations = 500;
  double target_infidelity = 1e-3;
  /// Initial line-search step; 0 picks one that moves the largest variable by
  /// a tenth of its bound.
  double initial_step = 0.0;
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  int max_backtracks = 40;
  /// Growth of the trial step after an accepted step.
  double step_growth = 2.0;
  /// Start each line search from the alternating Barzilai-Borwein step when
  /// it is defined, instead of the grown previous step.
  bool spectral_step = true;
  int stall_window = 10;
  double stall_threshold = 1e-6;
  /// Norm of the gradient perturbation relative to the gradient norm.
  double perturbation_scale = 0.1;
  /// Stop without moving when the gradient norm falls below this value.
  double gradient_tolerance = 1e-14;
  std::uint64_t seed = 0;
  std::size_t memory_budget = std::size_t{1} << 30;
  bool phase_insensitive = false;
  /// Random starts are uniform in [-r b, r b] for bound b and this r.
  double initial_range = 0.5;

  void validate() const;

  std::function<void(const IterationInfo&)> on_iteration;
};

enum class RunStatus { converged, iteration_limit, stalled, failed };

const char* status_name(RunStatus status);
RunStatus parse_status(const std::string& name);

struct OptimizationReport {
  RunStatus status = RunStatus::failed;
  std::uint64_t seed = 0;
  int iterations = 0;
  /// trace[0] is the initial infidelity, trace[j] the value after iteration j.
  std::vector<double> trace;
  std::vector<double> wall_ms;
  /// perturbed[j] marks iteration j as a perturbed step.
  std::vector<bool> perturbed;
  std::optional<PwmTrain> final_train;
  /// GRAPE amplitudes, final_field(i, k) for control i in step k.
  std::optional<Eigen::MatrixXd> final_field;
  std::string error;

  double final_infidelity() const;
};

/// Random start: widths uniform in [-r b, r b] with b the width bound.
PwmTrain random_train(const ControlProblem& problem, std::uint64_t seed, double range = 0.5);
/// Random start: amplitudes uniform in [-r eps, r eps].
Eigen::MatrixXd random_field(const ControlProblem& problem, std::uint64_t seed,
                             double range = 0.5);

OptimizationReport optimize_pwm(const ControlProblem& problem, const OptimizerConfig& config,
                                std::optional<PwmTrain> initial = std::nullopt);
OptimizationReport optimize_grape(const ControlProblem& problem, const OptimizerConfig& config,
                                  std::optional<Eigen::MatrixXd> initial = std::nullopt);

enum class Method { pwm, grape };

/// Runs n independent optimizations with seeds config.seed + i, on up to
/// `parallelism` threads. Errors are isolated per run. The result is ordered by
/// final infidelity (ties keep seed order) and does not depend on parallelism.
std::vector<OptimizationReport> multi_start(const ControlProblem& problem,
                                            const OptimizerConfig& config, int n_starts,
                                            int parallelism = 1, Method method = Method::pwm);

}  // namespace qoc
