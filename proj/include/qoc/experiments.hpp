// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Named experiments, their JSON configuration, and verification of smoothed
// trains by fine-step re-propagation.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qoc/optimizer.hpp"

namespace qoc {

struct ExperimentConfig {
  /// "three-qubit-rotation", "six-qubit-cnot" or "custom".
  std::string experiment = "custom";
  /// Dataset name or file path; ignored when `system` is set.
  std::string spin_table = "d-norleucine";
  /// Inline spin system, used instead of the table when present.
  std::optional<SpinSystem> system;
  int spins = 1;
  GateSpec gate = RotationGate{Axis::x, kPi / 2.0, 1};
  double horizon = 0.0;
  int intervals = 0;
  Layout layout = Layout::centered;
  std::vector<Axis> axes{Axis::x};
  double eps = kDefaultControlBound;
  double scale = 1.0;
  OptimizerConfig optimizer;
  int starts = 1;
  int parallelism = 1;
  Method method = Method::pwm;
  std::string output_dir = "out";

  ControlProblem problem() const;
  void validate() const;
};

/// Preset parameters. With full_scale the full-size M (and T for the CNOT
/// experiment) are used instead of the desk-scale defaults.
ExperimentConfig preset(const std::string& name, bool full_scale = false);
std::vector<std::string> preset_names();

/// Fields present in the JSON override those of `base` (or of the preset it
/// names in "experiment").
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

enum class SmoothingMethod { anti_pwm, anti_pwm_linear, gaussian };

SmoothingMethod parse_smoothing(const std::string& name);
const char* smoothing_name(SmoothingMethod method);

struct SmoothingReport {
  double train_infidelity = 0.0;
  double smoothed_infidelity = 0.0;
  /// smoothed minus train.
  double difference = 0.0;
  /// Step count of the fine midpoint-rule re-propagation.
  long reference_steps = 0;
  std::vector<ControlSignal> signals;
};

/// Smooths every control of `train`, propagates the signals with the midpoint
/// rule on `steps_per_interval` steps per PWM interval, and compares the
/// infidelities. Signals use `samples_per_interval` grid points per interval.
SmoothingReport verify_smoothing(const ControlProblem& problem, const PwmTrain& train,
                                 SmoothingMethod method, int steps_per_interval = 16,
                                 int samples_per_interval = 16);

}  // namespace qoc
