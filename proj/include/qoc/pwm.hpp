// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pulse-width-modulated control trains.
//
// The horizon [0, T] is cut into M intervals of length tau. In interval k
// (1-based) control i emits one rectangular pulse of amplitude +-eps_i whose
// duration is |w_i[k]|; the sign of the signed width w_i[k] is the sign of the
// pulse. The pulse area eps_i * w_i[k] equals the integral of the underlying
// signal over the interval.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qoc/signal.hpp"

namespace qoc {

/// centered: one control, pulse centered in its interval.
/// nested: two controls, both centered, the shorter pulse inside the longer.
/// interleaved: n controls, control i centered in sub-slot i of width tau/n.
enum class Layout { centered, nested, interleaved };

Layout parse_layout(const std::string& name);
const char* layout_name(Layout layout);

struct PwmConfig {
  double tau = 0.0;
  int intervals = 0;
  /// Amplitude multiplier f >= 1; widths are bounded by tau / f.
  double scale = 1.0;
  Layout layout = Layout::centered;

  double horizon() const { return tau * intervals; }
  /// Frequency scope 2 pi M / T in rad/s, reported for reference only.
  double frequency_scope() const;
  void validate() const;

  bool operator==(const PwmConfig&) const = default;
};

struct PulseControl {
  double eps = 0.0;
  /// Offset of the pulse center from the interval center, in seconds.
  double shift = 0.0;
  std::vector<double> widths;

  double duration(int k) const;
  double amplitude(int k) const;

  bool operator==(const PulseControl&) const = default;
};

struct Support {
  double begin = 0.0;
  double end = 0.0;
};

struct PwmTrain {
  PwmConfig config;
  std::vector<PulseControl> controls;

  int intervals() const { return config.intervals; }
  double tau() const { return config.tau; }
  double width_bound() const { return config.tau / config.scale; }

  /// Time window occupied by pulse k (0-based) of control i.
  Support support(int control, int k) const;

  void validate() const;

  bool operator==(const PwmTrain&) const = default;
};

/// A train with every width zero.
PwmTrain zero_train(const PwmConfig& cfg, std::span<const double> eps);

/// Offsets of the interleaved sub-slot centers relative to the interval center.
std::vector<double> interleaved_shifts(double tau, int controls);

/// Equal-area conversion of one signal per control. The pulse amplitude of
/// control i is cfg.scale * eps[i].
PwmTrain pwm_transform(std::span<const ControlSignal> signals, const PwmConfig& cfg,
                       std::span<const double> eps);
PwmTrain pwm_transform(const ControlSignal& signal, const PwmConfig& cfg, double eps);

enum class Smoothing { piecewise_constant, linear };

/// Replace each pulse by the constant eps * w / tau over its interval. With
/// Smoothing::linear the interval means are joined linearly on a grid of
/// samples_per_interval points per interval instead.
ControlSignal anti_pwm(const PwmTrain& train, int control = 0,
                       Smoothing smoothing = Smoothing::piecewise_constant,
                       int samples_per_interval = 16);

/// Replace each rectangle by g exp(-pi (t - c)^2 / t_p^2) of equal area,
/// truncated at 4 t_p from its center.
ControlSignal gaussian_train(const PwmTrain& train, int samples_per_interval, int control = 0);

/// The rectangular pulses of one control on a hold grid with
/// samples_per_interval cells per interval. Each cell holds the mean of the
/// train over the cell, so cell areas add up to the pulse areas.
ControlSignal render_train(const PwmTrain& train, int samples_per_interval, int control = 0);

/// Amplitudes times f, widths divided by f.
PwmTrain scale_train(const PwmTrain& train, double f);

/// Scale every control by the control count n and move control i into the
/// i-th sub-slot of each interval, so no two pulses overlap.
PwmTrain interleave(const PwmTrain& train);

/// Discrete Fourier magnitude of a sampled signal: pairs (frequency in Hz,
/// |sum_j u_j e^{-2 pi i k j / N}| dt) for k = 0..N/2.
std::vector<std::pair<double, double>> signal_spectrum(const ControlSignal& signal);

}  // namespace qoc
