// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Real, bandwidth-limited control signals u(t), either analytic presets with
// closed-form integrals or uniformly sampled data.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

namespace qoc {

struct ConstantWave {
  double value = 0.0;
};

/// amplitude * sin(omega t + phase), omega in rad/s.
struct SineWave {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// Uniform grid t_i = t0 + i dt.
///
/// With Interpolation::linear the samples are point values joined linearly
/// and integrals use the trapezoidal rule. With Interpolation::hold sample i is
/// the constant level on [t_i, t_i + dt), so the last grid point is t0 + n dt.
struct SampledWave {
  enum class Interpolation { linear, hold };
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  Interpolation interpolation = Interpolation::linear;
};

class ControlSignal {
 public:
  using Shape = std::variant<ConstantWave, SineWave, SampledWave>;

  static ControlSignal constant(double value, double bound);
  static ControlSignal sine(double amplitude, double omega, double phase, double bound);
  static ControlSignal sampled(SampledWave wave, double bound);
  /// Sampled signal whose bound is max |value|.
  static ControlSignal sampled(SampledWave wave);

  double operator()(double t) const;

  /// Exact integral over [a, b] for analytic shapes; trapezoidal (or exact
  /// hold-sum) on the native grid for sampled shapes, which requires a and b to
  /// fall on grid points.
  double integral(double a, double b) const;

  double bound() const { return bound_; }
  double t_begin() const;
  double t_end() const;
  bool covers(double a, double b) const;

  const Shape& shape() const { return shape_; }
  const SampledWave* samples() const { return std::get_if<SampledWave>(&shape_); }

 private:
  ControlSignal(Shape shape, double bound);
  void validate() const;

  Shape shape_;
  double bound_ = 0.0;
};

/// Signal CSV: header `t,u`, one row per sample. Hold-interpolated signals are
/// written with a leading `# interpolation: hold` comment and one extra row
/// marking the end of the last level.
void write_signal_csv(std::ostream& out, const ControlSignal& signal);
ControlSignal read_signal_csv(std::istream& in);

}  // namespace qoc
