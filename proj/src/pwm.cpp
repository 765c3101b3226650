// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/pwm.hpp"

#include <algorithm>
#include <cmath>

#include "qoc/linalg.hpp"

namespace qoc {

namespace {

constexpr double kWidthSlack = 1e-12;

double sign_of(double w) { return w < 0.0 ? -1.0 : 1.0; }

}  // namespace

Layout parse_layout(const std::string& name) {
  if (name == "centered") return Layout::centered;
  if (name == "nested") return Layout::nested;
  if (name == "interleaved") return Layout::interleaved;
  throw ParseError("unknown layout '" + name + "'");
}

const char* layout_name(Layout layout) {
  switch (layout) {
    case Layout::centered:
      return "centered";
    case Layout::nested:
      return "nested";
    case Layout::interleaved:
      return "interleaved";
  }
  return "?";
}

double PwmConfig::frequency_scope() const { return kTwoPi * intervals / horizon(); }

void PwmConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("interval length tau must be positive");
  if (intervals < 1) throw Error("interval count M must be at least 1");
  if (!(scale >= 1.0) || !std::isfinite(scale)) throw Error("amplitude scale f must be >= 1");
}

double PulseControl::duration(int k) const { return std::abs(widths[k]); }

// Zero widths take the positive branch.
double PulseControl::amplitude(int k) const { return eps * sign_of(widths[k]); }

Support PwmTrain::support(int control, int k) const {
  const auto& c = controls.at(control);
  const double center = (k + 0.5) * config.tau + c.shift;
  const double half = 0.5 * c.duration(k);
  return {center - half, center + half};
}

void PwmTrain::validate() const {
  config.validate();
  const int n = static_cast<int>(controls.size());
  if (n == 0) throw Error("train has no controls");
  switch (config.layout) {
    case Layout::centered:
      if (n != 1) throw Error("centered layout carries exactly one control");
      break;
    case Layout::nested:
      if (n != 2) throw Error("nested layout carries exactly two controls");
      break;
    case Layout::interleaved:
      if (config.scale < n * (1.0 - kWidthSlack)) {
        throw Error("interleaved layout needs amplitude scale >= control count");
      }
      break;
  }
  const double bound = width_bound() * (1.0 + kWidthSlack);
  const double slot = (config.layout == Layout::interleaved ? config.tau / n : config.tau) *
                      (1.0 + kWidthSlack);
  for (int i = 0; i < n; ++i) {
    const auto& c = controls[i];
    if (!(c.eps > 0.0) || !std::isfinite(c.eps)) throw Error("pulse amplitude must be positive");
    if (static_cast<int>(c.widths.size()) != config.intervals) {
      throw Error("control " + std::to_string(i) + " must have M widths");
    }
    for (int k = 0; k < config.intervals; ++k) {
      const double t = std::abs(c.widths[k]);
      if (!std::isfinite(c.widths[k])) throw NumericalError("non-finite pulse width");
      if (t > slot) {
        throw Error("pulse " + std::to_string(k + 1) + " of control " + std::to_string(i) +
                    " overlaps its neighbours");
      }
      if (t > bound) {
        throw Error("pulse width exceeds tau/f at interval " + std::to_string(k + 1));
      }
    }
  }
}

PwmTrain zero_train(const PwmConfig& cfg, std::span<const double> eps) {
  cfg.validate();
  PwmTrain train;
  train.config = cfg;
  const auto shifts = cfg.layout == Layout::interleaved
                          ? interleaved_shifts(cfg.tau, static_cast<int>(eps.size()))
                          : std::vector<double>(eps.size(), 0.0);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    train.controls.push_back({cfg.scale * eps[i], shifts[i], std::vector<double>(cfg.intervals, 0.0)});
  }
  train.validate();
  return train;
}

std::vector<double> interleaved_shifts(double tau, int controls) {
  std::vector<double> shifts(controls);
  for (int i = 0; i < controls; ++i) shifts[i] = (i + 0.5) * tau / controls - 0.5 * tau;
  return shifts;
}

PwmTrain pwm_transform(std::span<const ControlSignal> signals, const PwmConfig& cfg,
                       std::span<const double> eps) {
  cfg.validate();
  if (signals.size() != eps.size()) throw Error("one amplitude per signal is required");
  PwmTrain train = zero_train(cfg, eps);
  const double bound = train.width_bound();
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const auto& u = signals[i];
    if (!u.covers(0.0, cfg.horizon())) throw Error("signal does not cover the horizon");
    auto& c = train.controls[i];
    for (int k = 0; k < cfg.intervals; ++k) {
      const double area = u.integral(k * cfg.tau, (k + 1) * cfg.tau);
      double w = area / c.eps;
      if (std::abs(w) > bound) {
        if (std::abs(w) > bound * (1.0 + kWidthSlack)) {
          throw BoundError("amplitude bound violated at interval " + std::to_string(k + 1));
        }
        w = std::copysign(bound, w);
      }
      c.widths[k] = w;
    }
    if (u.bound() > eps[i] * (1.0 + kWidthSlack)) {
      throw BoundError("signal bound exceeds the pulse amplitude of control " + std::to_string(i));
    }
  }
  return train;
}

PwmTrain pwm_transform(const ControlSignal& signal, const PwmConfig& cfg, double eps) {
  return pwm_transform(std::span<const ControlSignal>(&signal, 1), cfg, std::span<const double>(&eps, 1));
}

ControlSignal anti_pwm(const PwmTrain& train, int control, Smoothing smoothing,
                       int samples_per_interval) {
  train.validate();
  if (train.config.layout == Layout::interleaved) {
    throw Error("anti-PWM needs pulses centered in their intervals");
  }
  const auto& c = train.controls.at(control);
  const int m = train.intervals();
  const double tau = train.tau();
  std::vector<double> levels(m);
  for (int k = 0; k < m; ++k) levels[k] = c.eps * c.widths[k] / tau;
  const double bound = c.eps / train.config.scale;

  if (smoothing == Smoothing::piecewise_constant) {
    SampledWave wave{0.0, tau, std::move(levels), SampledWave::Interpolation::hold};
    return ControlSignal::sampled(std::move(wave), bound);
  }
  if (samples_per_interval < 2) throw Error("linear smoothing needs >= 2 samples per interval");
  SampledWave wave;
  wave.t0 = 0.0;
  wave.dt = tau / samples_per_interval;
  const long n = static_cast<long>(m) * samples_per_interval + 1;
  wave.values.resize(n);
  for (long j = 0; j < n; ++j) {
    // Position in units of tau, measured from the first interval midpoint.
    const double x = static_cast<double>(j) / samples_per_interval - 0.5;
    if (x <= 0.0) {
      wave.values[j] = levels.front();
    } else if (x >= m - 1) {
      wave.values[j] = levels.back();
    } else {
      const long i = static_cast<long>(std::floor(x));
      const double frac = x - static_cast<double>(i);
      wave.values[j] = (1.0 - frac) * levels[i] + frac * levels[i + 1];
    }
  }
  return ControlSignal::sampled(std::move(wave), bound);
}

ControlSignal gaussian_train(const PwmTrain& train, int samples_per_interval, int control) {
  train.validate();
  if (train.config.layout == Layout::interleaved) {
    throw Error("Gaussian smoothing needs pulses centered in their intervals");
  }
  if (samples_per_interval < 8) throw Error("Gaussian smoothing needs >= 8 samples per interval");
  const auto& c = train.controls.at(control);
  const int m = train.intervals();
  const double dt = train.tau() / samples_per_interval;
  const long n = static_cast<long>(m) * samples_per_interval + 1;
  std::vector<double> values(n, 0.0);
  for (int k = 0; k < m; ++k) {
    const double tp = c.duration(k);
    if (tp == 0.0) continue;
    const double g = c.amplitude(k);
    const Support s = train.support(control, k);
    const double center = 0.5 * (s.begin + s.end);
    const long lo = std::max(0L, static_cast<long>(std::ceil((center - 4.0 * tp) / dt)));
    const long hi = std::min(n - 1, static_cast<long>(std::floor((center + 4.0 * tp) / dt)));
    for (long j = lo; j <= hi; ++j) {
      const double x = (static_cast<double>(j) * dt - center) / tp;
      values[j] += g * std::exp(-kPi * x * x);
    }
  }
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  SampledWave wave{0.0, dt, std::move(values), SampledWave::Interpolation::linear};
  return ControlSignal::sampled(std::move(wave), std::max(peak, c.eps));
}

ControlSignal render_train(const PwmTrain& train, int samples_per_interval, int control) {
  train.validate();
  if (samples_per_interval < 1) throw Error("rendering needs >= 1 sample per interval");
  const auto& c = train.controls.at(control);
  const double dt = train.tau() / samples_per_interval;
  const long n = static_cast<long>(train.intervals()) * samples_per_interval;
  std::vector<double> values(n, 0.0);
  for (int k = 0; k < train.intervals(); ++k) {
    if (c.duration(k) == 0.0) continue;
    const Support s = train.support(control, k);
    const long lo = std::max(0L, static_cast<long>(std::floor(s.begin / dt)));
    const long hi = std::min(n - 1, static_cast<long>(std::floor(s.end / dt)));
    for (long j = lo; j <= hi; ++j) {
      const double a = std::max(s.begin, static_cast<double>(j) * dt);
      const double b = std::min(s.end, static_cast<double>(j + 1) * dt);
      if (b > a) values[j] += c.amplitude(k) * (b - a) / dt;
    }
  }
  for (double& v : values) v = std::clamp(v, -c.eps, c.eps);
  SampledWave wave{0.0, dt, std::move(values), SampledWave::Interpolation::hold};
  return ControlSignal::sampled(std::move(wave), c.eps);
}

PwmTrain scale_train(const PwmTrain& train, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw Error("scale factor must be positive");
  PwmTrain out = train;
  out.config.scale = train.config.scale * f;
  if (out.config.scale < 1.0 - kWidthSlack) throw Error("scaling below the unscaled train");
  out.config.scale = std::max(out.config.scale, 1.0);
  for (auto& c : out.controls) {
    c.eps *= f;
    for (double& w : c.widths) w /= f;
  }
  out.validate();
  return out;
}

PwmTrain interleave(const PwmTrain& train) {
  train.validate();
  const int n = static_cast<int>(train.controls.size());
  if (n < 2) throw Error("interleaving needs at least two controls");
  if (train.config.layout == Layout::interleaved) throw Error("train is already interleaved");
  PwmTrain out = train;
  out.config.layout = Layout::interleaved;
  out.config.scale = train.config.scale * n;
  const auto shifts = interleaved_shifts(train.tau(), n);
  const double slot = train.tau() / n * (1.0 + kWidthSlack);
  for (int i = 0; i < n; ++i) {
    auto& c = out.controls[i];
    c.eps *= n;
    c.shift = shifts[i];
    for (int k = 0; k < train.intervals(); ++k) {
      c.widths[k] /= n;
      if (std::abs(c.widths[k]) > slot) {
        throw Error("pulse " + std::to_string(k + 1) + " of control " + std::to_string(i) +
                    " overlaps its neighbours after interleaving");
      }
    }
  }
  out.validate();
  return out;
}

}  // namespace qoc
