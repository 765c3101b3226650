// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "qoc/linalg.hpp"

namespace qoc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grid index of t, which must lie on the grid within a relative 1e-9 slack.
long grid_index(const SampledWave& w, double t) {
  const double x = (t - w.t0) / w.dt;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) {
    throw Error("integration limit " + std::to_string(t) + " is not on the sample grid");
  }
  return static_cast<long>(r);
}

long level_count(const SampledWave& w) { return static_cast<long>(w.values.size()); }

double grid_end(const SampledWave& w) {
  const auto n = static_cast<double>(w.values.size());
  return w.interpolation == SampledWave::Interpolation::hold ? w.t0 + n * w.dt
                                                             : w.t0 + (n - 1.0) * w.dt;
}

}  // namespace

ControlSignal::ControlSignal(Shape shape, double bound) : shape_(std::move(shape)), bound_(bound) {
  validate();
}

ControlSignal ControlSignal::constant(double value, double bound) {
  return ControlSignal(ConstantWave{value}, bound);
}

ControlSignal ControlSignal::sine(double amplitude, double omega, double phase, double bound) {
  return ControlSignal(SineWave{amplitude, omega, phase}, bound);
}

ControlSignal ControlSignal::sampled(SampledWave wave, double bound) {
  return ControlSignal(std::move(wave), bound);
}

ControlSignal ControlSignal::sampled(SampledWave wave) {
  double peak = 0.0;
  for (double v : wave.values) peak = std::max(peak, std::abs(v));
  return ControlSignal(std::move(wave), peak);
}

void ControlSignal::validate() const {
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) throw Error("signal bound must be finite and >= 0");
  const double slack = 1e-12 * std::max(1.0, bound_);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantWave>) {
          if (std::abs(s.value) > bound_ + slack) throw BoundError("constant signal exceeds its bound");
        } else if constexpr (std::is_same_v<S, SineWave>) {
          if (std::abs(s.amplitude) > bound_ + slack) throw BoundError("sine amplitude exceeds its bound");
        } else {
          if (!(s.dt > 0.0)) throw Error("sample spacing must be positive");
          const std::size_t min_samples = s.interpolation == SampledWave::Interpolation::hold ? 1 : 2;
          if (s.values.size() < min_samples) throw Error("sampled signal needs at least 2 samples");
          for (double v : s.values) {
            if (!std::isfinite(v)) throw NumericalError("non-finite sample");
            if (std::abs(v) > bound_ + slack) throw BoundError("sample exceeds the signal bound");
          }
        }
      },
      shape_);
}

double ControlSignal::operator()(double t) const {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantWave>) {
          return s.value;
        } else if constexpr (std::is_same_v<S, SineWave>) {
          return s.amplitude * std::sin(s.omega * t + s.phase);
        } else {
          const double slack = 1e-9 * s.dt;
          if (t < s.t0 - slack || t > grid_end(s) + slack) {
            throw std::out_of_range("signal evaluated outside its sampled domain");
          }
          const double x = (t - s.t0) / s.dt;
          const long n = level_count(s);
          if (s.interpolation == SampledWave::Interpolation::hold) {
            const long i = std::clamp(static_cast<long>(std::floor(x)), 0L, n - 1);
            return s.values[i];
          }
          const long i = std::clamp(static_cast<long>(std::floor(x)), 0L, n - 2);
          const double frac = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
          return (1.0 - frac) * s.values[i] + frac * s.values[i + 1];
        }
      },
      shape_);
}

double ControlSignal::integral(double a, double b) const {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantWave>) {
          return s.value * (b - a);
        } else if constexpr (std::is_same_v<S, SineWave>) {
          if (s.omega == 0.0) return s.amplitude * std::sin(s.phase) * (b - a);
          return s.amplitude / s.omega *
                 (std::cos(s.omega * a + s.phase) - std::cos(s.omega * b + s.phase));
        } else {
          if (!covers(a, b)) throw std::out_of_range("integral outside the sampled domain");
          const long ia = grid_index(s, a);
          const long ib = grid_index(s, b);
          double sum = 0.0;
          if (s.interpolation == SampledWave::Interpolation::hold) {
            for (long i = ia; i < ib; ++i) sum += s.values[i];
            return sum * s.dt;
          }
          for (long i = ia; i < ib; ++i) sum += s.values[i] + s.values[i + 1];
          return 0.5 * sum * s.dt;
        }
      },
      shape_);
}

double ControlSignal::t_begin() const {
  if (const auto* s = samples()) return s->t0;
  return -kInf;
}

double ControlSignal::t_end() const {
  if (const auto* s = samples()) return grid_end(*s);
  return kInf;
}

bool ControlSignal::covers(double a, double b) const {
  const auto* s = samples();
  if (!s) return true;
  const double slack = 1e-9 * s->dt;
  return a >= s->t0 - slack && b <= grid_end(*s) + slack;
}

void write_signal_csv(std::ostream& out, const ControlSignal& signal) {
  const auto* s = signal.samples();
  if (!s) throw Error("only sampled signals can be written as CSV");
  const auto old_precision = out.precision(17);
  const bool hold = s->interpolation == SampledWave::Interpolation::hold;
  if (hold) out << "# interpolation: hold\n";
  out << "t,u\n";
  const long n = level_count(*s);
  for (long i = 0; i < n; ++i) out << s->t0 + static_cast<double>(i) * s->dt << ',' << s->values[i] << '\n';
  if (hold) out << s->t0 + static_cast<double>(n) * s->dt << ',' << s->values.back() << '\n';
  out.precision(old_precision);
}

ControlSignal read_signal_csv(std::istream& in) {
  std::string line;
  bool hold = false;
  bool header = false;
  std::vector<double> ts;
  std::vector<double> us;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.find("interpolation: hold") != std::string::npos) hold = true;
      continue;
    }
    if (!header) {
      if (line != "t,u") throw ParseError("signal CSV must start with the header 't,u'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("signal CSV row " + std::to_string(row) + " has no comma");
    try {
      std::size_t used_t = 0;
      std::size_t used_u = 0;
      const std::string tcell = line.substr(0, comma);
      const std::string ucell = line.substr(comma + 1);
      ts.push_back(std::stod(tcell, &used_t));
      us.push_back(std::stod(ucell, &used_u));
      if (used_t != tcell.size() || used_u != ucell.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("signal CSV row " + std::to_string(row) + " is not numeric");
    }
  }
  if (ts.size() < 2) throw ParseError("signal CSV needs at least 2 samples");
  SampledWave wave;
  wave.t0 = ts.front();
  wave.dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double expected = wave.t0 + static_cast<double>(i) * wave.dt;
    if (std::abs(ts[i] - expected) > 1e-9 * wave.dt + 1e-12 * std::abs(expected)) {
      throw ParseError("signal CSV row " + std::to_string(i + 2) + " breaks the uniform grid");
    }
  }
  if (hold) {
    wave.interpolation = SampledWave::Interpolation::hold;
    us.pop_back();
  }
  wave.values = std::move(us);
  return ControlSignal::sampled(std::move(wave));
}

}  // namespace qoc
