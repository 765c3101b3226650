// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "qoc/linalg.hpp"
#include "qoc/pwm.hpp"

namespace qoc {

std::vector<std::pair<double, double>> signal_spectrum(const ControlSignal& signal) {
  const auto* s = signal.samples();
  if (!s) throw Error("spectrum needs a sampled signal");
  const int n = static_cast<int>(s->values.size());
  if (n < 2) throw Error("spectrum needs at least 2 samples");

  std::vector<double> in(s->values);
  std::vector<std::complex<double>> out(n / 2 + 1);
  // Only fftw_execute is thread-safe; planning goes through one lock.
  static std::mutex planner;
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner);
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("FFTW could not create a plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }

  std::vector<std::pair<double, double>> spectrum(out.size());
  const double df = 1.0 / (n * s->dt);
  for (std::size_t k = 0; k < out.size(); ++k) {
    spectrum[k] = {static_cast<double>(k) * df, std::abs(out[k]) * s->dt};
  }
  return spectrum;
}

}  // namespace qoc
