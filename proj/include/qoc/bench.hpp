// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Propagation-cost benchmark: PWM against midpoint PWC on a sine-driven spin
// system, each at the smallest interval count that meets an accuracy target.

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qoc/spin_system.hpp"

namespace qoc {

enum class Scheme { pwm, pwc };

const char* scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct BenchGrid {
  std::vector<double> horizons{20e-6, 100e-6, 200e-6};
  /// Accuracy targets 10^-e.
  std::vector<int> exponents{1, 2, 3, 4};
  std::vector<Scheme> schemes{Scheme::pwm, Scheme::pwc};
  int repetitions = 3;
  std::string spin_table = "d-norleucine";
  int spins = 6;
  double eps = kDefaultControlBound;
  /// Drive u(t) = amplitude sin(2 pi f t) on the x axis; amplitude <= eps.
  double amplitude = kDefaultControlBound;
  double drive_hz = 50e3;
  /// The doubling search gives up beyond M = 2^max_log2_intervals.
  int max_log2_intervals = 24;
  /// Workers for the accuracy search. Timing always runs on one thread.
  int parallelism = 1;

  void validate() const;
};

struct BenchCell {
  Scheme scheme = Scheme::pwm;
  double horizon = 0.0;
  int exponent = 0;
  /// Empty when no M up to the search limit meets the target.
  std::optional<long> intervals;
  /// Error at the chosen M.
  double error = 0.0;
  std::vector<double> seconds;
  double median_seconds = 0.0;

  double target() const;
  bool reachable() const { return intervals.has_value(); }
};

/// One timed propagation, in execution order.
struct BenchEvent {
  Scheme scheme = Scheme::pwm;
  double horizon = 0.0;
  int exponent = 0;
  int repetition = 0;
  long intervals = 0;
  double seconds = 0.0;
};

struct BenchResult {
  /// Sorted by (scheme name, T, target).
  std::vector<BenchCell> cells;
  std::vector<BenchEvent> log;
  /// Interval count of the reference run for each horizon.
  std::vector<long> reference_intervals;

  const BenchCell* find(Scheme scheme, double horizon, int exponent) const;
};

/// For each (scheme, T) the error ||U_M - U_ref||_F is followed along
/// M = 1, 2, 4, ...; a target is met at the first M whose error and whose
/// successor's error are both within it. The reference is a Richardson
/// extrapolation of two midpoint runs, refined until it has settled well
/// below the smallest target. Each cell is then timed `repetitions` times,
/// alternating the scheme order between rounds.
BenchResult run_bench(const BenchGrid& grid,
                      const std::function<void(const std::string&)>& log = {});

void write_bench_csv(std::ostream& out, const BenchResult& result);

struct BenchSummary {
  int compared = 0;
  /// Cells where the PWM median is at most `ratio` times the PWC median.
  int faster = 0;
};

/// Compares PWM and PWC cells with the same (T, target); cells that are
/// unreachable for either scheme are left out.
BenchSummary compare_schemes(const BenchResult& result, double ratio = 0.9);

}  // namespace qoc
