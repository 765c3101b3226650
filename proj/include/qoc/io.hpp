// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON and CSV formats for trains, reports and traces. Every double reads
// back bit-for-bit.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qoc/bench.hpp"
#include "qoc/optimizer.hpp"
#include "qoc/pwm.hpp"

namespace qoc {

/// {"tau", "M", "layout", "scale", "controls": [{"eps", "shift", "widths"}]}.
std::string train_to_json(const PwmTrain& train);
PwmTrain train_from_json(const std::string& text);

/// {"status", "seed", "iterations", "trace", "wall_ms", "perturbed",
///  "final_train" | "final_field", "error"?}.
std::string report_to_json(const OptimizationReport& report);
OptimizationReport report_from_json(const std::string& text);

/// Per-iteration CSV: iteration,infidelity,wall_ms,perturbed.
void write_trace_csv(std::ostream& out, const OptimizationReport& report);

void write_spectrum_csv(std::ostream& out, const std::vector<std::pair<double, double>>& spectrum);

/// {"horizons", "exponents", "schemes", "repetitions", "spin_table", "spins",
///  "eps", "amplitude", "drive_hz", "max_log2_intervals", "parallelism"};
/// absent fields keep their defaults.
BenchGrid bench_grid_from_json(const std::string& text);
std::string bench_grid_to_json(const BenchGrid& grid);

/// Timing log in execution order: order,scheme,T,target_IF,repetition,M,seconds.
void write_bench_log_csv(std::ostream& out, const BenchResult& result);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qoc
