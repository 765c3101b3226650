// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// qoc transform | optimize | bench | smooth
//
// Exit codes: 0 success, 2 configuration, parse or file error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "qoc/bench.hpp"
#include "qoc/experiments.hpp"
#include "qoc/io.hpp"
#include "qoc/pwm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset;
  std::optional<double> mem_budget_mb;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--seed", c.seed, "Base random seed");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--preset", c.preset, "Named preset");
  app->add_option("--mem-budget", c.mem_budget_mb, "Checkpoint memory budget in MB")
      ->check(CLI::PositiveNumber);
}

template <class Write>
void write_with(const fs::path& path, Write&& write) {
  std::ostringstream os;
  write(os);
  qoc::write_file(path, os.str());
}

std::string spectrum_text(const qoc::ControlSignal& s) {
  std::ostringstream os;
  qoc::write_spectrum_csv(os, qoc::signal_spectrum(s));
  return os.str();
}

std::string signal_text(const qoc::ControlSignal& s) {
  std::ostringstream os;
  qoc::write_signal_csv(os, s);
  return os.str();
}

// transform ------------------------------------------------------------------

struct TransformArgs {
  std::string signal_file;
  double horizon = 100e-6;
  int intervals = 100;
  double eps = qoc::kDefaultControlBound;
  std::optional<double> amplitude;
  double frequency_hz = 50e3;
  double phase = 0.0;
  double value = 0.0;
  double scale = 1.0;
  std::string smooth;
  int samples = 16;
};

int run_transform(const Common& common, const TransformArgs& a) {
  using namespace qoc;
  std::optional<ControlSignal> signal;
  if (!a.signal_file.empty()) {
    std::istringstream in(read_file(a.signal_file));
    signal = read_signal_csv(in);
  } else {
    const std::string preset = common.preset.empty() ? "sine" : common.preset;
    const double amp = a.amplitude.value_or(a.eps);
    if (preset == "sine") {
      signal = ControlSignal::sine(amp, kTwoPi * a.frequency_hz, a.phase, std::abs(amp));
    } else if (preset == "constant") {
      signal = ControlSignal::constant(a.value, std::abs(a.value));
    } else if (preset == "zero") {
      signal = ControlSignal::constant(0.0, 0.0);
    } else {
      throw ParseError("signal preset must be sine, constant or zero");
    }
  }
  const PwmConfig cfg{a.horizon / a.intervals, a.intervals, a.scale, Layout::centered};
  cfg.validate();
  const PwmTrain train = pwm_transform(*signal, cfg, a.eps);
  const fs::path out = common.out.empty() ? "out" : common.out;
  write_file(out / "train.json", train_to_json(train));
  write_file(out / "train_spectrum.csv", spectrum_text(render_train(train, a.samples)));
  if (!a.smooth.empty()) {
    const SmoothingMethod m = parse_smoothing(a.smooth);
    const ControlSignal s =
        m == SmoothingMethod::gaussian
            ? gaussian_train(train, a.samples)
            : anti_pwm(train, 0,
                       m == SmoothingMethod::anti_pwm ? Smoothing::piecewise_constant : Smoothing::linear,
                       a.samples);
    write_file(out / "smoothed.csv", signal_text(s));
    write_file(out / "smoothed_spectrum.csv", spectrum_text(s));
  }
  std::cout << "wrote " << (out / "train.json").string() << " (M=" << train.intervals()
            << ", tau=" << train.tau() << " s)\n";
  return 0;
}

// optimize -------------------------------------------------------------------

qoc::ExperimentConfig load_experiment(const Common& common, bool full_scale) {
  using namespace qoc;
  ExperimentConfig cfg;
  if (!common.config.empty()) {
    cfg = config_from_json(read_file(common.config));
  } else {
    cfg = preset(common.preset.empty() ? "custom" : common.preset, full_scale);
  }
  if (common.seed) cfg.optimizer.seed = *common.seed;
  if (!common.out.empty()) cfg.output_dir = common.out;
  if (common.mem_budget_mb) {
    cfg.optimizer.memory_budget = static_cast<std::size_t>(*common.mem_budget_mb * 1024.0 * 1024.0);
  }
  try {
    cfg.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

struct OptimizeArgs {
  bool full_scale = false;
  std::optional<int> starts;
  std::optional<int> parallelism;
  std::string method;
  bool quiet = false;
};

int run_optimize(const Common& common, const OptimizeArgs& a) {
  using namespace qoc;
  ExperimentConfig cfg = load_experiment(common, a.full_scale);
  if (a.starts) cfg.starts = *a.starts;
  if (a.parallelism) cfg.parallelism = *a.parallelism;
  if (!a.method.empty()) {
    if (a.method == "pwm") {
      cfg.method = Method::pwm;
    } else if (a.method == "grape") {
      cfg.method = Method::grape;
    } else {
      throw ParseError("method must be pwm or grape");
    }
  }
  cfg.validate();
  const ControlProblem problem = cfg.problem();
  OptimizerConfig oc = cfg.optimizer;
  std::mutex io;
  if (!a.quiet) {
    oc.on_iteration = [&io](const IterationInfo& info) {
      std::lock_guard lock(io);
      std::cerr << "iteration " << info.iteration << " IF=" << info.infidelity
                << (info.perturbed ? " (perturbed)" : "") << '\n';
    };
  }
  const auto reports = multi_start(problem, oc, cfg.starts, cfg.parallelism, cfg.method);

  const fs::path out = cfg.output_dir;
  json runs = json::array();
  int reached = 0;
  bool failed = false;
  for (const auto& r : reports) {
    const std::string stem = "run_" + std::to_string(r.seed);
    write_with(out / (stem + "_trace.csv"), [&](std::ostream& os) { write_trace_csv(os, r); });
    write_file(out / (stem + ".json"), report_to_json(r));
    const bool ok = r.status != RunStatus::failed && r.final_infidelity() <= oc.target_infidelity;
    reached += ok;
    failed = failed || r.status == RunStatus::failed;
    json run = {{"seed", r.seed},
                {"status", status_name(r.status)},
                {"iterations", r.iterations},
                {"trace", stem + "_trace.csv"},
                {"report", stem + ".json"}};
    if (r.status != RunStatus::failed) run["final_infidelity"] = r.final_infidelity();
    if (!r.error.empty()) run["error"] = r.error;
    runs.push_back(run);
  }
  if (!reports.empty() && reports.front().final_train) {
    write_file(out / "best_train.json", train_to_json(*reports.front().final_train));
  }
  json summary = {{"experiment", cfg.experiment},
                  {"method", cfg.method == Method::pwm ? "pwm" : "grape"},
                  {"target_infidelity", oc.target_infidelity},
                  {"starts", cfg.starts},
                  {"reached_target", reached},
                  {"runs", runs},
                  {"config", json::parse(config_to_json(cfg))}};
  write_file(out / "summary.json", summary.dump(2) + "\n");
  std::cout << reached << "/" << cfg.starts << " runs reached IF <= " << oc.target_infidelity;
  if (!reports.empty() && reports.front().status != RunStatus::failed) {
    std::cout << "; best IF " << reports.front().final_infidelity();
  }
  std::cout << "\n";
  return failed ? kExitNumerical : 0;
}

// bench ----------------------------------------------------------------------

int run_bench_cmd(const Common& common, bool quiet) {
  using namespace qoc;
  BenchGrid grid;
  if (!common.config.empty()) grid = bench_grid_from_json(read_file(common.config));
  if (!common.preset.empty() && common.preset != "six-qubit-sine") {
    throw ParseError("bench preset must be six-qubit-sine");
  }
  const BenchResult result = run_bench(grid, [quiet](const std::string& line) {
    if (!quiet) std::cerr << line << '\n';
  });
  const fs::path out = common.out.empty() ? "out" : common.out;
  write_with(out / "bench.csv", [&](std::ostream& os) { write_bench_csv(os, result); });
  write_with(out / "bench_log.csv", [&](std::ostream& os) { write_bench_log_csv(os, result); });
  const BenchSummary s = compare_schemes(result);
  std::cout << "PWM at <= 0.9x PWC time in " << s.faster << "/" << s.compared << " cells\n";
  return 0;
}

// smooth ---------------------------------------------------------------------

struct SmoothArgs {
  std::string train_file;
  std::string method = "anti-pwm";
  int steps = 16;
  int samples = 16;
  bool full_scale = false;
};

int run_smooth(const Common& common, const SmoothArgs& a) {
  using namespace qoc;
  const PwmTrain train = train_from_json(read_file(a.train_file));
  ExperimentConfig cfg = load_experiment(common, a.full_scale);
  cfg.horizon = train.config.horizon();
  cfg.intervals = train.intervals();
  cfg.layout = train.config.layout;
  cfg.scale = train.config.layout == Layout::interleaved
                  ? train.config.scale / static_cast<double>(train.controls.size())
                  : train.config.scale;
  const ControlProblem problem = cfg.problem();
  const SmoothingMethod method = parse_smoothing(a.method);
  const SmoothingReport r = verify_smoothing(problem, train, method, a.steps, a.samples);
  const fs::path out = common.out.empty() ? "out" : common.out;
  for (std::size_t i = 0; i < r.signals.size(); ++i) {
    const std::string stem = "smoothed_" + std::to_string(i);
    write_file(out / (stem + ".csv"), signal_text(r.signals[i]));
    write_file(out / (stem + "_spectrum.csv"), spectrum_text(r.signals[i]));
  }
  json report = {{"method", smoothing_name(method)},
                 {"train_infidelity", r.train_infidelity},
                 {"smoothed_infidelity", r.smoothed_infidelity},
                 {"difference", r.difference},
                 {"reference_steps", r.reference_steps}};
  write_file(out / "smooth_report.json", report.dump(2) + "\n");
  std::cout << "train IF " << r.train_infidelity << ", smoothed IF " << r.smoothed_infidelity << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PWM quantum optimal control toolkit"};
  app.require_subcommand(1);

  Common common;
  TransformArgs targs;
  auto* transform = app.add_subcommand("transform", "Signal to PWM train, with spectrum");
  add_common(transform, common);
  transform->add_option("--signal", targs.signal_file, "Signal CSV (t,u); otherwise --preset");
  transform->add_option("-T,--horizon", targs.horizon, "Horizon in seconds");
  transform->add_option("-M,--intervals", targs.intervals, "Interval count");
  transform->add_option("--eps", targs.eps, "Pulse amplitude in rad/s");
  transform->add_option("--amplitude", targs.amplitude, "Sine amplitude in rad/s (default eps)");
  transform->add_option("--frequency-hz", targs.frequency_hz, "Sine frequency in Hz");
  transform->add_option("--phase", targs.phase, "Sine phase in rad");
  transform->add_option("--value", targs.value, "Constant level in rad/s");
  transform->add_option("--scale", targs.scale, "Amplitude scale f >= 1");
  transform->add_option("--smooth", targs.smooth, "anti-pwm, anti-pwm-linear or gaussian");
  transform->add_option("--samples", targs.samples, "Samples per interval for outputs");

  OptimizeArgs oargs;
  auto* optimize = app.add_subcommand("optimize", "Multi-start optimization of an experiment");
  add_common(optimize, common);
  optimize->add_flag("--full-scale", oargs.full_scale, "Full-size T and M for the preset");
  optimize->add_option("--starts", oargs.starts, "Number of random starts");
  optimize->add_option("--parallelism", oargs.parallelism, "Worker threads");
  optimize->add_option("--method", oargs.method, "pwm or grape");
  optimize->add_flag("--quiet", oargs.quiet, "No per-iteration log");

  bool bench_quiet = false;
  auto* bench = app.add_subcommand("bench", "PWM vs PWC propagation-cost grid");
  add_common(bench, common);
  bench->add_flag("--quiet", bench_quiet, "No progress log");

  SmoothArgs sargs;
  auto* smooth = app.add_subcommand("smooth", "Smooth a train and re-propagate it");
  add_common(smooth, common);
  smooth->add_option("--train", sargs.train_file, "Train JSON")->required();
  smooth->add_option("--method", sargs.method, "anti-pwm, anti-pwm-linear or gaussian");
  smooth->add_option("--steps", sargs.steps, "Reference steps per interval");
  smooth->add_option("--samples", sargs.samples, "Signal samples per interval");
  smooth->add_flag("--full-scale", sargs.full_scale, "Full-size preset parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*transform) return run_transform(common, targs);
    if (*optimize) return run_optimize(common, oargs);
    if (*bench) return run_bench_cmd(common, bench_quiet);
    if (*smooth) return run_smooth(common, sargs);
  } catch (const qoc::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
