// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace qoc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// A box-constrained objective over a flat vector of variables.
struct Model {
  std::vector<double> bound;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::pair<double, std::vector<double>>(const std::vector<double>&)> gradient;
};

void project(std::vector<double>& x, const std::vector<double>& bound) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], -bound[j], bound[j]);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

struct DescentResult {
  std::vector<double> x;
  RunStatus status = RunStatus::iteration_limit;
  int iterations = 0;
  std::vector<double> trace;
  std::vector<double> wall_ms;
  std::vector<bool> perturbed;
};

DescentResult descend(const Model& model, std::vector<double> x, const OptimizerConfig& cfg) {
  const std::size_t n = x.size();
  project(x, model.bound);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  DescentResult out;
  auto start = Clock::now();
  auto [f, g] = model.gradient(x);
  auto check = [&](int it) {
    if (!std::isfinite(f)) throw NumericalError("non-finite infidelity at iteration " + std::to_string(it));
    for (double v : g) {
      if (!std::isfinite(v)) throw NumericalError("non-finite gradient at iteration " + std::to_string(it));
    }
  };
  check(0);
  out.trace.push_back(f);
  out.wall_ms.push_back(elapsed_ms(start));
  out.perturbed.push_back(false);
  if (cfg.on_iteration) cfg.on_iteration({0, f, out.wall_ms.back(), false});

  double max_bound = 0.0;
  for (double b : model.bound) max_bound = std::max(max_bound, b);
  double step = cfg.initial_step;
  bool perturb_next = false;
  int failures = 0;
  int last_perturbation = 0;

  for (int it = 1;; ++it) {
    if (f <= cfg.target_infidelity) {
      out.status = RunStatus::converged;
      break;
    }
    if (it > cfg.max_iterations) {
      out.status = RunStatus::iteration_limit;
      break;
    }
    const double gnorm = norm(g);
    if (gnorm < cfg.gradient_tolerance) {
      out.status = RunStatus::stalled;
      break;
    }
    start = Clock::now();

    std::vector<double> dir(n);
    for (std::size_t j = 0; j < n; ++j) dir[j] = -g[j];
    const bool perturbed = perturb_next;
    if (perturbed) {
      std::vector<double> xi(n);
      for (double& v : xi) v = unit(rng);
      const double xn = norm(xi);
      const double s = xn > 0.0 ? cfg.perturbation_scale * gnorm / xn : 0.0;
      for (std::size_t j = 0; j < n; ++j) dir[j] -= s * xi[j];
      perturb_next = false;
      last_perturbation = it;
    }
    double dmax = 0.0;
    for (double v : dir) dmax = std::max(dmax, std::abs(v));
    if (!(step > 0.0)) step = 0.1 * max_bound / dmax;

    // Backtracking on the projected path.
    double a = step;
    bool accepted = false;
    std::vector<double> trial(n);
    double f_trial = f;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt, a *= cfg.armijo_shrink) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + a * dir[j];
      project(trial, model.bound);
      double decrease = 0.0;
      bool moved = false;
      for (std::size_t j = 0; j < n; ++j) {
        decrease += g[j] * (trial[j] - x[j]);
        moved = moved || trial[j] != x[j];
      }
      if (!moved) break;
      f_trial = model.value(trial);
      if (!std::isfinite(f_trial)) continue;
      if (f_trial <= f + cfg.armijo_slope * decrease) {
        accepted = true;
        break;
      }
    }
    // A perturbed step is kept even when it does not decrease the objective.
    if (!accepted && perturbed && std::isfinite(f_trial) && trial != x) accepted = true;

    if (accepted) {
      failures = 0;
      std::vector<double> g_old = std::move(g);
      std::vector<double> x_old = std::move(x);
      x = trial;
      std::tie(f, g) = model.gradient(x);
      check(it);
      step = cfg.step_growth * a;
      std::vector<double> sv(n);
      std::vector<double> yv(n);
      double sy = 0.0;
      double yy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        sv[j] = x[j] - x_old[j];
        yv[j] = g[j] - g_old[j];
        sy += sv[j] * yv[j];
        yy += yv[j] * yv[j];
      }
      // Alternating Barzilai-Borwein trial steps: s.s / s.y on odd
      // iterations, s.y / y.y on even ones.
      double ss = 0.0;
      for (double v : sv) ss += v * v;
      if (cfg.spectral_step && sy > 0.0 && yy > 0.0) step = it % 2 ? ss / sy : sy / yy;
    } else {
      ++failures;
      perturb_next = true;
      step = 0.0;
    }
    out.trace.push_back(f);
    out.wall_ms.push_back(elapsed_ms(start));
    out.perturbed.push_back(perturbed);
    out.iterations = it;
    if (cfg.on_iteration) cfg.on_iteration({it, f, out.wall_ms.back(), perturbed});
    if (failures >= 2) {
      out.status = f <= cfg.target_infidelity ? RunStatus::converged : RunStatus::stalled;
      break;
    }

    const int w = cfg.stall_window;
    if (!perturb_next && it >= w && it - last_perturbation >= w) {
      const double before = out.trace[out.trace.size() - 1 - w];
      if (before - f < cfg.stall_threshold * std::abs(before)) perturb_next = true;
    }
  }
  out.x = std::move(x);
  return out;
}

std::vector<double> flatten(const PwmTrain& train) {
  std::vector<double> x;
  for (const auto& c : train.controls) x.insert(x.end(), c.widths.begin(), c.widths.end());
  return x;
}

void unflatten(const std::vector<double>& x, PwmTrain& train) {
  std::size_t j = 0;
  for (auto& c : train.controls) {
    for (double& w : c.widths) w = x[j++];
  }
}

std::vector<double> flatten(const Eigen::MatrixXd& field) {
  std::vector<double> x(field.size());
  Eigen::Map<Eigen::MatrixXd>(x.data(), field.rows(), field.cols()) = field;
  return x;
}

Eigen::MatrixXd unflatten(const std::vector<double>& x, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, cols);
}

template <class Body>
OptimizationReport guarded(std::uint64_t seed, Body&& body) {
  OptimizationReport report;
  report.seed = seed;
  try {
    body(report);
  } catch (const std::exception& e) {
    report.status = RunStatus::failed;
    report.error = e.what();
  }
  return report;
}

void fill(OptimizationReport& report, DescentResult&& r) {
  report.status = r.status;
  report.iterations = r.iterations;
  report.trace = std::move(r.trace);
  report.wall_ms = std::move(r.wall_ms);
  report.perturbed = std::move(r.perturbed);
}

}  // namespace

void ControlProblem::validate() const {
  system.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error("horizon T must be positive");
  if (intervals < 1) throw Error("interval count M must be at least 1");
  if (target.dim() != system.dim()) throw Error("target dimension must be 2^m");
  if (axes.empty()) throw Error("at least one control axis is required");
  for (Axis a : axes) {
    if (a == Axis::z) throw Error("control axes must be x or y");
  }
  if (!(scale >= 1.0)) throw Error("amplitude scale f must be >= 1");
  const int n = static_cast<int>(axes.size());
  if (layout == Layout::centered && n != 1) throw Error("centered layout carries exactly one control");
  if (layout == Layout::nested && n != 2) throw Error("nested layout carries exactly two controls");
  if (layout == Layout::interleaved && n < 2) throw Error("interleaved layout needs two or more controls");
}

HermitianOperator ControlProblem::drift() const { return build_drift(system); }

std::vector<HermitianOperator> ControlProblem::generators() const {
  std::vector<HermitianOperator> ops;
  for (Axis a : axes) ops.push_back(control_generator(spins(), a));
  return ops;
}

PwmConfig ControlProblem::pwm_config() const {
  const double n = static_cast<double>(axes.size());
  return {tau(), intervals, layout == Layout::interleaved ? scale * n : scale, layout};
}

void OptimizerConfig::validate() const {
  if (max_iterations < 0) throw Error("max_iterations must be >= 0");
  if (!(target_infidelity >= 0.0)) throw Error("target_infidelity must be >= 0");
  if (!(initial_step >= 0.0)) throw Error("initial_step must be >= 0");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw Error("Armijo shrink factor must lie in (0, 1)");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw Error("Armijo slope must lie in (0, 1)");
  if (max_backtracks < 1) throw Error("max_backtracks must be positive");
  if (!(step_growth >= 1.0)) throw Error("step_growth must be >= 1");
  if (stall_window < 1) throw Error("stall window must be positive");
  if (!(stall_threshold > 0.0)) throw Error("stall threshold must be positive");
  if (!(perturbation_scale > 0.0)) throw Error("perturbation scale must be positive");
  if (!(gradient_tolerance >= 0.0)) throw Error("gradient tolerance must be >= 0");
  if (memory_budget == 0) throw Error("memory budget must be positive");
  if (!(initial_range > 0.0 && initial_range <= 1.0)) throw Error("initial_range must lie in (0, 1]");
}

const char* status_name(RunStatus status) {
  switch (status) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::iteration_limit:
      return "iteration-limit";
    case RunStatus::stalled:
      return "stalled";
    case RunStatus::failed:
      return "failed";
  }
  return "?";
}

RunStatus parse_status(const std::string& name) {
  for (RunStatus s : {RunStatus::converged, RunStatus::iteration_limit, RunStatus::stalled,
                      RunStatus::failed}) {
    if (name == status_name(s)) return s;
  }
  throw ParseError("unknown run status '" + name + "'");
}

double OptimizationReport::final_infidelity() const {
  if (status == RunStatus::failed || trace.empty()) return std::numeric_limits<double>::infinity();
  return trace.back();
}

PwmTrain random_train(const ControlProblem& problem, std::uint64_t seed, double range) {
  problem.validate();
  if (!(range > 0.0 && range <= 1.0)) throw Error("initial range must lie in (0, 1]");
  const std::vector<double> eps(problem.axes.size(), problem.system.eps);
  PwmTrain train = zero_train(problem.pwm_config(), eps);
  const double half = range * train.width_bound();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-half, half);
  for (auto& c : train.controls) {
    for (double& w : c.widths) w = dist(rng);
  }
  return train;
}

Eigen::MatrixXd random_field(const ControlProblem& problem, std::uint64_t seed, double range) {
  problem.validate();
  if (!(range > 0.0 && range <= 1.0)) throw Error("initial range must lie in (0, 1]");
  const double half = range * problem.system.eps;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-half, half);
  Eigen::MatrixXd field(static_cast<Eigen::Index>(problem.axes.size()), problem.intervals);
  for (Eigen::Index k = 0; k < field.cols(); ++k) {
    for (Eigen::Index i = 0; i < field.rows(); ++i) field(i, k) = dist(rng);
  }
  return field;
}

OptimizationReport optimize_pwm(const ControlProblem& problem, const OptimizerConfig& config,
                                std::optional<PwmTrain> initial) {
  problem.validate();
  config.validate();
  PwmTrain train = initial ? std::move(*initial) : random_train(problem, config.seed, config.initial_range);
  if (train.config != problem.pwm_config()) throw Error("initial train does not match the problem");
  train.validate();

  const SpectralCache cache = SpectralCache::for_train(problem.drift(), problem.generators(), train);
  GradientOptions gopt;
  gopt.memory_budget = config.memory_budget;
  gopt.phase_insensitive = config.phase_insensitive;

  Model model;
  model.bound.assign(flatten(train).size(), train.width_bound());
  PwmTrain work = train;
  model.value = [&](const std::vector<double>& x) {
    unflatten(x, work);
    return infidelity(problem.target, pwm_propagate(cache, work).U, config.phase_insensitive);
  };
  model.gradient = [&](const std::vector<double>& x) {
    unflatten(x, work);
    auto r = pwm_gradient(cache, work, problem.target, gopt);
    std::vector<double> g;
    for (auto& gi : r.gradient) g.insert(g.end(), gi.begin(), gi.end());
    return std::make_pair(r.infidelity, std::move(g));
  };

  OptimizationReport report;
  report.seed = config.seed;
  auto r = descend(model, flatten(train), config);
  unflatten(r.x, train);
  fill(report, std::move(r));
  report.final_train = std::move(train);
  return report;
}

OptimizationReport optimize_grape(const ControlProblem& problem, const OptimizerConfig& config,
                                  std::optional<Eigen::MatrixXd> initial) {
  problem.validate();
  config.validate();
  Eigen::MatrixXd field = initial ? std::move(*initial) : random_field(problem, config.seed, config.initial_range);
  const auto rows = static_cast<Eigen::Index>(problem.axes.size());
  if (field.rows() != rows || field.cols() != problem.intervals) {
    throw Error("initial field must have one row per axis and M columns");
  }
  const HermitianOperator h0 = problem.drift();
  const auto ops = problem.generators();
  const double tau = problem.tau();
  GradientOptions gopt;
  gopt.memory_budget = config.memory_budget;
  gopt.phase_insensitive = config.phase_insensitive;

  Model model;
  model.bound.assign(static_cast<std::size_t>(field.size()), problem.system.eps);
  model.value = [&](const std::vector<double>& x) {
    const auto u = unflatten(x, rows, problem.intervals);
    return infidelity(problem.target, pwc_propagate_field(h0, ops, u, tau).U, config.phase_insensitive);
  };
  model.gradient = [&](const std::vector<double>& x) {
    const auto u = unflatten(x, rows, problem.intervals);
    auto r = grape_gradient(h0, ops, u, tau, problem.target, gopt);
    std::vector<double> g(static_cast<std::size_t>(u.size()));
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      for (Eigen::Index i = 0; i < rows; ++i) g[k * rows + i] = r.gradient[i][k];
    }
    return std::make_pair(r.infidelity, std::move(g));
  };

  OptimizationReport report;
  report.seed = config.seed;
  auto r = descend(model, flatten(field), config);
  report.final_field = unflatten(r.x, rows, problem.intervals);
  fill(report, std::move(r));
  return report;
}

std::vector<OptimizationReport> multi_start(const ControlProblem& problem,
                                            const OptimizerConfig& config, int n_starts,
                                            int parallelism, Method method) {
  if (n_starts < 1) throw Error("multi-start needs at least one start");
  problem.validate();
  config.validate();
  std::vector<OptimizationReport> reports(n_starts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n_starts; i = next++) {
      OptimizerConfig cfg = config;
      cfg.seed = config.seed + static_cast<std::uint64_t>(i);
      if (parallelism > 1) cfg.on_iteration = nullptr;
      reports[i] = guarded(cfg.seed, [&](OptimizationReport& out) {
        out = method == Method::pwm ? optimize_pwm(problem, cfg) : optimize_grape(problem, cfg);
      });
    }
  };
  const int threads = std::clamp(parallelism, 1, n_starts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return a.final_infidelity() < b.final_infidelity();
  });
  return reports;
}

}  // namespace qoc
