// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/experiments.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace qoc {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

json gate_json(const GateSpec& gate) {
  if (const auto* r = std::get_if<RotationGate>(&gate)) {
    return {{"kind", "rotation"}, {"axis", axis_name(r->axis)}, {"angle", r->angle}, {"spin", r->spin}};
  }
  const auto& c = std::get<CnotGate>(gate);
  return {{"kind", "cnot"}, {"control", c.control}, {"target", c.target}};
}

GateSpec gate_of(const json& j) {
  std::string kind;
  read(j, "kind", kind);
  if (kind == "rotation") {
    RotationGate r;
    std::string axis = "x";
    read(j, "axis", axis);
    r.axis = parse_axis(axis);
    read(j, "angle", r.angle);
    read(j, "spin", r.spin);
    return r;
  }
  if (kind == "cnot") {
    CnotGate c;
    read(j, "control", c.control);
    read(j, "target", c.target);
    return c;
  }
  throw ParseError("target kind must be \"rotation\" or \"cnot\"");
}

json optimizer_json(const OptimizerConfig& o) {
  return {{"max_iterations", o.max_iterations},
          {"target_infidelity", o.target_infidelity},
          {"initial_step", o.initial_step},
          {"armijo_shrink", o.armijo_shrink},
          {"armijo_slope", o.armijo_slope},
          {"max_backtracks", o.max_backtracks},
          {"step_growth", o.step_growth},
          {"spectral_step", o.spectral_step},
          {"stall_window", o.stall_window},
          {"stall_threshold", o.stall_threshold},
          {"perturbation_scale", o.perturbation_scale},
          {"gradient_tolerance", o.gradient_tolerance},
          {"seed", o.seed},
          {"memory_budget_mb", static_cast<double>(o.memory_budget) / (1024.0 * 1024.0)},
          {"phase_insensitive", o.phase_insensitive},
          {"initial_range", o.initial_range}};
}

void read_optimizer(const json& j, OptimizerConfig& o) {
  read(j, "max_iterations", o.max_iterations);
  read(j, "target_infidelity", o.target_infidelity);
  read(j, "initial_step", o.initial_step);
  read(j, "armijo_shrink", o.armijo_shrink);
  read(j, "armijo_slope", o.armijo_slope);
  read(j, "max_backtracks", o.max_backtracks);
  read(j, "step_growth", o.step_growth);
  read(j, "spectral_step", o.spectral_step);
  read(j, "stall_window", o.stall_window);
  read(j, "stall_threshold", o.stall_threshold);
  read(j, "perturbation_scale", o.perturbation_scale);
  read(j, "gradient_tolerance", o.gradient_tolerance);
  read(j, "seed", o.seed);
  if (j.contains("memory_budget_mb")) {
    double mb = 0.0;
    read(j, "memory_budget_mb", mb);
    if (!(mb > 0.0)) throw ParseError("memory_budget_mb must be positive");
    o.memory_budget = static_cast<std::size_t>(mb * 1024.0 * 1024.0);
  }
  read(j, "phase_insensitive", o.phase_insensitive);
  read(j, "initial_range", o.initial_range);
}

// Random widths that give each pulse the same rotation range as a half-bound
// start at M = 100000 over the same T.
double matched_range(int intervals) { return std::min(0.5, 0.5 * intervals / 100000.0); }

}  // namespace

std::vector<std::string> preset_names() { return {"three-qubit-rotation", "six-qubit-cnot", "custom"}; }

ExperimentConfig preset(const std::string& name, bool full_scale) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "three-qubit-rotation") {
    c.spins = 3;
    c.gate = RotationGate{Axis::x, kPi / 2.0, 1};
    c.horizon = 10e-3;
    c.intervals = full_scale ? 100000 : 2000;
    c.layout = Layout::centered;
    c.axes = {Axis::x};
    c.starts = 10;
    c.optimizer.max_iterations = 500;
    c.optimizer.target_infidelity = 1e-3;
    c.optimizer.initial_range = matched_range(c.intervals);
  } else if (name == "six-qubit-cnot") {
    c.spins = 6;
    c.gate = CnotGate{1, 2};
    c.horizon = full_scale ? 10.0 : 50e-3;
    c.intervals = full_scale ? 100000 : 5000;
    c.layout = Layout::nested;
    c.axes = {Axis::x, Axis::y};
    c.starts = 3;
    c.optimizer.max_iterations = 50;
    c.optimizer.target_infidelity = 1e-2;
  } else if (name == "custom") {
    // One spin precessing at 1 kHz, driven to a pi/2 rotation about x.
    c.system = SpinSystem{{1000.0}, {{}}, kTwoPi * 60e3};
    c.spins = 1;
    c.eps = kTwoPi * 60e3;
    c.gate = RotationGate{Axis::x, kPi / 2.0, 1};
    c.horizon = 100e-6;
    c.intervals = 64;
    c.layout = Layout::centered;
    c.axes = {Axis::x};
    c.starts = 1;
    c.optimizer.max_iterations = 200;
    c.optimizer.target_infidelity = 1e-6;
  } else {
    throw ParseError("unknown experiment '" + name + "'");
  }
  return c;
}

ControlProblem ExperimentConfig::problem() const {
  validate();
  ControlProblem p;
  SpinSystem full = system ? *system : load_spin_table(spin_table, eps);
  if (spins > full.size()) throw Error("spin table has fewer spins than requested");
  p.system = full.leading(spins);
  p.system.eps = eps;
  p.target = make_target(gate, spins);
  p.horizon = horizon;
  p.intervals = intervals;
  p.axes = axes;
  p.layout = layout;
  p.scale = scale;
  p.validate();
  return p;
}

void ExperimentConfig::validate() const {
  if (spins < 1) throw Error("spins must be >= 1");
  if (!(horizon > 0.0)) throw Error("T must be positive");
  if (intervals < 1) throw Error("M must be >= 1");
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (starts < 1) throw Error("starts must be >= 1");
  if (parallelism < 1) throw Error("parallelism must be >= 1");
  optimizer.validate();
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  std::string name = "custom";
  read(j, "experiment", name);
  bool full_scale = false;
  read(j, "full_scale", full_scale);
  ExperimentConfig c = preset(name, full_scale);
  read(j, "spin_table", c.spin_table);
  if (j.contains("spin_table")) c.system.reset();
  if (j.contains("system")) {
    SpinSystem s;
    read(j.at("system"), "shift_hz", s.shift_hz);
    read(j.at("system"), "coupling_hz", s.coupling_hz);
    if (s.coupling_hz.empty()) s.coupling_hz.assign(s.shift_hz.size(), {});
    c.system = s;
  }
  read(j, "spins", c.spins);
  if (j.contains("target")) c.gate = gate_of(j.at("target"));
  read(j, "T", c.horizon);
  read(j, "M", c.intervals);
  if (j.contains("layout")) {
    std::string layout;
    read(j, "layout", layout);
    c.layout = parse_layout(layout);
  }
  if (j.contains("axes")) {
    std::vector<std::string> axes;
    read(j, "axes", axes);
    c.axes.clear();
    for (const auto& a : axes) c.axes.push_back(parse_axis(a));
  }
  read(j, "eps", c.eps);
  if (c.system) c.system->eps = c.eps;
  read(j, "scale", c.scale);
  if (name == "three-qubit-rotation") c.optimizer.initial_range = matched_range(c.intervals);
  if (j.contains("optimizer")) read_optimizer(j.at("optimizer"), c.optimizer);
  read(j, "starts", c.starts);
  read(j, "parallelism", c.parallelism);
  if (j.contains("method")) {
    std::string m;
    read(j, "method", m);
    if (m == "pwm") {
      c.method = Method::pwm;
    } else if (m == "grape") {
      c.method = Method::grape;
    } else {
      throw ParseError("method must be \"pwm\" or \"grape\"");
    }
  }
  read(j, "output_dir", c.output_dir);
  try {
    c.validate();
    if (c.system) c.system->validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  if (c.system) {
    j["system"] = {{"shift_hz", c.system->shift_hz}, {"coupling_hz", c.system->coupling_hz}};
  } else {
    j["spin_table"] = c.spin_table;
  }
  j["spins"] = c.spins;
  j["target"] = gate_json(c.gate);
  j["T"] = c.horizon;
  j["M"] = c.intervals;
  j["layout"] = layout_name(c.layout);
  std::vector<std::string> axes;
  for (Axis a : c.axes) axes.push_back(axis_name(a));
  j["axes"] = axes;
  j["eps"] = c.eps;
  j["scale"] = c.scale;
  j["optimizer"] = optimizer_json(c.optimizer);
  j["starts"] = c.starts;
  j["parallelism"] = c.parallelism;
  j["method"] = c.method == Method::pwm ? "pwm" : "grape";
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

SmoothingMethod parse_smoothing(const std::string& name) {
  if (name == "anti-pwm") return SmoothingMethod::anti_pwm;
  if (name == "anti-pwm-linear") return SmoothingMethod::anti_pwm_linear;
  if (name == "gaussian") return SmoothingMethod::gaussian;
  throw ParseError("smoothing method must be anti-pwm, anti-pwm-linear or gaussian");
}

const char* smoothing_name(SmoothingMethod method) {
  switch (method) {
    case SmoothingMethod::anti_pwm:
      return "anti-pwm";
    case SmoothingMethod::anti_pwm_linear:
      return "anti-pwm-linear";
    case SmoothingMethod::gaussian:
      return "gaussian";
  }
  return "?";
}

SmoothingReport verify_smoothing(const ControlProblem& problem, const PwmTrain& train,
                                 SmoothingMethod method, int steps_per_interval,
                                 int samples_per_interval) {
  problem.validate();
  if (steps_per_interval < 1) throw Error("steps per interval must be >= 1");
  const PwmConfig expect = problem.pwm_config();
  const PwmConfig& have = train.config;
  if (have.intervals != expect.intervals || have.layout != expect.layout ||
      have.scale != expect.scale || std::abs(have.tau - expect.tau) > 1e-12 * expect.tau ||
      train.controls.size() != problem.axes.size()) {
    throw Error("train does not match the problem");
  }
  const auto h0 = problem.drift();
  const auto ops = problem.generators();

  SmoothingReport out;
  const SpectralCache cache = SpectralCache::for_train(h0, ops, train);
  out.train_infidelity = infidelity(problem.target, pwm_propagate(cache, train).U);

  std::vector<ControlTerm> terms;
  for (int i = 0; i < static_cast<int>(train.controls.size()); ++i) {
    ControlSignal s = method == SmoothingMethod::gaussian
                          ? gaussian_train(train, samples_per_interval, i)
                          : anti_pwm(train, i,
                                     method == SmoothingMethod::anti_pwm ? Smoothing::piecewise_constant
                                                                         : Smoothing::linear,
                                     samples_per_interval);
    out.signals.push_back(s);
    terms.push_back({std::move(s), ops[i]});
  }
  const double step = train.tau() / steps_per_interval;
  out.reference_steps = static_cast<long>(train.intervals()) * steps_per_interval;
  out.smoothed_infidelity =
      infidelity(problem.target, pwc_propagate(h0, terms, step, problem.horizon).U);
  out.difference = out.smoothed_infidelity - out.train_infidelity;
  return out;
}

}  // namespace qoc
