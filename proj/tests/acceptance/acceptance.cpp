// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.
//
//   acceptance [--only N[,N...]]

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qoc/bench.hpp"
#include "qoc/experiments.hpp"
#include "test_support.hpp"

namespace qoc {
namespace {

using testing::central_differences;
using testing::flat_gradient;
using testing::flat_widths;
using testing::max_relative_error;
using testing::set_widths;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. Analytic width gradients against central differences.

Outcome gradients() {
  double worst = 0.0;
  int instances = 0;
  for (int seed = 0; seed < 24; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const int m = seed % 2 ? 3 : 2;
    const Layout layout = std::array{Layout::centered, Layout::nested, Layout::interleaved}[seed % 3];
    const int n = layout == Layout::centered ? 1 : 2;
    const int intervals = 4 + seed % 29;
    const SpinSystem sys = testing::random_system(m, rng, 5e3, 200.0, kTwoPi * 20e3);
    const TargetGate target(testing::random_unitary(sys.dim(), rng));
    std::vector<HermitianOperator> ops{control_generator(m, Axis::x)};
    if (n == 2) ops.push_back(control_generator(m, Axis::y));
    PwmConfig cfg{5e-6, intervals, layout == Layout::interleaved ? 2.0 : 1.0, layout};
    PwmTrain train = zero_train(cfg, std::vector<double>(n, sys.eps));
    testing::randomize_widths(train, rng);

    const SpectralCache cache = SpectralCache::for_train(build_drift(sys), ops, train);
    const auto analytic = flat_gradient(pwm_gradient(cache, train, target));
    PwmTrain work = train;
    auto f = [&](std::vector<double>& x) {
      set_widths(work, x);
      return infidelity(target, pwm_propagate(cache, work).U);
    };
    const auto numeric = central_differences(f, flat_widths(train), 1e-7 * train.tau());
    worst = std::max(worst, max_relative_error(analytic, numeric));
    ++instances;
  }
  return {worst <= 1e-6, std::to_string(instances) + " instances (dims 4, 8; M <= 32), max relative error " +
                             fmt(worst) + " (bound 1e-6)"};
}

// 2. Unitarity of every scheme.

Outcome unitarity() {
  double worst = 0.0;
  int propagators = 0;
  std::mt19937_64 rng(77);
  for (int m = 1; m <= 6; ++m) {
    const SpinSystem sys = testing::random_system(m, rng, 2e4, 100.0, kTwoPi * 2e6);
    const HermitianOperator h0 = build_drift(sys);
    const std::vector<HermitianOperator> xy{control_generator(m, Axis::x), control_generator(m, Axis::y)};
    const double T = 1e-3;
    for (int M : {1, 37, 10000}) {
      const double tau = T / M;
      auto check = [&](const CMatrix& u) {
        worst = std::max(worst, unitarity_error(u));
        ++propagators;
      };
      for (Layout layout : {Layout::centered, Layout::nested, Layout::interleaved}) {
        const int n = layout == Layout::centered ? 1 : 2;
        for (double f : {1.0, 4.0}) {
          const double scale = layout == Layout::interleaved ? 2.0 * f : f;
          PwmTrain t = zero_train({tau, M, scale, layout}, std::vector<double>(n, sys.eps));
          testing::randomize_widths(t, rng, 0.0, 1.0);
          const std::vector<HermitianOperator> ops(xy.begin(), xy.begin() + n);
          check(pwm_propagate(SpectralCache::for_train(h0, ops, t), t).U);
        }
      }
      const std::vector<ControlTerm> terms{{ControlSignal::sine(sys.eps, kTwoPi * 5e4, 0.3, sys.eps), xy[0]},
                                           {ControlSignal::sine(sys.eps, kTwoPi * 7e4, 0.0, sys.eps), xy[1]}};
      check(pwc_propagate(h0, terms, tau, T).U);
      check(spo_propagate(h0, terms, tau, T).U);
      Eigen::MatrixXd field = Eigen::MatrixXd::Random(2, M) * sys.eps;
      check(pwc_propagate_field(h0, xy, field, tau).U);
    }
  }
  return {worst <= 1e-10, std::to_string(propagators) + " propagators (dims 2-64, M up to 1e4), max ||U'U-I||_F " +
                              fmt(worst) + " (bound 1e-10)"};
}

// 3. Amplitude-scaled PWM approaches the split-operator propagator.

Outcome spo_limit() {
  const testing::SineDrive s;
  const CMatrix spo = s.spo(256);
  const PwmTrain t = s.train(256);
  std::vector<double> d;
  bool monotone = true;
  for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    d.push_back((s.pwm(scale_train(t, f)) - spo).norm());
    if (d.size() > 1 && !(d.back() < d[d.size() - 2])) monotone = false;
  }
  std::string detail = "||U_PWM(f) - U_SPO||_F for f=1,2,4,8,16:";
  for (double v : d) detail += " " + fmt(v);
  detail += monotone ? " (monotone)" : " (not monotone)";
  return {monotone && d.back() <= 1e-6, detail + ", bound 1e-6 at f=16"};
}

// 4. Equal-area transform and the anti-transform fixed point.

Outcome eap() {
  const double eps = kTwoPi * 2e6;
  double area_worst = 0.0;
  for (int M : {7, 333, 2000}) {
    const double T = 1e-3;
    const PwmConfig cfg{T / M, M, 1.0, Layout::centered};
    for (const auto& u : {ControlSignal::constant(-0.3 * eps, eps), ControlSignal::constant(eps, eps),
                          ControlSignal::sine(0.9 * eps, kTwoPi * 50e3, 0.4, eps),
                          ControlSignal::sine(-eps, kTwoPi * 7e3, -1.0, eps)}) {
      const PwmTrain t = pwm_transform(u, cfg, eps);
      for (int k = 0; k < M; ++k) {
        const double err = std::abs(eps * t.controls[0].widths[k] - u.integral(k * cfg.tau, (k + 1) * cfg.tau));
        area_worst = std::max(area_worst, err / (eps * cfg.tau));
      }
    }
  }
  double fixed_worst = 0.0;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int M = 5 + 37 * trial;
    const double tau = 2e-6;
    std::uniform_real_distribution<double> level(-eps, eps);
    SampledWave w{0.0, tau, {}, SampledWave::Interpolation::hold};
    for (int k = 0; k < M; ++k) w.values.push_back(level(rng));
    const ControlSignal u = ControlSignal::sampled(w, eps);
    const PwmTrain t1 = pwm_transform(u, {tau, M, 1.0, Layout::centered}, eps);
    const PwmTrain t2 = pwm_transform(anti_pwm(t1), t1.config, eps);
    for (int k = 0; k < M; ++k) {
      fixed_worst = std::max(fixed_worst, std::abs(t2.controls[0].widths[k] - t1.controls[0].widths[k]) / tau);
      fixed_worst = std::max(fixed_worst, std::abs(eps * t1.controls[0].widths[k] - w.values[k] * tau) / (eps * tau));
    }
  }
  return {area_worst <= 1e-12 && fixed_worst <= 1e-12,
          "max area error " + fmt(area_worst) + " eps*tau, max fixed-point error " + fmt(fixed_worst) +
              " tau (bound 1e-12)"};
}

// 5, 7 and 9 share their runs.

struct Runs {
  std::vector<OptimizationReport> reports;
  double seconds = 0.0;
};

Runs run_preset(const std::string& name) {
  const ExperimentConfig c = preset(name);
  const auto start = std::chrono::steady_clock::now();
  OptimizerConfig oc = c.optimizer;
  oc.on_iteration = [](const IterationInfo& info) {
    if (info.iteration % 10 == 0) {
      std::fprintf(stderr, "  iteration %d IF=%.4g\n", info.iteration, info.infidelity);
    }
  };
  Runs r{multi_start(c.problem(), oc, c.starts, c.parallelism, c.method), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string run_list(const Runs& runs) {
  std::string s;
  for (const auto& r : runs.reports) {
    if (!s.empty()) s += ", ";
    s += "seed " + std::to_string(r.seed) + ": " +
         (r.status == RunStatus::failed ? "failed (" + r.error + ")"
                                        : fmt(r.final_infidelity()) + " @" + std::to_string(r.iterations));
  }
  return s;
}

Outcome three_qubit(const Runs& runs) {
  const ExperimentConfig c = preset("three-qubit-rotation");
  int reached = 0;
  for (const auto& r : runs.reports) {
    reached += r.status != RunStatus::failed && r.final_infidelity() <= 1e-3 && r.iterations <= 500;
  }
  return {reached >= 7, std::to_string(reached) + "/" + std::to_string(c.starts) +
                            " starts at IF <= 1e-3 within 500 iterations (need 7) [" + run_list(runs) + "]"};
}

Outcome smoothing(const Runs& runs) {
  const ExperimentConfig c = preset("three-qubit-rotation");
  const OptimizationReport& best = runs.reports.front();
  if (best.status == RunStatus::failed || !best.final_train) return {false, "no train from criterion 5"};
  const SmoothingReport s = verify_smoothing(c.problem(), *best.final_train, SmoothingMethod::anti_pwm);
  const double ratio = s.smoothed_infidelity / s.train_infidelity;
  std::string detail = "tau=" + fmt(1e6 * best.final_train->tau()) + " us: train IF " + fmt(s.train_infidelity) +
                       ", smoothed IF " + fmt(s.smoothed_infidelity) + ", ratio " + fmt(ratio) + " (need <= 2);";

  // Coarse sweep: optimize at tau = 10, 20, 40 us and smooth the result.
  bool degraded = true;
  detail += " coarse sweep ratios";
  for (int M : {1000, 500, 250}) {
    ExperimentConfig cc = c;
    cc.intervals = M;
    cc.optimizer.initial_range = 0.5 * M / 1e5;
    cc.optimizer.seed = best.seed;
    const ControlProblem p = cc.problem();
    const OptimizationReport r = optimize_pwm(p, cc.optimizer);
    const SmoothingReport sc = verify_smoothing(p, *r.final_train, SmoothingMethod::anti_pwm);
    const double rc = sc.smoothed_infidelity / sc.train_infidelity;
    degraded = degraded && rc >= 10.0;
    detail += " tau=" + fmt(1e6 * p.tau()) + "us:" + fmt(rc) + " (IF " + fmt(sc.train_infidelity) + ")";
  }
  detail += " (need >= 10)";
  return {ratio <= 2.0 && degraded, detail};
}

Outcome cnot(const Runs& runs) {
  const OptimizationReport& best = runs.reports.front();
  const bool ok = best.status != RunStatus::failed && best.final_infidelity() <= 1e-2 && best.iterations <= 50;
  return {ok, "best of 3 starts IF " + fmt(best.final_infidelity()) + " (need <= 1e-2 within 50 iterations) [" +
                  run_list(runs) + "], " + fmt(runs.seconds) + " s"};
}

Outcome bench() {
  const BenchGrid grid;
  const BenchResult r = run_bench(grid);
  const BenchSummary s = compare_schemes(r, 0.9);
  const int cells = static_cast<int>(grid.horizons.size() * grid.exponents.size());
  std::string detail = "PWM <= 0.9x PWC time in " + std::to_string(s.faster) + "/" + std::to_string(cells) +
                       " cells (need 75%); ratios";
  for (double T : grid.horizons) {
    for (int e : grid.exponents) {
      const BenchCell* a = r.find(Scheme::pwm, T, e);
      const BenchCell* b = r.find(Scheme::pwc, T, e);
      detail += " ";
      if (a && b && a->reachable() && b->reachable()) {
        detail += fmt(a->median_seconds / b->median_seconds);
      } else {
        detail += "unreachable";
      }
    }
  }
  return {4 * s.faster >= 3 * cells, detail};
}

bool same_runs(const Runs& a, const Runs& b, std::string& why) {
  std::map<std::uint64_t, const OptimizationReport*> by_seed;
  for (const auto& r : b.reports) by_seed[r.seed] = &r;
  for (const auto& r : a.reports) {
    const auto it = by_seed.find(r.seed);
    if (it == by_seed.end()) {
      why = "seed " + std::to_string(r.seed) + " missing";
      return false;
    }
    const OptimizationReport& o = *it->second;
    if (r.trace != o.trace || r.perturbed != o.perturbed || r.iterations != o.iterations ||
        r.final_train != o.final_train) {
      why = "seed " + std::to_string(r.seed) + " differs";
      return false;
    }
  }
  return a.reports.size() == b.reports.size();
}

}  // namespace
}  // namespace qoc

int main(int argc, char** argv) {
  using namespace qoc;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::atoi(item.c_str()));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N[,N...]]\n");
      return 2;
    }
  }
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  std::optional<Runs> rotation;
  std::optional<Runs> cnot_runs;
  auto get_rotation = [&]() -> const Runs& {
    if (!rotation) rotation = run_preset("three-qubit-rotation");
    return *rotation;
  };
  auto get_cnot = [&]() -> const Runs& {
    if (!cnot_runs) cnot_runs = run_preset("six-qubit-cnot");
    return *cnot_runs;
  };

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, gradients},
      {2, unitarity},
      {3, spo_limit},
      {4, eap},
      {5, [&] { return three_qubit(get_rotation()); }},
      {6, [&] { return smoothing(get_rotation()); }},
      {7, [&] { return cnot(get_cnot()); }},
      {8, bench},
      {9,
       [&] {
         std::string why;
         const Runs again5 = run_preset("three-qubit-rotation");
         const bool ok5 = same_runs(get_rotation(), again5, why);
         const std::string why5 = why;
         const Runs again7 = run_preset("six-qubit-cnot");
         const bool ok7 = same_runs(get_cnot(), again7, why);
         return Outcome{ok5 && ok7, std::string("criterion 5 traces ") + (ok5 ? "identical" : "differ: " + why5) +
                                        ", criterion 7 traces " + (ok7 ? "identical" : "differ: " + why)};
       }},
  };

  int failed = 0;
  for (const auto& [n, run] : criteria) {
    if (!wanted(n)) continue;
    std::fprintf(stderr, "running criterion %d\n", n);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", n, o.pass ? "PASS" : "FAIL", s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
