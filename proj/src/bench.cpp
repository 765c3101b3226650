// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>
#include <tuple>

#include "qoc/propagation.hpp"
#include "qoc/pwm.hpp"
#include "qoc/spectral.hpp"

namespace qoc {

namespace {

struct Drive {
  HermitianOperator h0;
  HermitianOperator hx;
  ControlSignal signal;
  double eps = 0.0;
};

Drive make_drive(const BenchGrid& grid) {
  const SpinSystem sys = load_spin_table(grid.spin_table, grid.eps).leading(grid.spins);
  return {build_drift(sys), control_generator(grid.spins, Axis::x),
          ControlSignal::sine(grid.amplitude, kTwoPi * grid.drive_hz, 0.0, grid.eps), grid.eps};
}

PwmTrain bench_train(const Drive& drive, double horizon, long m) {
  const PwmConfig cfg{horizon / static_cast<double>(m), static_cast<int>(m), 1.0, Layout::centered};
  return pwm_transform(drive.signal, cfg, drive.eps);
}

CMatrix pwc_run(const Drive& drive, double horizon, long m) {
  const ControlTerm term{drive.signal, drive.hx};
  return pwc_propagate(drive.h0, std::span<const ControlTerm>(&term, 1),
                       horizon / static_cast<double>(m), horizon)
      .U;
}

class Runner {
 public:
  Runner(const Drive& drive, double horizon)
      : drive_(drive),
        horizon_(horizon),
        cache_(SpectralCache::for_train(drive.h0, std::vector<HermitianOperator>{drive.hx},
                                        bench_train(drive, horizon, 1))) {}

  CMatrix run(Scheme scheme, long m) const {
    if (scheme == Scheme::pwc) return pwc_run(drive_, horizon_, m);
    return pwm_propagate(cache_, bench_train(drive_, horizon_, m)).U;
  }

  // Seconds for one propagation; inputs are prepared outside the clock.
  double time(Scheme scheme, long m) const {
    using Clock = std::chrono::steady_clock;
    if (scheme == Scheme::pwc) {
      const auto start = Clock::now();
      const CMatrix u = pwc_run(drive_, horizon_, m);
      const double s = std::chrono::duration<double>(Clock::now() - start).count();
      sink_ += std::abs(u(0, 0));
      return s;
    }
    const PwmTrain train = bench_train(drive_, horizon_, m);
    const auto start = Clock::now();
    const CMatrix u = pwm_propagate(cache_, train).U;
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    sink_ += std::abs(u(0, 0));
    return s;
  }

 private:
  const Drive& drive_;
  double horizon_;
  SpectralCache cache_;
  mutable double sink_ = 0.0;
};

struct Reference {
  CMatrix u;
  long intervals = 0;
};

// Richardson extrapolation (4 U_2m - U_m) / 3 of the midpoint rule, whose error
// expands in even powers of the step.
Reference reference(const Drive& drive, double horizon, double tolerance, long limit) {
  long m = 64;
  CMatrix coarse = pwc_run(drive, horizon, m);
  CMatrix fine = pwc_run(drive, horizon, 2 * m);
  CMatrix previous = (4.0 * fine - coarse) / 3.0;
  for (m *= 2; 2 * m <= limit; m *= 2) {
    coarse = std::move(fine);
    fine = pwc_run(drive, horizon, 2 * m);
    CMatrix next = (4.0 * fine - coarse) / 3.0;
    const double change = (next - previous).norm();
    previous = std::move(next);
    if (change <= tolerance) return {std::move(previous), 2 * m};
  }
  throw Error("benchmark reference did not settle within the interval limit");
}

std::string format_seconds(double s) {
  std::ostringstream os;
  os.precision(6);
  os << s;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* scheme_name(Scheme scheme) { return scheme == Scheme::pwm ? "pwm" : "pwc"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "pwm") return Scheme::pwm;
  if (name == "pwc") return Scheme::pwc;
  throw ParseError("scheme must be \"pwm\" or \"pwc\"");
}

void BenchGrid::validate() const {
  if (horizons.empty()) throw Error("bench grid needs at least one horizon");
  for (double t : horizons) {
    if (!(t > 0.0)) throw Error("bench horizons must be positive");
  }
  if (exponents.empty()) throw Error("bench grid needs at least one target");
  for (int e : exponents) {
    if (e < 1 || e > 12) throw Error("bench target exponents must lie in 1..12");
  }
  if (schemes.empty()) throw Error("bench grid needs at least one scheme");
  if (repetitions < 3) throw Error("bench repetitions must be >= 3");
  if (spins < 1) throw Error("bench spins must be >= 1");
  if (!(eps > 0.0)) throw Error("bench eps must be positive");
  if (!(std::abs(amplitude) <= eps)) throw Error("bench drive amplitude exceeds eps");
  if (!(drive_hz >= 0.0)) throw Error("bench drive frequency must be >= 0");
  if (max_log2_intervals < 1 || max_log2_intervals > 30) {
    throw Error("bench interval limit must lie in 2^1..2^30");
  }
  if (parallelism < 1) throw Error("bench parallelism must be >= 1");
}

double BenchCell::target() const { return std::pow(10.0, -exponent); }

const BenchCell* BenchResult::find(Scheme scheme, double horizon, int exponent) const {
  for (const auto& c : cells) {
    if (c.scheme == scheme && c.horizon == horizon && c.exponent == exponent) return &c;
  }
  return nullptr;
}

BenchResult run_bench(const BenchGrid& grid, const std::function<void(const std::string&)>& log) {
  grid.validate();
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  const Drive drive = make_drive(grid);
  const long limit = long{1} << grid.max_log2_intervals;
  std::vector<int> exponents = grid.exponents;
  std::sort(exponents.begin(), exponents.end());
  exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());
  std::vector<Scheme> schemes = grid.schemes;
  std::sort(schemes.begin(), schemes.end(),
            [](Scheme a, Scheme b) { return std::string(scheme_name(a)) < scheme_name(b); });
  schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
  const double smallest = std::pow(10.0, -exponents.back());

  BenchResult out;
  std::vector<Reference> refs;
  std::vector<std::unique_ptr<Runner>> runners;
  for (double t : grid.horizons) {
    refs.push_back(reference(drive, t, 1e-2 * smallest, limit));
    out.reference_intervals.push_back(refs.back().intervals);
    runners.push_back(std::make_unique<Runner>(drive, t));
    say("reference T=" + format_seconds(t) + " s with M=" + std::to_string(refs.back().intervals));
  }

  // Accuracy search, one task per (scheme, T).
  struct Task {
    Scheme scheme;
    std::size_t h;
    std::vector<BenchCell> cells;
  };
  std::vector<Task> tasks;
  for (Scheme s : schemes) {
    for (std::size_t h = 0; h < grid.horizons.size(); ++h) tasks.push_back({s, h, {}});
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      Task& task = tasks[i];
      const double t = grid.horizons[task.h];
      std::map<int, BenchCell> found;
      double previous_error = 0.0;
      long previous_m = 0;
      for (long m = 1; m <= limit && found.size() < exponents.size(); m *= 2) {
        const double err = (runners[task.h]->run(task.scheme, m) - refs[task.h].u).norm();
        for (int e : exponents) {
          const double target = std::pow(10.0, -e);
          if (found.count(e) || previous_m == 0) continue;
          if (previous_error <= target && err <= target) {
            BenchCell c;
            c.scheme = task.scheme;
            c.horizon = t;
            c.exponent = e;
            c.intervals = previous_m;
            c.error = previous_error;
            found.emplace(e, c);
          }
        }
        previous_error = err;
        previous_m = m;
      }
      for (int e : exponents) {
        if (found.count(e)) {
          task.cells.push_back(found.at(e));
        } else {
          BenchCell c;
          c.scheme = task.scheme;
          c.horizon = t;
          c.exponent = e;
          task.cells.push_back(c);
        }
      }
    }
  };
  {
    std::vector<std::thread> pool;
    const int workers = std::min<int>(grid.parallelism, static_cast<int>(tasks.size()));
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  std::map<std::tuple<int, std::size_t, int>, BenchCell> cells;
  for (const Task& task : tasks) {
    for (const BenchCell& c : task.cells) {
      cells.emplace(std::make_tuple(static_cast<int>(task.scheme), task.h, c.exponent), c);
      say(std::string("search ") + scheme_name(c.scheme) + " T=" + format_seconds(c.horizon) +
          " target=1e-" + std::to_string(c.exponent) + " M=" +
          (c.intervals ? std::to_string(*c.intervals) : std::string("unreachable")));
    }
  }

  // Timing, single-threaded. Round r runs the schemes forward for even r and
  // reversed for odd r, so neither scheme always goes first.
  for (std::size_t h = 0; h < grid.horizons.size(); ++h) {
    for (int e : exponents) {
      for (int r = 0; r < grid.repetitions; ++r) {
        std::vector<Scheme> order = schemes;
        if (r % 2) std::reverse(order.begin(), order.end());
        for (Scheme s : order) {
          BenchCell& c = cells.at(std::make_tuple(static_cast<int>(s), h, e));
          if (!c.intervals) continue;
          const double sec = runners[h]->time(s, *c.intervals);
          c.seconds.push_back(sec);
          out.log.push_back({s, c.horizon, e, r, *c.intervals, sec});
        }
      }
    }
  }
  for (auto& [key, c] : cells) {
    if (!c.seconds.empty()) c.median_seconds = median(c.seconds);
    out.cells.push_back(c);
  }
  std::sort(out.cells.begin(), out.cells.end(), [](const BenchCell& a, const BenchCell& b) {
    const std::string sa = scheme_name(a.scheme);
    const std::string sb = scheme_name(b.scheme);
    if (sa != sb) return sa < sb;
    if (a.horizon != b.horizon) return a.horizon < b.horizon;
    return a.target() < b.target();
  });
  return out;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << "# accuracy: Frobenius propagator error ||U_scheme - U_ref||_F <= target_IF; "
         "U_ref: Richardson-extrapolated fine midpoint PWC\n";
  out << "T,target_IF,scheme,M_required,cpu_median_s\n";
  for (const auto& c : result.cells) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, c.horizon).ptr;
    out << std::string_view(buf, static_cast<std::size_t>(end - buf)) << ",1e-" << c.exponent << ',' << scheme_name(c.scheme) << ',';
    if (c.intervals) {
      out << *c.intervals << ',' << format_seconds(c.median_seconds) << '\n';
    } else {
      out << "unreachable,\n";
    }
  }
}

BenchSummary compare_schemes(const BenchResult& result, double ratio) {
  BenchSummary s;
  for (const auto& c : result.cells) {
    if (c.scheme != Scheme::pwm || !c.reachable()) continue;
    const BenchCell* other = result.find(Scheme::pwc, c.horizon, c.exponent);
    if (!other || !other->reachable()) continue;
    ++s.compared;
    if (c.median_seconds <= ratio * other->median_seconds) ++s.faster;
  }
  return s;
}

}  // namespace qoc
