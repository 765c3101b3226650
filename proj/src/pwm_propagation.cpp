// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// PWM propagators. Each interval is compiled into a short program of
// evolutions under cached Hamiltonians and insertion points ("probes") where
// a pulse edge can move. Propagation skips the probes; the gradient runs the
// same program twice, first storing checkpoints, then evaluating insertions.

#include <algorithm>
#include <cmath>

#include "qoc/propagation.hpp"

namespace qoc {

namespace {

struct Op {
  int slot = 0;
  double t = 0.0;
  int control = -1;  // >= 0 marks an insertion point for that control
};

int sign_of(double w) { return w < 0.0 ? -1 : 1; }

class Program {
 public:
  Program(const SpectralCache& cache, const PwmTrain& train) : cache_(cache), train_(train) {
    const int n = static_cast<int>(train.controls.size());
    free_ = cache.drift_slot();
    if (train.config.layout == Layout::nested) {
      for (int a : {-1, 0, 1}) {
        for (int b : {-1, 0, 1}) nested_[a + 1][b + 1] = cache.slot(std::vector<int>{a, b});
      }
    } else {
      for (int i = 0; i < n; ++i) {
        std::vector<int> p(n, 0);
        p[i] = 1;
        plus_.push_back(cache.slot(p));
        p[i] = -1;
        minus_.push_back(cache.slot(p));
      }
    }
  }

  // The first op is always the leading free segment of the interval.
  void interval(int k, std::vector<Op>& ops) const {
    ops.clear();
    const double tau = train_.tau();
    if (train_.config.layout == Layout::nested) {
      const double wx = train_.controls[0].widths[k];
      const double wy = train_.controls[1].widths[k];
      const bool x_outer = std::abs(wx) >= std::abs(wy);
      const int outer = x_outer ? 0 : 1;
      const int inner = 1 - outer;
      const double wa = x_outer ? wx : wy;
      const double wb = x_outer ? wy : wx;
      const double ta = std::abs(wa);
      const double tb = std::abs(wb);
      int alone[2] = {0, 0};
      int both[2] = {0, 0};
      alone[outer] = sign_of(wa);
      both[outer] = sign_of(wa);
      both[inner] = sign_of(wb);
      const int a_slot = nested_[alone[0] + 1][alone[1] + 1];
      const int ab_slot = nested_[both[0] + 1][both[1] + 1];
      const double tf = 0.5 * (tau - ta);
      const double td = 0.5 * (ta - tb);
      ops.push_back({free_, tf, -1});
      ops.push_back({0, 0.0, outer});
      ops.push_back({a_slot, td, -1});
      ops.push_back({0, 0.0, inner});
      ops.push_back({ab_slot, tb, -1});
      ops.push_back({0, 0.0, inner});
      ops.push_back({a_slot, td, -1});
      ops.push_back({0, 0.0, outer});
      ops.push_back({free_, tf, -1});
      return;
    }
    const int n = static_cast<int>(train_.controls.size());
    const double slot = tau / n;
    for (int i = 0; i < n; ++i) {
      const double w = train_.controls[i].widths[k];
      const double t = std::abs(w);
      const double lead = 0.5 * (slot - t);
      ops.push_back({free_, lead, -1});
      ops.push_back({0, 0.0, i});
      ops.push_back({w < 0.0 ? minus_[i] : plus_[i], t, -1});
      ops.push_back({0, 0.0, i});
      ops.push_back({free_, lead, -1});
    }
  }

 private:
  const SpectralCache& cache_;
  const PwmTrain& train_;
  int free_ = 0;
  int nested_[3][3] = {};
  std::vector<int> plus_;
  std::vector<int> minus_;
};

template <class Probe>
void run(const SpectralCache& cache, const Program& program, FrameState& state, int k_begin,
         int k_end, bool skip_first_lead, Probe&& probe) {
  std::vector<Op> ops;
  for (int k = k_begin; k < k_end; ++k) {
    program.interval(k, ops);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (j == 0 && k == k_begin && skip_first_lead) continue;
      const Op& op = ops[j];
      if (op.control < 0) {
        state.evolve(cache, op.slot, op.t);
      } else {
        probe(k, op.control, state);
      }
    }
  }
}

void check_inputs(const SpectralCache& cache, const PwmTrain& train) {
  train.validate();
  const int n = static_cast<int>(train.controls.size());
  if (cache.control_count() != n) throw Error("spectral cache and train control counts differ");
  for (int i = 0; i < n; ++i) {
    const double a = cache.amplitudes()[i];
    const double b = train.controls[i].eps;
    if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b))) {
      throw Error("spectral cache amplitude differs from the train amplitude of control " +
                  std::to_string(i));
    }
  }
  if (train.config.layout == Layout::interleaved) {
    const auto shifts = interleaved_shifts(train.tau(), n);
    for (int i = 0; i < n; ++i) {
      if (std::abs(train.controls[i].shift - shifts[i]) > 1e-12 * train.tau()) {
        throw Error("interleaved control " + std::to_string(i) + " is not centered in its sub-slot");
      }
    }
  } else {
    for (const auto& c : train.controls) {
      if (c.shift != 0.0) throw Error("centered and nested pulses cannot be shifted");
    }
  }
}

void require_layout(const PwmTrain& train, Layout layout) {
  if (train.config.layout != layout) {
    throw Error(std::string("expected a ") + layout_name(layout) + " train, got " +
                layout_name(train.config.layout));
  }
}

PropagationResult propagate(const SpectralCache& cache, const PwmTrain& train) {
  check_inputs(cache, train);
  const Program program(cache, train);
  FrameState state(cache.dim());
  run(cache, program, state, 0, train.intervals(), false, [](int, int, FrameState&) {});
  return {state.lab(cache), nullptr, 0};
}

GradientResult gradient(const SpectralCache& cache, const PwmTrain& train, const TargetGate& target,
                        const GradientOptions& options) {
  check_inputs(cache, train);
  if (target.dim() != cache.dim()) throw Error("target and Hamiltonian dimensions differ");
  const Program program(cache, train);
  const int m = train.intervals();
  const int n = static_cast<int>(train.controls.size());
  const int stride = options.checkpoint_stride > 0
                         ? options.checkpoint_stride
                         : checkpoint_stride(m, cache.dim(), options.memory_budget);

  // Pass 1: forward product, checkpointing the state at the first insertion
  // point of every stride-th interval. Probes flush so pass 2 replays the
  // exact same operations.
  auto stages = std::make_shared<StageCache>();
  stages->stride = stride;
  stages->checkpoints.reserve((m + stride - 1) / stride);
  FrameState state(cache.dim());
  int last = -1;
  run(cache, program, state, 0, m, false, [&](int k, int, FrameState& s) {
    s.flush(cache);
    if (k != last) {
      last = k;
      if (k % stride == 0) stages->checkpoints.push_back(s);
    }
  });
  const CMatrix U = state.lab(cache);
  const CMatrix z = U.adjoint() * target.matrix();
  const Complex tr = frobenius_inner(target.matrix(), U);

  // Pass 2: replay each segment from its checkpoint and collect insertions.
  std::vector<std::vector<Complex>> acc(n, std::vector<Complex>(m, Complex{}));
  for (int s = 0; s < m; s += stride) {
    FrameState x = stages->checkpoints[s / stride];
    run(cache, program, x, s, std::min(m, s + stride), true,
        [&](int k, int c, FrameState& st) { acc[c][k] += st.insertion(cache, c, z); });
  }

  Complex phi{1.0, 0.0};
  if (options.phase_insensitive && std::abs(tr) > 0.0) phi = std::conj(tr) / std::abs(tr);
  const double d = static_cast<double>(target.dim());
  GradientResult out;
  out.infidelity = infidelity(target, U, options.phase_insensitive);
  out.gradient.assign(n, std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) {
    // dU/dw = (-i/2) eps U_T sum_edges X^dagger H_i X for either sign of w.
    const Complex scale = phi * Complex(0.0, -0.5 * train.controls[i].eps);
    for (int k = 0; k < m; ++k) out.gradient[i][k] = -(scale * acc[i][k]).real() / d;
  }
  out.propagation = {U, std::move(stages), stride};
  return out;
}

}  // namespace

PropagationResult pwm_propagate_1(const SpectralCache& cache, const PwmTrain& train) {
  require_layout(train, Layout::centered);
  return propagate(cache, train);
}

PropagationResult pwm_propagate_2(const SpectralCache& cache, const PwmTrain& train) {
  require_layout(train, Layout::nested);
  return propagate(cache, train);
}

PropagationResult pwm_propagate_interleaved(const SpectralCache& cache, const PwmTrain& train) {
  require_layout(train, Layout::interleaved);
  return propagate(cache, train);
}

PropagationResult pwm_propagate(const SpectralCache& cache, const PwmTrain& train) {
  return propagate(cache, train);
}

GradientResult pwm_gradient_1(const SpectralCache& cache, const PwmTrain& train,
                              const TargetGate& target, const GradientOptions& options) {
  require_layout(train, Layout::centered);
  return gradient(cache, train, target, options);
}

GradientResult pwm_gradient_2(const SpectralCache& cache, const PwmTrain& train,
                              const TargetGate& target, const GradientOptions& options) {
  require_layout(train, Layout::nested);
  return gradient(cache, train, target, options);
}

GradientResult pwm_gradient_interleaved(const SpectralCache& cache, const PwmTrain& train,
                                        const TargetGate& target, const GradientOptions& options) {
  require_layout(train, Layout::interleaved);
  return gradient(cache, train, target, options);
}

GradientResult pwm_gradient(const SpectralCache& cache, const PwmTrain& train,
                            const TargetGate& target, const GradientOptions& options) {
  return gradient(cache, train, target, options);
}

}  // namespace qoc
