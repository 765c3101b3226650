// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "qoc/propagation.hpp"

namespace qoc {

namespace {

long step_count(double tau, double horizon) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("step length tau must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error("horizon T must be positive");
  const double n = std::round(horizon / tau);
  if (n < 1.0 || std::abs(n * tau - horizon) > 1e-9 * horizon) {
    throw Error("horizon T must be an integer multiple of tau");
  }
  return static_cast<long>(n);
}

void check_controls(const HermitianOperator& h0, std::span<const ControlTerm> controls,
                    double horizon) {
  for (const auto& c : controls) {
    if (c.op.dim() != h0.dim()) throw Error("control dimension does not match the drift");
    if (!c.signal.covers(0.0, horizon)) throw Error("signal domain shorter than the horizon T");
  }
}

// Weight phi with dIF = -(1/d) Re(phi * d tr(W^dagger U)).
Complex trace_weight(Complex tr, bool phase_insensitive) {
  if (!phase_insensitive) return {1.0, 0.0};
  const double mag = std::abs(tr);
  return mag > 0.0 ? std::conj(tr) / mag : Complex{1.0, 0.0};
}

CMatrix step_hamiltonian(const HermitianOperator& h0, std::span<const HermitianOperator> ops,
                         const Eigen::MatrixXd& field, long k) {
  CMatrix h = h0.matrix();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double u = field(static_cast<Eigen::Index>(i), k);
    if (u != 0.0) h += u * ops[i].matrix();
  }
  return h;
}

}  // namespace

double infidelity(const TargetGate& target, const CMatrix& U, bool phase_insensitive) {
  if (U.rows() != target.dim() || U.cols() != target.dim()) {
    throw Error("propagator and target dimensions differ");
  }
  const Complex tr = frobenius_inner(target.matrix(), U);
  const double d = static_cast<double>(target.dim());
  return 1.0 - (phase_insensitive ? std::abs(tr) : tr.real()) / d;
}

int checkpoint_stride(long steps, Eigen::Index dim, std::size_t memory_budget) {
  if (steps < 1) return 1;
  const double bytes = static_cast<double>(dim) * static_cast<double>(dim) * 16.0;
  if (static_cast<double>(steps) * bytes <= static_cast<double>(memory_budget)) return 1;
  const double by_budget =
      memory_budget > 0 ? std::ceil(steps * bytes / static_cast<double>(memory_budget))
                        : static_cast<double>(steps);
  const double by_sqrt = std::ceil(std::sqrt(static_cast<double>(steps)));
  return static_cast<int>(std::min<double>(steps, std::max(by_budget, by_sqrt)));
}

PropagationResult pwc_propagate(const HermitianOperator& h0, std::span<const ControlTerm> controls,
                                double tau, double horizon) {
  const long n = step_count(tau, horizon);
  check_controls(h0, controls, horizon);
  FrameState state(h0.dim());
  for (long k = 0; k < n; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * tau;
    CMatrix h = h0.matrix();
    for (const auto& c : controls) h += c.signal(t_mid) * c.op.matrix();
    state.evolve(eigendecompose_fast(h), tau);
  }
  return {state.lab(), nullptr, 0};
}

PropagationResult pwc_propagate_field(const HermitianOperator& h0,
                                      std::span<const HermitianOperator> ops,
                                      const Eigen::MatrixXd& field, double tau) {
  if (field.rows() != static_cast<Eigen::Index>(ops.size())) {
    throw Error("field needs one row per control operator");
  }
  if (!(tau > 0.0)) throw Error("step length tau must be positive");
  FrameState state(h0.dim());
  for (Eigen::Index k = 0; k < field.cols(); ++k) {
    state.evolve(eigendecompose_fast(step_hamiltonian(h0, ops, field, k)), tau);
  }
  return {state.lab(), nullptr, 0};
}

PropagationResult spo_propagate(const HermitianOperator& h0, std::span<const ControlTerm> controls,
                                double tau, double horizon) {
  const long n = step_count(tau, horizon);
  check_controls(h0, controls, horizon);
  // Slot 1 holds H_0; with one control slot 2 holds its operator, so every
  // factor is a phase in a cached eigenbasis.
  const HermitianOperator zero(CMatrix::Zero(h0.dim(), h0.dim()));
  std::vector<HermitianOperator> parts{h0};
  std::vector<std::vector<int>> patterns{{1, 0}};
  if (controls.size() == 1) {
    parts.push_back(controls[0].op);
    patterns.push_back({0, 1});
  } else {
    parts.push_back(zero);
  }
  const SpectralCache cache(zero, parts, {1.0, 1.0}, patterns);
  const int drift = cache.slot(std::vector<int>{1, 0});

  FrameState state(h0.dim());
  for (long k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * tau;
    const double b = static_cast<double>(k + 1) * tau;
    state.evolve(cache, drift, 0.5 * tau);
    if (controls.size() == 1) {
      const double ubar = controls[0].signal.integral(a, b) / tau;
      state.evolve(cache, cache.slot(std::vector<int>{0, 1}), ubar * tau);
    } else if (!controls.empty()) {
      CMatrix hc = CMatrix::Zero(h0.dim(), h0.dim());
      for (const auto& c : controls) hc += (c.signal.integral(a, b) / tau) * c.op.matrix();
      state.to_lab(cache);
      state.evolve(eigendecompose_fast(hc), tau);
    }
    state.evolve(cache, drift, 0.5 * tau);
  }
  return {state.lab(cache), nullptr, 0};
}

GradientResult grape_gradient(const HermitianOperator& h0, std::span<const HermitianOperator> ops,
                              const Eigen::MatrixXd& field, double tau, const TargetGate& target,
                              const GradientOptions& options) {
  const int n = static_cast<int>(ops.size());
  if (field.rows() != n) throw Error("field needs one row per control operator");
  if (target.dim() != h0.dim()) throw Error("target and drift dimensions differ");
  const long m = field.cols();
  const int stride = options.checkpoint_stride > 0
                         ? options.checkpoint_stride
                         : checkpoint_stride(m, h0.dim(), options.memory_budget);

  // Pass 1: states before every stride-th step (after each step when stride 1).
  auto stages = std::make_shared<StageCache>();
  stages->stride = stride;
  FrameState state(h0.dim());
  for (long k = 0; k < m; ++k) {
    if (stride > 1 && k % stride == 0) stages->checkpoints.push_back(state);
    state.evolve(eigendecompose_fast(step_hamiltonian(h0, ops, field, k)), tau);
    if (stride == 1) stages->checkpoints.push_back(state);
  }
  const CMatrix U = state.lab();
  const CMatrix z = U.adjoint() * target.matrix();
  const Complex tr = frobenius_inner(target.matrix(), U);
  const Complex phi = trace_weight(tr, options.phase_insensitive);
  const double d = static_cast<double>(target.dim());

  GradientResult out;
  out.infidelity = infidelity(target, U, options.phase_insensitive);
  out.gradient.assign(n, std::vector<double>(m, 0.0));
  // d tr / du_i[k] = -i tau <X Z, H_i X> with X the state after step k.
  auto record = [&](FrameState& x, long k) {
    for (int i = 0; i < n; ++i) {
      const Complex c = x.insertion(ops[i].matrix(), z);
      out.gradient[i][k] = -(phi * Complex(0.0, -tau) * c).real() / d;
    }
  };
  if (stride == 1) {
    for (long k = 0; k < m; ++k) record(stages->checkpoints[k], k);
  } else {
    for (long s = 0; s < m; s += stride) {
      FrameState x = stages->checkpoints[s / stride];
      for (long k = s; k < std::min(m, s + stride); ++k) {
        x.evolve(eigendecompose_fast(step_hamiltonian(h0, ops, field, k)), tau);
        record(x, k);
      }
    }
  }
  out.propagation = {U, std::move(stages), stride};
  return out;
}

}  // namespace qoc
