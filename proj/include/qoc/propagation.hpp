// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Time-ordered propagators U(T, 0) and their derivatives.
//
// Gradients follow from inserting the control operator at the start and end
// of each pulse. With Z = U_T^dagger W and a forward state X at an insertion
// point, tr(W^dagger U_T X^dagger H X) = <X Z, H X>_F, so only forward states
// are needed. The gradient pass keeps checkpoints of the forward states every
// `stride` intervals and recomputes inside each segment.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qoc/pwm.hpp"
#include "qoc/signal.hpp"
#include "qoc/spectral.hpp"
#include "qoc/spin_system.hpp"

namespace qoc {

struct ControlTerm {
  ControlSignal signal;
  HermitianOperator op;
};

/// Forward states U_k at the start of every stride-th interval.
struct StageCache {
  int stride = 1;
  std::vector<FrameState> checkpoints;
};

struct PropagationResult {
  CMatrix U;
  std::shared_ptr<const StageCache> stages;
  int checkpoint_stride = 0;
};

struct GradientOptions {
  /// Memory available for stored forward states.
  std::size_t memory_budget = std::size_t{1} << 30;
  /// Forces a stride when positive.
  int checkpoint_stride = 0;
  /// Use 1 - |tr(W^dagger U)| / d instead of the real part.
  bool phase_insensitive = false;
};

struct GradientResult {
  PropagationResult propagation;
  double infidelity = 0.0;
  /// gradient[i][k] = dIF / dw_i[k] (or dIF / du_i[k] for GRAPE).
  std::vector<std::vector<double>> gradient;
};

/// 1 - Re tr(W^dagger U) / d, or 1 - |tr(W^dagger U)| / d.
double infidelity(const TargetGate& target, const CMatrix& U, bool phase_insensitive = false);

/// Stride 1 when every forward state fits in the budget, otherwise the larger of
/// ceil(sqrt(steps)) and the smallest stride that fits.
int checkpoint_stride(long steps, Eigen::Index dim, std::size_t memory_budget);

/// Midpoint rule: prod_k exp(-i tau (H_0 + sum_i u_i(t_k + tau/2) H_i)), one
/// eigendecomposition per step.
PropagationResult pwc_propagate(const HermitianOperator& h0, std::span<const ControlTerm> controls,
                                double tau, double horizon);

/// Midpoint rule on explicit amplitudes, field(i, k) for control i in step k.
PropagationResult pwc_propagate_field(const HermitianOperator& h0,
                                      std::span<const HermitianOperator> ops,
                                      const Eigen::MatrixXd& field, double tau);

/// Strang splitting with interval-mean controls:
/// prod_k e^{-i H_0 tau/2} e^{-i tau sum_i ubar_i H_i} e^{-i H_0 tau/2}.
PropagationResult spo_propagate(const HermitianOperator& h0, std::span<const ControlTerm> controls,
                                double tau, double horizon);

/// Centered single-control train.
PropagationResult pwm_propagate_1(const SpectralCache& cache, const PwmTrain& train);
/// Nested two-control train; the wider pulse is outer, ties go to control 0.
PropagationResult pwm_propagate_2(const SpectralCache& cache, const PwmTrain& train);
/// Interleaved train, any number of controls.
PropagationResult pwm_propagate_interleaved(const SpectralCache& cache, const PwmTrain& train);
/// Dispatch on the train layout.
PropagationResult pwm_propagate(const SpectralCache& cache, const PwmTrain& train);

GradientResult pwm_gradient_1(const SpectralCache& cache, const PwmTrain& train,
                              const TargetGate& target, const GradientOptions& options = {});
GradientResult pwm_gradient_2(const SpectralCache& cache, const PwmTrain& train,
                              const TargetGate& target, const GradientOptions& options = {});
GradientResult pwm_gradient_interleaved(const SpectralCache& cache, const PwmTrain& train,
                                        const TargetGate& target,
                                        const GradientOptions& options = {});
GradientResult pwm_gradient(const SpectralCache& cache, const PwmTrain& train,
                            const TargetGate& target, const GradientOptions& options = {});

/// First-order GRAPE gradient of the midpoint-rule propagator:
/// dIF/du_i[k] = -(1/d) Re tr(W^dagger U_{M..k+1} (-i tau H_i) U_{k..1}).
GradientResult grape_gradient(const HermitianOperator& h0, std::span<const HermitianOperator> ops,
                              const Eigen::MatrixXd& field, double tau, const TargetGate& target,
                              const GradientOptions& options = {});

}  // namespace qoc
