// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cached eigendecompositions of the on/off Hamiltonians of a PWM train.
//
// Every segment of a PWM propagator is exp(-i H t) for one of a handful of
// fixed Hamiltonians H = H_0 + sum_i s_i eps_i H_i with s_i in {-1, 0, +1}.
// Diagonalizing them once turns each segment into a diagonal phase in the
// right eigenbasis. FrameState keeps the running propagator expressed in the
// eigenbasis of the last applied Hamiltonian, so switching Hamiltonians costs
// one product with the precomputed transition D_to^dagger D_from.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qoc/pwm.hpp"
#include "qoc/spin_system.hpp"

namespace qoc {

struct SpectralDecomposition {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors;
  std::string source;
};

/// Ascending eigenvalues; each eigenvector's first component above 1e-10 in
/// magnitude is made real and positive. Throws NumericalError when the input
/// is not Hermitian to 1e-10 relative or the reconstruction residual exceeds
/// 1e-10 ||H||_F.
SpectralDecomposition eigendecompose(const HermitianOperator& h, std::string source = {});

/// D diag(exp(-i lambda t)) D^dagger.
CMatrix expm_spectral(const SpectralDecomposition& spec, double t);

/// Decomposition without the residual check, for per-step use in the PWC and
/// reference integrators.
SpectralDecomposition eigendecompose_fast(const CMatrix& h);

class SpectralCache {
 public:
  /// Base-3 code of a sign pattern: sum_i (s_i + 1) 3^i.
  static int sign_code(std::span<const int> signs);

  /// All Hamiltonians a train with the given layout can switch between:
  /// centered 3 entries, interleaved 1 + 2n, nested 9.
  SpectralCache(const HermitianOperator& drift, std::vector<HermitianOperator> controls,
                std::vector<double> amplitudes, Layout layout);

  /// Cache matching the amplitudes and layout of `train`.
  static SpectralCache for_train(const HermitianOperator& drift,
                                 std::vector<HermitianOperator> controls, const PwmTrain& train);

  /// Explicit sign patterns; the all-zero pattern is always included.
  SpectralCache(const HermitianOperator& drift, std::vector<HermitianOperator> controls,
                std::vector<double> amplitudes, const std::vector<std::vector<int>>& patterns);

  Eigen::Index dim() const { return dim_; }
  int control_count() const { return static_cast<int>(controls_.size()); }
  const std::vector<double>& amplitudes() const { return amplitudes_; }
  const HermitianOperator& control(int i) const { return controls_.at(i); }
  int size() const { return static_cast<int>(entries_.size()); }

  bool contains(std::span<const int> signs) const;
  /// Entry index of a sign pattern; throws when the pattern was not cached.
  int slot(std::span<const int> signs) const;
  int drift_slot() const { return drift_slot_; }

  const SpectralDecomposition& spectrum(int slot) const { return entries_[slot]; }
  /// D_to^dagger D_from.
  const CMatrix& transition(int to, int from) const { return transitions_[to * size() + from]; }
  /// D_slot^dagger H_i D_slot.
  const CMatrix& control_in_basis(int slot, int i) const {
    return controls_in_basis_[slot * control_count() + i];
  }

 private:
  void build(const HermitianOperator& drift, const std::vector<std::vector<int>>& patterns);

  Eigen::Index dim_ = 0;
  std::vector<HermitianOperator> controls_;
  std::vector<double> amplitudes_;
  std::vector<int> slot_of_code_;
  std::vector<SpectralDecomposition> entries_;
  std::vector<CMatrix> transitions_;
  std::vector<CMatrix> controls_in_basis_;
  int drift_slot_ = 0;
};

/// Running propagator X = D_b^dagger U, where b is the basis of the last
/// Hamiltonian applied (or the lab frame). Consecutive evolutions under the same
/// Hamiltonian are merged into one phase update.
class FrameState {
 public:
  static constexpr int kLab = -1;

  FrameState() = default;
  explicit FrameState(Eigen::Index dim);
  // Copies carry the state only, not the scratch buffers.
  FrameState(const FrameState& other);
  FrameState& operator=(const FrameState& other);
  FrameState(FrameState&&) noexcept = default;
  FrameState& operator=(FrameState&&) noexcept = default;

  /// exp(-i H_slot t) from the left. Zero durations are skipped.
  void evolve(const SpectralCache& cache, int slot, double t);
  /// exp(-i H t) for a one-off decomposition, applied in the lab frame.
  void evolve(const SpectralDecomposition& spec, double t);

  void flush(const SpectralCache& cache);
  /// Flush and rotate back to the lab frame.
  void to_lab(const SpectralCache& cache);
  /// Propagator in the lab frame (flushes pending evolution).
  CMatrix lab(const SpectralCache& cache);
  CMatrix lab() const;

  /// tr(W^dagger U_T X^dagger H_i X) for the current (flushed) X, given
  /// Z = U_T^dagger W.
  Complex insertion(const SpectralCache& cache, int control, const CMatrix& z);
  /// Same with an explicit lab-frame operator; requires the lab frame.
  Complex insertion(const CMatrix& h, const CMatrix& z);

  int basis() const { return basis_; }
  bool pending() const { return pending_slot_ >= 0; }
  const CMatrix& matrix() const { return x_; }

 private:
  CMatrix x_;
  CMatrix scratch_;
  CMatrix scratch2_;
  CVector phases_;
  int basis_ = kLab;
  bool identity_ = true;
  int pending_slot_ = -1;
  double pending_t_ = 0.0;
};

}  // namespace qoc
