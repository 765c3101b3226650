// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qoc {

namespace {

constexpr double kPhaseThreshold = 1e-10;

void normalize_phases(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double mag = std::abs(v(i, j));
      if (mag > kPhaseThreshold) {
        v.col(j) *= std::conj(v(i, j)) / mag;
        v(i, j) = Complex(mag, 0.0);
        break;
      }
    }
  }
}

// One Newton-Schulz step toward the unitary polar factor. Rounding in the
// eigensolver leaves ||V'V - I|| near d * 1e-16; long products of such
// factors drift off the unitary group linearly in the step count.
void polish_unitary(CMatrix& v) {
  const CMatrix g = v.adjoint() * v;
  v = v * (1.5 * CMatrix::Identity(v.cols(), v.cols()) - 0.5 * g);
}

std::vector<std::vector<int>> layout_patterns(Layout layout, int controls) {
  std::vector<std::vector<int>> patterns;
  switch (layout) {
    case Layout::centered:
    case Layout::interleaved:
      for (int i = 0; i < controls; ++i) {
        for (int s : {1, -1}) {
          std::vector<int> p(controls, 0);
          p[i] = s;
          patterns.push_back(std::move(p));
        }
      }
      break;
    case Layout::nested:
      if (controls != 2) throw Error("nested layout carries exactly two controls");
      for (int a : {-1, 0, 1}) {
        for (int b : {-1, 0, 1}) patterns.push_back({a, b});
      }
      break;
  }
  return patterns;
}

}  // namespace

SpectralDecomposition eigendecompose_fast(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors(), {}};
  polish_unitary(out.eigenvectors);
  normalize_phases(out.eigenvectors);
  return out;
}

SpectralDecomposition eigendecompose(const HermitianOperator& h, std::string source) {
  const CMatrix& m = h.matrix();
  if (hermiticity_error(m) > 1e-10) throw NumericalError("matrix is not Hermitian: " + source);
  auto out = eigendecompose_fast(m);
  out.source = std::move(source);
  const CMatrix rebuilt = out.eigenvectors * out.eigenvalues.cast<Complex>().asDiagonal() *
                          out.eigenvectors.adjoint();
  if ((rebuilt - m).norm() > 1e-10 * std::max(m.norm(), 1.0)) {
    throw NumericalError("eigendecomposition residual too large: " + out.source);
  }
  return out;
}

CMatrix expm_spectral(const SpectralDecomposition& spec, double t) {
  const CVector phases = (spec.eigenvalues * (-t)).unaryExpr([](double x) {
    return std::polar(1.0, x);
  });
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

int SpectralCache::sign_code(std::span<const int> signs) {
  int code = 0;
  int base = 1;
  for (int s : signs) {
    if (s < -1 || s > 1) throw Error("sign pattern entries must be -1, 0 or 1");
    code += (s + 1) * base;
    base *= 3;
  }
  return code;
}

SpectralCache::SpectralCache(const HermitianOperator& drift, std::vector<HermitianOperator> controls,
                             std::vector<double> amplitudes, Layout layout)
    : controls_(std::move(controls)), amplitudes_(std::move(amplitudes)) {
  build(drift, layout_patterns(layout, control_count()));
}

SpectralCache::SpectralCache(const HermitianOperator& drift, std::vector<HermitianOperator> controls,
                             std::vector<double> amplitudes,
                             const std::vector<std::vector<int>>& patterns)
    : controls_(std::move(controls)), amplitudes_(std::move(amplitudes)) {
  build(drift, patterns);
}

SpectralCache SpectralCache::for_train(const HermitianOperator& drift,
                                       std::vector<HermitianOperator> controls,
                                       const PwmTrain& train) {
  std::vector<double> eps;
  for (const auto& c : train.controls) eps.push_back(c.eps);
  return SpectralCache(drift, std::move(controls), std::move(eps), train.config.layout);
}

void SpectralCache::build(const HermitianOperator& drift,
                          const std::vector<std::vector<int>>& patterns) {
  const int n = control_count();
  if (n < 1 || n > 12) throw Error("spectral cache supports 1 to 12 controls");
  if (static_cast<int>(amplitudes_.size()) != n) throw Error("one amplitude per control is required");
  dim_ = drift.dim();
  for (const auto& c : controls_) {
    if (c.dim() != dim_) throw Error("control dimension does not match the drift");
  }
  int codes = 1;
  for (int i = 0; i < n; ++i) codes *= 3;
  slot_of_code_.assign(codes, -1);

  std::vector<std::vector<int>> all{std::vector<int>(n, 0)};
  all.insert(all.end(), patterns.begin(), patterns.end());
  for (const auto& p : all) {
    if (static_cast<int>(p.size()) != n) throw Error("sign pattern length must match control count");
    const int code = sign_code(p);
    if (slot_of_code_[code] >= 0) continue;
    CMatrix h = drift.matrix();
    std::string name = "H0";
    for (int i = 0; i < n; ++i) {
      if (p[i] == 0) continue;
      h += (p[i] * amplitudes_[i]) * controls_[i].matrix();
      name += (p[i] > 0 ? "+" : "-") + std::string("eps") + std::to_string(i) + "*H" + std::to_string(i);
    }
    slot_of_code_[code] = static_cast<int>(entries_.size());
    entries_.push_back(eigendecompose(HermitianOperator(std::move(h)), std::move(name)));
  }
  drift_slot_ = slot_of_code_[sign_code(all.front())];

  const int s = size();
  transitions_.resize(static_cast<std::size_t>(s) * s);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      transitions_[a * s + b].noalias() = entries_[a].eigenvectors.adjoint() * entries_[b].eigenvectors;
      polish_unitary(transitions_[a * s + b]);
    }
  }
  controls_in_basis_.resize(static_cast<std::size_t>(s) * n);
  for (int a = 0; a < s; ++a) {
    const CMatrix& d = entries_[a].eigenvectors;
    for (int i = 0; i < n; ++i) {
      controls_in_basis_[a * n + i] = d.adjoint() * controls_[i].matrix() * d;
    }
  }
}

bool SpectralCache::contains(std::span<const int> signs) const {
  if (static_cast<int>(signs.size()) != control_count()) return false;
  return slot_of_code_[sign_code(signs)] >= 0;
}

int SpectralCache::slot(std::span<const int> signs) const {
  if (static_cast<int>(signs.size()) != control_count()) {
    throw Error("sign pattern length must match control count");
  }
  const int s = slot_of_code_[sign_code(signs)];
  if (s < 0) throw Error("sign pattern is not in the spectral cache");
  return s;
}

FrameState::FrameState(Eigen::Index dim) : x_(CMatrix::Identity(dim, dim)), phases_(dim) {}

FrameState::FrameState(const FrameState& other)
    : x_(other.x_),
      phases_(other.phases_.size()),
      basis_(other.basis_),
      identity_(other.identity_),
      pending_slot_(other.pending_slot_),
      pending_t_(other.pending_t_) {}

FrameState& FrameState::operator=(const FrameState& other) {
  if (this != &other) {
    x_ = other.x_;
    phases_.resize(other.phases_.size());
    basis_ = other.basis_;
    identity_ = other.identity_;
    pending_slot_ = other.pending_slot_;
    pending_t_ = other.pending_t_;
  }
  return *this;
}

void FrameState::evolve(const SpectralCache& cache, int slot, double t) {
  if (t == 0.0) return;
  if (pending_slot_ == slot) {
    pending_t_ += t;
    return;
  }
  flush(cache);
  pending_slot_ = slot;
  pending_t_ = t;
}

void FrameState::flush(const SpectralCache& cache) {
  if (pending_slot_ < 0) return;
  const int slot = pending_slot_;
  const auto& spec = cache.spectrum(slot);
  pending_slot_ = -1;
  if (basis_ != slot) {
    if (identity_) {
      x_ = spec.eigenvectors.adjoint();
    } else if (basis_ == kLab) {
      scratch_.noalias() = spec.eigenvectors.adjoint() * x_;
      x_.swap(scratch_);
    } else {
      scratch_.noalias() = cache.transition(slot, basis_) * x_;
      x_.swap(scratch_);
    }
    basis_ = slot;
  }
  for (Eigen::Index i = 0; i < phases_.size(); ++i) {
    phases_[i] = std::polar(1.0, -spec.eigenvalues[i] * pending_t_);
  }
  x_ = phases_.asDiagonal() * x_;
  identity_ = false;
}

void FrameState::to_lab(const SpectralCache& cache) {
  flush(cache);
  if (basis_ == kLab) return;
  scratch_.noalias() = cache.spectrum(basis_).eigenvectors * x_;
  x_.swap(scratch_);
  basis_ = kLab;
}

void FrameState::evolve(const SpectralDecomposition& spec, double t) {
  if (pending_slot_ >= 0) throw Error("flush cached evolution before a one-off step");
  if (basis_ != kLab) throw Error("one-off steps need the lab frame");
  if (t == 0.0) return;
  for (Eigen::Index i = 0; i < phases_.size(); ++i) {
    phases_[i] = std::polar(1.0, -spec.eigenvalues[i] * t);
  }
  if (identity_) {
    x_.noalias() = spec.eigenvectors * phases_.asDiagonal() * spec.eigenvectors.adjoint();
  } else {
    scratch_.noalias() = spec.eigenvectors.adjoint() * x_;
    scratch2_ = phases_.asDiagonal() * scratch_;
    x_.noalias() = spec.eigenvectors * scratch2_;
  }
  identity_ = false;
}

CMatrix FrameState::lab(const SpectralCache& cache) {
  flush(cache);
  if (basis_ == kLab) return x_;
  return cache.spectrum(basis_).eigenvectors * x_;
}

CMatrix FrameState::lab() const {
  if (pending_slot_ >= 0 || basis_ != kLab) throw Error("state is not in the lab frame");
  return x_;
}

Complex FrameState::insertion(const SpectralCache& cache, int control, const CMatrix& z) {
  flush(cache);
  if (basis_ == kLab) return insertion(cache.control(control).matrix(), z);
  // X = D^dagger U, so U^dagger H U = X^dagger (D^dagger H D) X. The right
  // factor of X stays in the lab frame, matching Z.
  scratch_.noalias() = x_ * z;
  scratch2_.noalias() = cache.control_in_basis(basis_, control) * x_;
  return scratch_.conjugate().cwiseProduct(scratch2_).sum();
}

Complex FrameState::insertion(const CMatrix& h, const CMatrix& z) {
  if (pending_slot_ >= 0 || basis_ != kLab) throw Error("lab-frame insertion needs the lab frame");
  scratch_.noalias() = x_ * z;
  scratch2_.noalias() = h * x_;
  return scratch_.conjugate().cwiseProduct(scratch2_).sum();
}

}  // namespace qoc
