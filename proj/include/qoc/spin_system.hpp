// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Homonuclear spin-1/2 systems: drift and control Hamiltonians built from a
// table of chemical shifts and scalar couplings, plus the target gates used
// by the optimizer.
//
// Units: hbar = 1. Table values are in Hz and are multiplied by 2*pi when the
// Hamiltonians are assembled, so every operator is in rad/s and every time is
// in seconds.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "qoc/linalg.hpp"

namespace qoc {

enum class Axis { x, y, z };

Axis parse_axis(const std::string& name);
const char* axis_name(Axis axis);

/// Default control amplitude bound: 2 MHz expressed in rad/s.
inline constexpr double kDefaultControlBound = kTwoPi * 2.0e6;

/// Dense Hermitian matrix (checked on construction to 1e-12 relative).
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(CMatrix entries);

  const CMatrix& matrix() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  CMatrix entries_;
};

/// Dense unitary matrix (checked on construction: ||W^dagger W - I||_F <= 1e-12).
class TargetGate {
 public:
  TargetGate() = default;
  explicit TargetGate(CMatrix entries);

  const CMatrix& matrix() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

 private:
  CMatrix entries_;
};

/// Chemical shifts and J couplings in Hz, plus the control amplitude bound in
/// rad/s. Couplings are stored lower-triangular, row k holding J_{jk} for
/// j < k, which mirrors the on-disk table layout.
struct SpinSystem {
  std::vector<double> shift_hz;
  std::vector<std::vector<double>> coupling_hz;
  double eps = kDefaultControlBound;

  int size() const { return static_cast<int>(shift_hz.size()); }
  Eigen::Index dim() const { return Eigen::Index{1} << size(); }

  /// J_{jk} in Hz for 1-based spin indices j != k.
  double coupling(int j, int k) const;

  /// Keep the first m spins and their mutual couplings.
  SpinSystem leading(int m) const;

  /// Throws ParseError when the invariants do not hold.
  void validate() const;

  bool operator==(const SpinSystem&) const = default;
};

/// The six carbon spins of D-Norleucine.
SpinSystem d_norleucine(double eps = kDefaultControlBound);

/// (1/2) I^{k-1} (x) sigma_axis (x) I^{m-k}, with 1-based k.
HermitianOperator spin_operator(int k, Axis axis, int m);

/// H_0 = sum_k 2 pi shift_k S_z^k + 2 pi sum_{j<k} J_jk (S^j . S^k).
HermitianOperator build_drift(const SpinSystem& sys);

/// H_axis = -eps sum_k S_axis^k.
HermitianOperator build_control(const SpinSystem& sys, Axis axis);

/// The unit-amplitude control generator -sum_k S_axis^k. The optimizer pairs it
/// with a physical amplitude u(t) in rad/s bounded by sys.eps, which is the
/// same Hamiltonian as build_control with a dimensionless |u| <= 1.
HermitianOperator control_generator(int m, Axis axis);

/// Parse the lower-triangular CSV table: row k has k comma-separated numbers,
/// the diagonal is the shift and the rest are couplings. Errors name the
/// offending row and column (1-based).
SpinSystem load_spin_table(std::istream& in, double eps = kDefaultControlBound);

/// Either a file path or the name of a bundled dataset ("d-norleucine").
SpinSystem load_spin_table(const std::string& source, double eps = kDefaultControlBound);

void write_spin_table(std::ostream& out, const SpinSystem& sys);

struct RotationGate {
  Axis axis = Axis::x;
  double angle = 0.0;
  int spin = 1;
};

struct CnotGate {
  int control = 1;
  int target = 2;
};

using GateSpec = std::variant<RotationGate, CnotGate>;

/// exp(-i angle S_axis) on one spin, or CNOT on a spin pair, with the identity
/// on every other spin.
TargetGate make_target(const GateSpec& kind, int m);

}  // namespace qoc
