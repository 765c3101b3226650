// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra shared by every module. All operators are
// small (dimension 2^m with m <= 6), so plain dense Eigen storage is used.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qoc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A signal whose per-interval area cannot be carried by the pulse amplitude.
class BoundError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed decompositions, violated numerical invariants.
class NumericalError : public Error {
 public:
  using Error::Error;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// ||A - A^dagger||_F / max(||A||_F, 1).
double hermiticity_error(const CMatrix& a);

/// ||U^dagger U - I||_F.
double unitarity_error(const CMatrix& u);

/// Frobenius inner product tr(A^dagger B).
Complex frobenius_inner(const CMatrix& a, const CMatrix& b);

}  // namespace qoc
