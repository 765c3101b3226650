// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/linalg.hpp"

#include <algorithm>
#include <limits>

namespace qoc {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

double hermiticity_error(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(a.norm(), 1.0);
  return (a - a.adjoint()).norm() / scale;
}

double unitarity_error(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

Complex frobenius_inner(const CMatrix& a, const CMatrix& b) {
  return a.conjugate().cwiseProduct(b).sum();
}

}  // namespace qoc
