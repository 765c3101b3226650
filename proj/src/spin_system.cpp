// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qoc/spin_system.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qoc {

namespace {

CMatrix pauli(Axis axis) {
  CMatrix p(2, 2);
  switch (axis) {
    case Axis::x:
      p << 0, 1, 1, 0;
      break;
    case Axis::y:
      p << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case Axis::z:
      p << 1, 0, 0, -1;
      break;
  }
  return p;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Axis parse_axis(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw ParseError("unknown axis '" + name + "'");
}

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::x:
      return "x";
    case Axis::y:
      return "y";
    case Axis::z:
      return "z";
  }
  return "?";
}

HermitianOperator::HermitianOperator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw NumericalError("operator is not square");
  if (hermiticity_error(entries_) > 1e-12) throw NumericalError("operator is not Hermitian");
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  return HermitianOperator(entries_ + other.entries_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  return HermitianOperator(entries_ - other.entries_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(entries_ * scale);
}

TargetGate::TargetGate(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw NumericalError("target gate is not square");
  if (unitarity_error(entries_) > 1e-12) throw NumericalError("target gate is not unitary");
}

double SpinSystem::coupling(int j, int k) const {
  if (j == k || j < 1 || k < 1 || j > size() || k > size()) {
    throw std::out_of_range("coupling index out of range");
  }
  if (j > k) std::swap(j, k);
  return coupling_hz[k - 1][j - 1];
}

SpinSystem SpinSystem::leading(int m) const {
  if (m < 1 || m > size()) throw std::out_of_range("spin count out of range");
  SpinSystem out;
  out.eps = eps;
  out.shift_hz.assign(shift_hz.begin(), shift_hz.begin() + m);
  out.coupling_hz.assign(coupling_hz.begin(), coupling_hz.begin() + m);
  return out;
}

void SpinSystem::validate() const {
  if (size() < 1) throw ParseError("spin system needs at least one spin");
  if (static_cast<int>(coupling_hz.size()) != size()) {
    throw ParseError("coupling table must have one row per spin");
  }
  for (int k = 0; k < size(); ++k) {
    if (!std::isfinite(shift_hz[k])) throw ParseError("non-finite chemical shift");
    if (static_cast<int>(coupling_hz[k].size()) != k) {
      throw ParseError("coupling row " + std::to_string(k + 1) + " must have " +
                       std::to_string(k) + " entries");
    }
    for (double j : coupling_hz[k]) {
      if (!std::isfinite(j)) throw ParseError("non-finite coupling");
    }
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParseError("control bound must be positive");
}

SpinSystem d_norleucine(double eps) {
  SpinSystem sys;
  sys.eps = eps;
  sys.shift_hz = {17662.0, 5382.4, 4006.7, 2435.8, 2216.6, 2105.8};
  sys.coupling_hz = {
      {},
      {53.9},
      {0.8, 33.96},
      {2.47, 0.0, 33.96},
      {0.0, 3.03, 0.0, 34.73},
      {0.0, 2.42, 0.0, 34.93, 0.0},
  };
  return sys;
}

HermitianOperator spin_operator(int k, Axis axis, int m) {
  if (m < 1) throw std::out_of_range("spin count must be positive");
  if (k < 1 || k > m) throw std::out_of_range("spin index out of range");
  const Eigen::Index left = Eigen::Index{1} << (k - 1);
  const Eigen::Index right = Eigen::Index{1} << (m - k);
  CMatrix op = kron(kron(CMatrix::Identity(left, left), 0.5 * pauli(axis)),
                    CMatrix::Identity(right, right));
  return HermitianOperator(std::move(op));
}

HermitianOperator build_drift(const SpinSystem& sys) {
  sys.validate();
  const int m = sys.size();
  const Eigen::Index d = sys.dim();
  std::vector<std::array<CMatrix, 3>> s(m);
  for (int k = 0; k < m; ++k) {
    s[k] = {spin_operator(k + 1, Axis::x, m).matrix(), spin_operator(k + 1, Axis::y, m).matrix(),
            spin_operator(k + 1, Axis::z, m).matrix()};
  }
  CMatrix h = CMatrix::Zero(d, d);
  for (int k = 0; k < m; ++k) h += kTwoPi * sys.shift_hz[k] * s[k][2];
  for (int k = 1; k < m; ++k) {
    for (int j = 0; j < k; ++j) {
      const double jc = sys.coupling_hz[k][j];
      if (jc == 0.0) continue;
      h += kTwoPi * jc * (s[j][0] * s[k][0] + s[j][1] * s[k][1] + s[j][2] * s[k][2]);
    }
  }
  // Products of commuting Hermitian factors are Hermitian only up to rounding.
  h = 0.5 * (h + h.adjoint()).eval();
  return HermitianOperator(std::move(h));
}

HermitianOperator control_generator(int m, Axis axis) {
  CMatrix h = CMatrix::Zero(Eigen::Index{1} << m, Eigen::Index{1} << m);
  for (int k = 1; k <= m; ++k) h -= spin_operator(k, axis, m).matrix();
  return HermitianOperator(std::move(h));
}

HermitianOperator build_control(const SpinSystem& sys, Axis axis) {
  sys.validate();
  return control_generator(sys.size(), axis) * sys.eps;
}

SpinSystem load_spin_table(std::istream& in, double eps) {
  SpinSystem sys;
  sys.eps = eps;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    ++row;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      cell = trim(cell);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size()) {
        throw ParseError("spin table row " + std::to_string(row) + ", column " +
                         std::to_string(col) + ": '" + cell + "' is not a number");
      }
      values.push_back(v);
    }
    if (static_cast<int>(values.size()) != row) {
      throw ParseError("spin table row " + std::to_string(row) + " has " +
                       std::to_string(values.size()) + " entries, expected " +
                       std::to_string(row));
    }
    sys.shift_hz.push_back(values.back());
    values.pop_back();
    sys.coupling_hz.push_back(std::move(values));
  }
  if (row == 0) throw ParseError("spin table is empty");
  sys.validate();
  return sys;
}

SpinSystem load_spin_table(const std::string& source, double eps) {
  if (source == "d-norleucine") return d_norleucine(eps);
  std::ifstream in(source);
  if (!in) throw ParseError("cannot open spin table '" + source + "'");
  return load_spin_table(in, eps);
}

void write_spin_table(std::ostream& out, const SpinSystem& sys) {
  sys.validate();
  const auto old_precision = out.precision(17);
  for (int k = 0; k < sys.size(); ++k) {
    for (double j : sys.coupling_hz[k]) out << j << ',';
    out << sys.shift_hz[k] << '\n';
  }
  out.precision(old_precision);
}

TargetGate make_target(const GateSpec& kind, int m) {
  if (m < 1) throw std::out_of_range("spin count must be positive");
  const Eigen::Index d = Eigen::Index{1} << m;
  return std::visit(
      [&](const auto& gate) -> TargetGate {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, RotationGate>) {
          if (gate.spin < 1 || gate.spin > m) throw std::out_of_range("rotation spin out of range");
          // exp(-i a sigma/2) = cos(a/2) I - i sin(a/2) sigma, exact for Pauli sigma.
          const double c = std::cos(gate.angle / 2.0);
          const double s = std::sin(gate.angle / 2.0);
          const CMatrix local = c * CMatrix::Identity(2, 2) - Complex(0, s) * pauli(gate.axis);
          const Eigen::Index left = Eigen::Index{1} << (gate.spin - 1);
          const Eigen::Index right = Eigen::Index{1} << (m - gate.spin);
          return TargetGate(kron(kron(CMatrix::Identity(left, left), local),
                                 CMatrix::Identity(right, right)));
        } else {
          if (gate.control < 1 || gate.control > m || gate.target < 1 || gate.target > m ||
              gate.control == gate.target) {
            throw std::out_of_range("CNOT spin indices out of range");
          }
          const Eigen::Index cbit = Eigen::Index{1} << (m - gate.control);
          const Eigen::Index tbit = Eigen::Index{1} << (m - gate.target);
          CMatrix w = CMatrix::Zero(d, d);
          for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index j = (i & cbit) ? (i ^ tbit) : i;
            w(j, i) = 1.0;
          }
          return TargetGate(std::move(w));
        }
      },
      kind);
}

}  // namespace qoc
