// Copyright (c) 2026, The qoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

namespace qoc {
namespace {

const Complex kI(0.0, 1.0);

double dist(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

RVector sorted_eigenvalues(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  return es.eigenvalues();
}

TEST(SpinOperator, SingleSpinZ) {
  CMatrix want = CMatrix::Zero(2, 2);
  want(0, 0) = 0.5;
  want(1, 1) = -0.5;
  EXPECT_EQ(spin_operator(1, Axis::z, 1).matrix(), want);
}

TEST(SpinOperator, SecondSpinZ) {
  CMatrix want = CMatrix::Zero(4, 4);
  want.diagonal() << 0.5, -0.5, 0.5, -0.5;
  EXPECT_EQ(spin_operator(2, Axis::z, 2).matrix(), want);
}

TEST(SpinOperator, SquareOfX) {
  const CMatrix s = spin_operator(1, Axis::x, 2).matrix();
  EXPECT_LE(dist(s * s, 0.25 * CMatrix::Identity(4, 4)), 1e-15);
}

TEST(SpinOperator, IndexOutOfRange) {
  EXPECT_THROW(spin_operator(0, Axis::x, 2), std::out_of_range);
  EXPECT_THROW(spin_operator(3, Axis::x, 2), std::out_of_range);
}

TEST(SpinOperator, CommutationRelations) {
  for (int m = 1; m <= 3; ++m) {
    for (int j = 1; j <= m; ++j) {
      const CMatrix xj = spin_operator(j, Axis::x, m).matrix();
      const CMatrix yj = spin_operator(j, Axis::y, m).matrix();
      const CMatrix zj = spin_operator(j, Axis::z, m).matrix();
      EXPECT_LE(dist(commutator(xj, yj), kI * zj), 1e-14);
      EXPECT_NEAR(std::abs(xj.trace()), 0.0, 1e-15);
      for (int k = 1; k <= m; ++k) {
        if (k == j) continue;
        for (Axis b : {Axis::x, Axis::y, Axis::z}) {
          const CMatrix sk = spin_operator(k, b, m).matrix();
          EXPECT_LE(commutator(xj, sk).norm(), 1e-15);
          EXPECT_LE(commutator(zj, sk).norm(), 1e-15);
        }
      }
    }
  }
}

TEST(Drift, SingleSpinShift) {
  const SpinSystem sys{{17662.0}, {{}}, kDefaultControlBound};
  CMatrix want = CMatrix::Zero(2, 2);
  want(0, 0) = kTwoPi * 17662.0 * 0.5;
  want(1, 1) = -kTwoPi * 17662.0 * 0.5;
  EXPECT_LE(dist(build_drift(sys).matrix(), want), 1e-9);
}

TEST(Drift, IsotropicCouplingSpectrum) {
  const double j = 53.9;
  const SpinSystem sys{{0.0, 0.0}, {{}, {j}}, kDefaultControlBound};
  // Independent construction from Pauli matrices: (J/4) sum_a sigma_a (x) sigma_a.
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  const CMatrix direct = 0.25 * kTwoPi * j * (kron(sx, sx) + kron(sy, sy) + kron(sz, sz));
  EXPECT_LE(dist(build_drift(sys).matrix(), direct), 1e-10);
  const RVector ev = sorted_eigenvalues(build_drift(sys).matrix());
  const double w = kTwoPi * j;
  EXPECT_NEAR(ev(0), -0.75 * w, 1e-10);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev(k), 0.25 * w, 1e-10);
}

TEST(Drift, AllZeroSystem) {
  const SpinSystem sys{{0.0, 0.0, 0.0}, {{}, {0.0}, {0.0, 0.0}}, 1.0};
  EXPECT_EQ(build_drift(sys).matrix().norm(), 0.0);
}

TEST(Drift, CommutesWithTotalSz) {
  std::mt19937_64 rng(7);
  for (int m = 1; m <= 4; ++m) {
    const SpinSystem sys = testing::random_system(m, rng, 2e4, 100.0, 1.0);
    CMatrix sz = CMatrix::Zero(sys.dim(), sys.dim());
    for (int k = 1; k <= m; ++k) sz += spin_operator(k, Axis::z, m).matrix();
    EXPECT_LE(commutator(build_drift(sys).matrix(), sz).norm(), 1e-10);
  }
}

TEST(Control, SingleSpin) {
  const SpinSystem sys{{0.0}, {{}}, 1.0};
  CMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  EXPECT_LE(dist(build_control(sys, Axis::x).matrix(), -0.5 * sx), 1e-15);
}

TEST(Control, TwoSpinNormIsOne) {
  const SpinSystem sys{{0.0, 0.0}, {{}, {0.0}}, 1.0};
  const RVector ev = sorted_eigenvalues(build_control(sys, Axis::x).matrix());
  EXPECT_NEAR(ev.cwiseAbs().maxCoeff(), 1.0, 1e-14);
}

TEST(Control, AxesOrthogonalAndTraceless) {
  std::mt19937_64 rng(3);
  for (int m = 1; m <= 4; ++m) {
    const SpinSystem sys = testing::random_system(m, rng, 1e3, 10.0, kDefaultControlBound);
    const CMatrix hx = build_control(sys, Axis::x).matrix();
    const CMatrix hy = build_control(sys, Axis::y).matrix();
    EXPECT_LE(std::abs((hx * hy).trace()), 1e-14 * hx.squaredNorm());
    EXPECT_LE(std::abs(hx.trace()), 1e-14 * hx.norm());
    EXPECT_LE(hermiticity_error(hx), 1e-12);
    EXPECT_LE(dist(hx, sys.eps * control_generator(m, Axis::x).matrix()), 1e-6);
  }
}

TEST(SpinTable, BundledDataset) {
  const SpinSystem sys = load_spin_table("d-norleucine");
  ASSERT_EQ(sys.size(), 6);
  EXPECT_EQ(sys.shift_hz[1], 5382.4);
  EXPECT_EQ(sys.coupling(1, 2), 53.9);
  EXPECT_EQ(sys.coupling(4, 6), 34.93);
  EXPECT_EQ(sys.coupling(6, 4), 34.93);
  EXPECT_EQ(sys.eps, kDefaultControlBound);
}

TEST(SpinTable, OneByOne) {
  std::istringstream in("100.0\n");
  const SpinSystem sys = load_spin_table(in);
  EXPECT_EQ(sys.size(), 1);
  EXPECT_EQ(sys.shift_hz[0], 100.0);
}

TEST(SpinTable, ShortRowNamesRow) {
  std::istringstream in("1\n2,3\n4,5\n6,7,8,9\n");
  try {
    load_spin_table(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(SpinTable, SixRowsWithBadThirdRow) {
  std::istringstream in("1\n2,3\n4,5,6,7,8\n1,2,3,4\n1,2,3,4,5\n1,2,3,4,5,6\n");
  EXPECT_THROW(load_spin_table(in), ParseError);
}

TEST(SpinTable, NonNumericCellNamesColumn) {
  std::istringstream in("1\n2,abc\n");
  try {
    load_spin_table(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 2"), std::string::npos) << what;
    EXPECT_NE(what.find("column 2"), std::string::npos) << what;
  }
}

TEST(SpinTable, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  for (int m = 1; m <= 6; ++m) {
    const SpinSystem sys = testing::random_system(m, rng, 2e4, 60.0, kDefaultControlBound);
    std::stringstream s;
    write_spin_table(s, sys);
    EXPECT_EQ(load_spin_table(s, sys.eps), sys);
  }
  const SpinSystem dn = d_norleucine();
  std::stringstream s;
  write_spin_table(s, dn);
  EXPECT_EQ(load_spin_table(s), dn);
}

TEST(SpinSystem, LeadingKeepsMutualCouplings) {
  const SpinSystem sub = d_norleucine().leading(3);
  ASSERT_EQ(sub.size(), 3);
  EXPECT_EQ(sub.coupling(2, 3), 33.96);
  EXPECT_NO_THROW(sub.validate());
}

TEST(SpinSystem, InvalidEps) {
  SpinSystem sys{{1.0}, {{}}, 0.0};
  EXPECT_THROW(sys.validate(), ParseError);
}

TEST(Operators, HermitianCheck) {
  CMatrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(HermitianOperator{a}, NumericalError);
  EXPECT_THROW(TargetGate{a}, NumericalError);
}

TEST(Target, RotationOnFirstOfThree) {
  const TargetGate w = make_target(RotationGate{Axis::x, kPi / 2.0, 1}, 3);
  CMatrix r(2, 2);
  const double c = std::cos(kPi / 4.0);
  const double s = std::sin(kPi / 4.0);
  r << c, -kI * s, -kI * s, c;
  EXPECT_LE(dist(w.matrix(), kron(r, CMatrix::Identity(4, 4))), 1e-14);
}

TEST(Target, CnotOnSixSpins) {
  const TargetGate w = make_target(CnotGate{1, 2}, 6);
  CMatrix cnot = CMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  EXPECT_EQ(w.matrix(), kron(cnot, CMatrix::Identity(16, 16)));
}

TEST(Target, ZeroAngleIsIdentity) {
  EXPECT_LE(dist(make_target(RotationGate{Axis::x, 0.0, 1}, 1).matrix(), CMatrix::Identity(2, 2)),
            1e-15);
}

TEST(Target, BadIndices) {
  EXPECT_THROW(make_target(RotationGate{Axis::x, 1.0, 4}, 3), std::out_of_range);
  EXPECT_THROW(make_target(CnotGate{1, 1}, 3), std::out_of_range);
  EXPECT_THROW(make_target(CnotGate{1, 7}, 6), std::out_of_range);
}

TEST(Target, AllUnitary) {
  for (int m = 1; m <= 6; ++m) {
    for (Axis a : {Axis::x, Axis::y, Axis::z}) {
      EXPECT_LE(unitarity_error(make_target(RotationGate{a, 1.234, m}, m).matrix()), 1e-12);
    }
  }
}

}  // namespace
}  // namespace qoc
