// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Built-in reference scenarios with closed-form properties.  These back the
// CLI `reproduce` command and the regression tests.
//
// 1. Qutrit pair ("example1" in the CLI): rho1 = (|0><0| + |1><1|)/2,
//    rho2 = |+><+| with |±> = (|1> ± |2>)/sqrt(2), equal priors.  The
//    one-parameter measurement family A(a1, a2) = (a1 |-><-|, a2 |2><2|,
//    rest) is a valid POVM iff 0 <= a1 <= 1 and 0 <= a2 <= 2 - 2/(2 - a1);
//    its first two outcomes identify rho1 and rho2 with certainty.
//
// 2. Biased qubit pair ("fig1" in the CLI): rho1 = diag(5/6, 1/6),
//    rho2 = |+><+|, priors (0.85, 0.15), with the computational-basis
//    projective measurement.  Always guessing rho1 is optimal for success
//    probability, yet measuring still gains information.

#pragma once

#include <qsd/scenario.hpp>

namespace qsd::fixtures {

inline Vector basis_ket(int dim, int i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

// --- qutrit pair -----------------------------------------------------------

inline Vector qutrit_plus() {
  Vector v = Vector::Zero(3);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

inline Vector qutrit_minus() {
  Vector v = Vector::Zero(3);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

inline Scenario qutrit_pair() {
  Matrix rho1 = Matrix::Zero(3, 3);
  rho1(0, 0) = 0.5;
  rho1(1, 1) = 0.5;
  const Matrix rho2 = projector(qutrit_plus());
  RealVector q(2);
  q << 0.5, 0.5;
  return Scenario({DensityMatrix(rho1), DensityMatrix(rho2)}, q);
}

/// Largest admissible a2 for a given a1 in the qutrit family A.
inline double qutrit_a2_max(double a1) { return 2.0 - 2.0 / (2.0 - a1); }

/// The qutrit measurement family (A1, A2, A0) = (a1 |-><-|, a2 |2><2|,
/// identity minus the rest).  Outcomes 0 and 1 are the conclusive ones; the
/// inconclusive element is listed last.
inline Povm qutrit_family_a(double a1, double a2) {
  const Matrix m1 = a1 * projector(qutrit_minus());
  const Matrix m2 = a2 * projector(basis_ket(3, 2));
  const Matrix m0 = Matrix::Identity(3, 3) - m1 - m2;
  return Povm({m1, m2, m0});
}

/// The projective endpoint (B1, B2, B0) = (|0><0|, |2><2|, |1><1|).
inline Povm qutrit_family_b() {
  return Povm({projector(basis_ket(3, 0)), projector(basis_ket(3, 2)),
               projector(basis_ket(3, 1))});
}

// --- biased qubit pair -----------------------------------------------------

inline Scenario biased_qubit_pair() {
  Matrix rho1 = Matrix::Zero(2, 2);
  rho1(0, 0) = 5.0 / 6.0;
  rho1(1, 1) = 1.0 / 6.0;
  const Matrix rho2 = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  RealVector q(2);
  q << 0.85, 0.15;
  return Scenario({DensityMatrix(rho1), DensityMatrix(rho2)}, q);
}

/// Computational-basis measurement (|0><0|, |1><1|).
inline Povm qubit_projective() {
  return Povm({projector(basis_ket(2, 0)), projector(basis_ket(2, 1))});
}

}  // namespace qsd::fixtures
