// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT

#include <qsd/linalg.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_helpers.hpp"

using namespace qsd;
using qsd::testing::engine;
using qsd::testing::max_abs_diff;
using qsd::testing::random_gaussian;
using qsd::testing::random_hermitian;

namespace {

// Closed-form eigenvalues of a 2x2 Hermitian matrix, descending.
// Independent of the library's eigensolver; used as an oracle.
std::pair<double, double> eig2x2(const Matrix& m) {
  const double t = (m(0, 0) + m(1, 1)).real();
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det));
  return {(t + disc) / 2.0, (t - disc) / 2.0};
}

Matrix biased_qubit_difference(double power) {
  // q1^power * rho1 - q2^power * rho2 for the biased qubit pair
  // rho1 = diag(5/6, 1/6), rho2 = |+><+|, q = (0.85, 0.15).
  Matrix rho1 = Matrix::Zero(2, 2);
  rho1(0, 0) = 5.0 / 6.0;
  rho1(1, 1) = 1.0 / 6.0;
  Matrix rho2 = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  return std::pow(0.85, power) * rho1 - std::pow(0.15, power) * rho2;
}

}  // namespace

TEST_CASE("hermiticity checks", "[linalg]") {
  Matrix h(2, 2);
  h << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(2, 0);
  CHECK(is_hermitian(h));

  Matrix not_h(2, 2);
  not_h << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  CHECK_FALSE(is_hermitian(not_h));
  CHECK_THROWS_AS(require_hermitian(not_h, "test"), ValidationError);

  // Rectangular input is rejected outright.
  CHECK_THROWS_AS(is_hermitian(Matrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("trace_product matches direct trace", "[linalg]") {
  auto& eng = engine(101);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_hermitian(3, eng);
    const Matrix b = random_hermitian(3, eng);
    const double direct = (a * b).trace().real();
    CHECK(trace_product(a, b) == Catch::Approx(direct).margin(1e-12));
  }
  CHECK_THROWS_AS(trace_product(Matrix::Zero(2, 2), Matrix::Zero(3, 3)),
                  ValidationError);
}

TEST_CASE("spectral_decomposition against 2x2 closed form", "[linalg]") {
  const Matrix x = biased_qubit_difference(1.0);
  const auto [hi, lo] = eig2x2(x);
  const Spectrum s = spectral_decomposition(x);

  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues(0) == Catch::Approx(hi).margin(1e-12));
  CHECK(s.eigenvalues(1) == Catch::Approx(lo).margin(1e-12));
  // Frozen reference values for this weighted-difference matrix.
  CHECK(s.eigenvalues(0) == Catch::Approx(0.643092).margin(1e-6));
  CHECK(s.eigenvalues(1) == Catch::Approx(0.056908).margin(1e-6));
  CHECK(trace_norm(x) == Catch::Approx(0.7).margin(1e-12));
  CHECK(is_psd(x));
}

TEST_CASE("two-copy weighted difference is indefinite", "[linalg]") {
  // With square-root weights the difference picks up a negative eigenvalue.
  const Matrix y = biased_qubit_difference(0.5);
  const auto [hi, lo] = eig2x2(y);
  const Spectrum s = spectral_decomposition(y);
  CHECK(s.eigenvalues(0) == Catch::Approx(hi).margin(1e-12));
  CHECK(s.eigenvalues(1) == Catch::Approx(lo).margin(1e-12));
  CHECK(s.eigenvalues(1) == Catch::Approx(-0.095914).margin(1e-4));
  CHECK_FALSE(is_psd(y));
}

TEST_CASE("spectral_decomposition properties", "[linalg]") {
  auto& eng = engine(202);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 2 + rep % 3;
    const Matrix h = random_hermitian(dim, eng);
    const Spectrum s = spectral_decomposition(h);

    // Reconstruction.
    Matrix rebuilt = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
      rebuilt += s.eigenvalues(k) * s.eigenvectors.col(k) * s.eigenvectors.col(k).adjoint();
    }
    CHECK(max_abs_diff(rebuilt, h) <= 1e-10 * std::max(1.0, h.norm()));

    // Descending order and trace identity.
    for (int k = 0; k + 1 < dim; ++k) CHECK(s.eigenvalues(k) >= s.eigenvalues(k + 1));
    CHECK(h.trace().real() == Catch::Approx(s.eigenvalues.sum()).margin(1e-10));

    // Phase convention: first significant component is real positive.
    for (int k = 0; k < dim; ++k) {
      for (int i = 0; i < dim; ++i) {
        if (std::abs(s.eigenvectors(i, k)) > 1e-9) {
          CHECK(s.eigenvectors(i, k).imag() == Catch::Approx(0.0).margin(1e-12));
          CHECK(s.eigenvectors(i, k).real() > 0.0);
          break;
        }
      }
    }

    // Shifting by |lambda_min| + margin makes the matrix PSD.
    const double shift = std::abs(s.eigenvalues(dim - 1)) + 0.1;
    CHECK(is_psd(h + shift * Matrix::Identity(dim, dim)));
  }
}

TEST_CASE("spectral_decomposition is deterministic", "[linalg]") {
  auto& eng = engine(303);
  const Matrix h = random_hermitian(4, eng);
  const Spectrum a = spectral_decomposition(h);
  const Spectrum b = spectral_decomposition(h);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs_diff(a.eigenvectors, b.eigenvectors) == 0.0);
}

TEST_CASE("is_psd basics", "[linalg]") {
  CHECK(is_psd(Matrix::Identity(3, 3)));
  CHECK(is_psd(Matrix::Zero(2, 2)));
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -0.5;
  CHECK_FALSE(is_psd(neg));

  auto& eng = engine(404);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix g = random_gaussian(3, 3, eng);
    CHECK(is_psd(g * g.adjoint()));
  }
}

TEST_CASE("pinv_sqrt on diagonal references", "[linalg]") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = 0.25;
  d(2, 2) = 0.25;
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = std::sqrt(2.0);
  expected(1, 1) = 2.0;
  expected(2, 2) = 2.0;
  CHECK(max_abs_diff(pinv_sqrt(d), expected) <= 1e-12);

  // Singular input: zero eigenvalues are dropped, not inverted.
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 4.0;
  Matrix s_expected = Matrix::Zero(2, 2);
  s_expected(0, 0) = 0.5;
  CHECK(max_abs_diff(pinv_sqrt(s), s_expected) <= 1e-12);

  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(pinv_sqrt(indefinite), ValidationError);
}

TEST_CASE("pinv_sqrt inverts on the support", "[linalg]") {
  auto& eng = engine(505);
  for (int rep = 0; rep < 20; ++rep) {
    const int dim = 2 + rep % 3;
    const Matrix g = random_gaussian(dim, dim, eng);
    const Matrix s = g * g.adjoint() + 0.5 * Matrix::Identity(dim, dim);
    const Matrix w = pinv_sqrt(s);
    CHECK(max_abs_diff(w * s * w, Matrix::Identity(dim, dim)) <= 1e-9);
    CHECK(is_hermitian(w, 1e-10));
  }
}

TEST_CASE("proportional predicate", "[linalg]") {
  auto& eng = engine(606);
  const Matrix a = random_hermitian(3, eng);
  const Matrix b = random_hermitian(3, eng);
  CHECK(proportional(0.3 * a, 0.7 * a));
  CHECK_FALSE(proportional(a, b));
  CHECK_FALSE(proportional(a, -a));  // positive proportionality only
  CHECK(proportional(Matrix::Zero(2, 2), Matrix::Zero(2, 2)));
  CHECK_FALSE(proportional(Matrix::Zero(3, 3), a));
}
