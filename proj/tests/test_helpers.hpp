// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Shared helpers for the unit tests: seeded random matrix generators and
// small comparison utilities.  Tests pin their own seeds so failures are
// reproducible.

#pragma once

#include <qsd/linalg.hpp>

#include <random>

namespace qsd::testing {

inline std::mt19937& engine(unsigned seed) {
  static thread_local std::mt19937 eng;
  eng.seed(seed);
  return eng;
}

inline Matrix random_gaussian(int rows, int cols, std::mt19937& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      g(i, j) = Complex(normal(eng), normal(eng));
    }
  }
  return g;
}

inline Matrix random_hermitian(int dim, std::mt19937& eng) {
  const Matrix g = random_gaussian(dim, dim, eng);
  return 0.5 * (g + g.adjoint());
}

inline Vector random_unit_vector(int dim, std::mt19937& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(eng), normal(eng));
  return v / v.norm();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qsd::testing
