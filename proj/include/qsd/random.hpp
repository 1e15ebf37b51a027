// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Seeded random generators for scenarios and measurements.  All sampling is
// driven by an explicit std::mt19937_64 so that every experiment in the test
// suite and CLI is reproducible; sub-seeds for independent trials are derived
// with splitmix64 so trial k is stable regardless of how many draws earlier
// trials consumed.

#pragma once

#include <qsd/scenario.hpp>

#include <cstdint>
#include <random>

namespace qsd {

using Rng = std::mt19937_64;

/// splitmix64 mixing step (public-domain constants).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic sub-seed for trial `index` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Matrix of iid standard complex Gaussians.
inline Matrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      g(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  return g;
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phase
/// convention R_kk > 0 (Mezzadri's construction).
inline Matrix random_unitary(int dim, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

/// Haar-distributed pure state (normalized complex Gaussian vector).
inline Vector random_pure_state(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

/// Full-rank random density matrix G G† / tr(G G†).
inline DensityMatrix random_density_matrix(int dim, Rng& rng) {
  const Matrix g = random_gaussian_matrix(dim, dim, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(m));
}

/// Random density matrix with real entries (useful when comparing against
/// rotation-parameterized projective measurements).
inline DensityMatrix random_real_density_matrix(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  }
  Eigen::MatrixXd m = g * g.transpose();
  m /= m.trace();
  return DensityMatrix(m.cast<Complex>());
}

/// Flat-Dirichlet random probability vector.
inline RealVector random_prior(int n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  RealVector q(n);
  for (int i = 0; i < n; ++i) q(i) = expo(rng);
  return q / q.sum();
}

/// Random scenario with n full-rank states and a flat-Dirichlet prior.
inline Scenario random_scenario(int n, int dim, Rng& rng) {
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) states.push_back(random_density_matrix(dim, rng));
  return Scenario(std::move(states), random_prior(n, rng));
}

/// Random POVM: A_y = S^{-1/2} G_y G_y† S^{-1/2} with S = sum_y G_y G_y†.
/// The construction sums to the identity by design.
inline Povm random_povm(int outcomes, int dim, Rng& rng) {
  std::vector<Matrix> raw;
  raw.reserve(static_cast<std::size_t>(outcomes));
  Matrix s = Matrix::Zero(dim, dim);
  for (int y = 0; y < outcomes; ++y) {
    const Matrix g = random_gaussian_matrix(dim, dim, rng);
    raw.push_back(g * g.adjoint());
    s += raw.back();
  }
  const Matrix w = pinv_sqrt(s);
  std::vector<Matrix> elements;
  elements.reserve(raw.size());
  for (const Matrix& r : raw) {
    Matrix a = w * r * w;
    a = 0.5 * (a + a.adjoint());
    elements.push_back(std::move(a));
  }
  return Povm(std::move(elements));
}

}  // namespace qsd
