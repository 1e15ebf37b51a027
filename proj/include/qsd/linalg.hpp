// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Dense Hermitian linear algebra helpers shared by the rest of the library:
// validated predicates (Hermitian, positive semidefinite), a deterministic
// spectral decomposition, and the pseudo-inverse square root used to build
// measurement optimizers and refinements.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qsd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when a value violates a documented precondition (non-Hermitian
/// operator, negative probabilities, malformed measurement, ...).  The CLI
/// maps this to its "validation error" exit code.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Default numerical tolerances.  All comparisons in the library are relative
/// to these unless a caller overrides them explicitly.
namespace tol {
inline constexpr double hermitian = 1e-12;       // max |M - M†| entry
inline constexpr double psd = 1e-10;             // eigenvalue floor (relative)
inline constexpr double trace_one = 1e-10;       // |tr(rho) - 1|
inline constexpr double prior_sum = 1e-12;       // |sum(q) - 1|
inline constexpr double povm_sum = 1e-10;        // Frobenius |sum(A) - I|
inline constexpr double zero_outcome = 1e-14;    // probability treated as 0
inline constexpr double lexicographic = 1e-9;    // per-component score ties
inline constexpr double proportional = 1e-9;     // normalized Frobenius
inline constexpr double monotone_violation = 1e-7;  // fuzzing threshold
inline constexpr double spectrum_drop = 1e-12;   // rank-1 refinement cutoff
}  // namespace tol

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

/// True iff max_ij |M_ij - conj(M_ji)| <= tolerance.
inline bool is_hermitian(const Matrix& m, double tolerance = tol::hermitian) {
  require_square(m, "is_hermitian");
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

inline void require_hermitian(const Matrix& m, const char* what,
                              double tolerance = tol::hermitian) {
  if (!is_hermitian(m, tolerance)) {
    throw ValidationError(std::string(what) + ": matrix is not Hermitian within tolerance " +
                          std::to_string(tolerance));
  }
}

/// Re(tr(A B)) for same-sized square matrices.  For Hermitian A, B the trace
/// is real, so this is tr(A B) exactly up to rounding.
inline double trace_product(const Matrix& a, const Matrix& b) {
  require_square(a, "trace_product");
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw ValidationError("trace_product: dimension mismatch");
  }
  return a.cwiseProduct(b.transpose()).sum().real();
}

/// Eigen-decomposition of a Hermitian matrix with deterministic conventions:
/// eigenvalues sorted in descending order and each eigenvector rescaled by a
/// global phase so that its first component of non-negligible magnitude is
/// real and positive.  (For degenerate eigenvalues the spanning basis is
/// solver-dependent; only the eigenvalues and spanned subspaces are unique.)
struct Spectrum {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // column k pairs with eigenvalues[k]
};

inline Spectrum spectral_decomposition(const Matrix& m,
                                       double hermitian_tolerance = tol::hermitian) {
  require_hermitian(m, "spectral_decomposition", hermitian_tolerance);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("spectral_decomposition: eigensolver failed to converge");
  }
  const Eigen::Index n = m.rows();
  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Solver returns ascending order; reverse to descending.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  // Fix the global phase of each column.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(out.eigenvectors(i, k));
      if (mag > 1e-9) {
        out.eigenvectors.col(k) *= std::conj(out.eigenvectors(i, k)) / mag;
        break;
      }
    }
  }
  return out;
}

/// Largest |eigenvalue| of a Hermitian matrix.
inline double spectral_norm(const Matrix& m) {
  const Spectrum s = spectral_decomposition(m);
  double best = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    best = std::max(best, std::abs(s.eigenvalues(k)));
  }
  return best;
}

/// Trace norm (sum of |eigenvalues|) of a Hermitian matrix.
inline double trace_norm(const Matrix& m) {
  const Spectrum s = spectral_decomposition(m);
  return s.eigenvalues.cwiseAbs().sum();
}

/// True iff the Hermitian matrix has min eigenvalue >= -tolerance * scale,
/// where scale = max(1, largest |eigenvalue|).  Throws if not Hermitian.
inline bool is_psd(const Matrix& m, double tolerance = tol::psd) {
  const Spectrum s = spectral_decomposition(m);
  const double largest = s.eigenvalues.size() ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double floor = -tolerance * std::max(1.0, largest);
  return s.eigenvalues.minCoeff() >= floor;
}

/// Moore-Penrose inverse square root of a PSD matrix: sum over eigenvalues
/// above the (relative) cutoff of lambda^{-1/2} |v><v|.  Eigenvalues below
/// -cutoff raise a ValidationError; values in [-cutoff, cutoff] are treated
/// as zero and dropped.
inline Matrix pinv_sqrt(const Matrix& m, double tolerance = tol::psd) {
  const Spectrum s = spectral_decomposition(m);
  const double largest = s.eigenvalues.size() ? s.eigenvalues.maxCoeff() : 0.0;
  const double cutoff = tolerance * std::max(1.0, largest);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const double lambda = s.eigenvalues(k);
    if (lambda < -cutoff) {
      throw ValidationError("pinv_sqrt: matrix has negative eigenvalue " +
                            std::to_string(lambda));
    }
    if (lambda > cutoff) {
      out += (1.0 / std::sqrt(lambda)) * s.eigenvectors.col(k) *
             s.eigenvectors.col(k).adjoint();
    }
  }
  return out;
}

/// True iff a and b are positively proportional: after normalizing each by
/// its Frobenius norm the difference has Frobenius norm <= tolerance.  Two
/// (near-)zero matrices count as proportional; zero vs non-zero does not.
inline bool proportional(const Matrix& a, const Matrix& b,
                         double tolerance = tol::proportional) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("proportional: dimension mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  const double scale = std::max(na, nb);
  if (scale <= 1e-14) return true;
  if (na <= 1e-14 * scale || nb <= 1e-14 * scale) return false;
  return (a / na - b / nb).norm() <= tolerance;
}

}  // namespace qsd
