// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Core model types: density matrices, discrimination scenarios (states with
// prior weights), POVMs, and the probability/entropy rules built on them.
// All probabilities are in [0, 1] and entropies are in bits.

#pragma once

#include <qsd/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
struct DensityMatrix {
  Matrix rho;

  explicit DensityMatrix(Matrix m, double psd_tolerance = tol::psd) : rho(std::move(m)) {
    require_square(rho, "DensityMatrix");
    require_hermitian(rho, "DensityMatrix");
    if (!is_psd(rho, psd_tolerance)) {
      throw ValidationError("DensityMatrix: matrix is not positive semidefinite");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol::trace_one) {
      throw ValidationError("DensityMatrix: trace is " + std::to_string(tr) +
                            ", expected 1");
    }
  }

  int dim() const { return static_cast<int>(rho.rows()); }
};

/// A discrimination scenario: n >= 2 states of equal dimension with a prior
/// distribution over which one was prepared.
class Scenario {
 public:
  Scenario(std::vector<DensityMatrix> states, RealVector priors)
      : states_(std::move(states)), priors_(std::move(priors)) {
    if (states_.size() < 2) {
      throw ValidationError("Scenario: need at least two states, got " +
                            std::to_string(states_.size()));
    }
    const int d = states_.front().dim();
    for (const auto& s : states_) {
      if (s.dim() != d) throw ValidationError("Scenario: states have mixed dimensions");
    }
    if (priors_.size() != static_cast<Eigen::Index>(states_.size())) {
      throw ValidationError("Scenario: prior count does not match state count");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < priors_.size(); ++i) {
      if (priors_(i) < -tol::prior_sum) {
        throw ValidationError("Scenario: negative prior at index " + std::to_string(i));
      }
      sum += priors_(i);
    }
    if (std::abs(sum - 1.0) > tol::prior_sum) {
      throw ValidationError("Scenario: priors sum to " + std::to_string(sum) +
                            ", expected 1");
    }
    average_ = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < states_.size(); ++i) {
      average_ += priors_(static_cast<Eigen::Index>(i)) * states_[i].rho;
    }
  }

  int size() const { return static_cast<int>(states_.size()); }
  int dim() const { return states_.front().dim(); }
  const DensityMatrix& state(int i) const { return states_.at(static_cast<std::size_t>(i)); }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const RealVector& priors() const { return priors_; }
  double prior(int i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("Scenario::prior: index out of range");
    return priors_(i);
  }
  /// The prior-weighted average state sum_i q_i rho_i.
  const Matrix& average_state() const { return average_; }

 private:
  std::vector<DensityMatrix> states_;
  RealVector priors_;
  Matrix average_;
};

/// A positive operator-valued measure: PSD elements summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements, double psd_tolerance = tol::psd)
      : elements_(std::move(elements)) {
    if (elements_.empty()) throw ValidationError("Povm: needs at least one element");
    const Eigen::Index d = elements_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t y = 0; y < elements_.size(); ++y) {
      const Matrix& a = elements_[y];
      require_square(a, "Povm element");
      if (a.rows() != d) throw ValidationError("Povm: elements have mixed dimensions");
      require_hermitian(a, "Povm element");
      if (!is_psd(a, psd_tolerance)) {
        throw ValidationError("Povm: element " + std::to_string(y) +
                              " is not positive semidefinite");
      }
      sum += a;
    }
    if ((sum - Matrix::Identity(d, d)).norm() > tol::povm_sum) {
      throw ValidationError("Povm: elements do not sum to the identity");
    }
  }

  int outcomes() const { return static_cast<int>(elements_.size()); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  const Matrix& element(int y) const { return elements_.at(static_cast<std::size_t>(y)); }
  const std::vector<Matrix>& elements() const { return elements_; }

 private:
  std::vector<Matrix> elements_;
};

inline void require_compatible(const Scenario& s, const Povm& e) {
  if (s.dim() != e.dim()) {
    throw ValidationError("scenario dimension " + std::to_string(s.dim()) +
                          " does not match POVM dimension " + std::to_string(e.dim()));
  }
}

/// Joint probability p(outcome, state) = q_nu tr(A_y rho_nu), clamped at 0.
inline double joint_probability(const Scenario& s, const Povm& e, int outcome, int message) {
  require_compatible(s, e);
  if (outcome < 0 || outcome >= e.outcomes()) {
    throw std::out_of_range("joint_probability: outcome index out of range");
  }
  if (message < 0 || message >= s.size()) {
    throw std::out_of_range("joint_probability: message index out of range");
  }
  return std::max(0.0, s.prior(message) * trace_product(e.element(outcome), s.state(message).rho));
}

/// Marginal probability of an outcome, p(y) = tr(A_y rho_bar).
inline double outcome_probability(const Scenario& s, const Povm& e, int outcome) {
  require_compatible(s, e);
  if (outcome < 0 || outcome >= e.outcomes()) {
    throw std::out_of_range("outcome_probability: outcome index out of range");
  }
  return std::max(0.0, trace_product(e.element(outcome), s.average_state()));
}

/// Posterior distribution over states given an outcome.  If the outcome has
/// probability <= tol::zero_outcome the posterior is undefined and the
/// all-zero vector is returned as a sentinel.
inline RealVector posterior(const Scenario& s, const Povm& e, int outcome) {
  require_compatible(s, e);
  if (outcome < 0 || outcome >= e.outcomes()) {
    throw std::out_of_range("posterior: outcome index out of range");
  }
  RealVector joint(s.size());
  for (int nu = 0; nu < s.size(); ++nu) {
    joint(nu) = joint_probability(s, e, outcome, nu);
  }
  const double total = joint.sum();
  if (total <= tol::zero_outcome) return RealVector::Zero(s.size());
  return joint / total;
}

/// True iff the vector is the all-zero sentinel returned by posterior().
inline bool is_undefined_distribution(const RealVector& p) {
  return p.cwiseAbs().maxCoeff() <= tol::zero_outcome;
}

/// Shannon entropy in bits; terms with p <= 0 contribute zero.
inline double entropy(const RealVector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log2(p(i));
  }
  return h;
}

/// Entropy of the prior distribution H(N).
inline double prior_entropy(const Scenario& s) { return entropy(s.priors()); }

/// Conditional entropy H(N|outcomes) = sum_y p(y) H(posterior(y)); outcomes
/// with probability <= tol::zero_outcome contribute zero.
inline double conditional_entropy(const Scenario& s, const Povm& e) {
  require_compatible(s, e);
  double h = 0.0;
  for (int y = 0; y < e.outcomes(); ++y) {
    const double py = outcome_probability(s, e, y);
    if (py <= tol::zero_outcome) continue;
    h += py * entropy(posterior(s, e, y));
  }
  return h;
}

/// Mutual information I(N : outcomes) = H(N) - H(N|outcomes), in bits.
inline double mutual_information(const Scenario& s, const Povm& e) {
  return prior_entropy(s) - conditional_entropy(s, e);
}

}  // namespace qsd
