// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Measurement transformations and the monotonicity machinery.  Classical
// post-processing (column-stochastic mixing of POVM elements) can only
// degrade a measurement; utilities that respect three structural conditions
// (C1-C3 below) are provably monotone under it.  This module implements the
// transformations, the condition checks, and a seeded fuzzer that hunts for
// monotonicity violations.

#pragma once

#include <qsd/random.hpp>
#include <qsd/utility.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

/// Column-stochastic map: entry (i, j) is the probability of reporting new
/// outcome i when the underlying measurement produced outcome j.
class StochasticMap {
 public:
  explicit StochasticMap(Eigen::MatrixXd p) : p_(std::move(p)) {
    if (p_.rows() < 1 || p_.cols() < 1) {
      throw ValidationError("StochasticMap: needs at least one row and column");
    }
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < p_.rows(); ++i) {
        if (p_(i, j) < -tol::prior_sum) {
          throw ValidationError("StochasticMap: negative entry at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
        }
        sum += p_(i, j);
      }
      if (std::abs(sum - 1.0) > tol::prior_sum) {
        throw ValidationError("StochasticMap: column " + std::to_string(j) +
                              " sums to " + std::to_string(sum));
      }
    }
  }

  int from() const { return static_cast<int>(p_.cols()); }
  int to() const { return static_cast<int>(p_.rows()); }
  double operator()(int i, int j) const { return p_(i, j); }
  const Eigen::MatrixXd& matrix() const { return p_; }

 private:
  Eigen::MatrixXd p_;
};

/// Apply classical post-processing: B_i = sum_j p(i|j) A_j.  Column
/// stochasticity guarantees the result is again a POVM.
inline Povm post_process(const Povm& e, const StochasticMap& t) {
  if (t.from() != e.outcomes()) {
    throw ValidationError("post_process: map expects " + std::to_string(t.from()) +
                          " outcomes, measurement has " + std::to_string(e.outcomes()));
  }
  const Eigen::Index d = e.element(0).rows();
  std::vector<Matrix> elements;
  elements.reserve(static_cast<std::size_t>(t.to()));
  for (int i = 0; i < t.to(); ++i) {
    Matrix b = Matrix::Zero(d, d);
    for (int j = 0; j < e.outcomes(); ++j) {
      b += t(i, j) * e.element(j);
    }
    elements.push_back(std::move(b));
  }
  return Povm(std::move(elements));
}

/// Random column-stochastic map with flat-Dirichlet columns.
inline StochasticMap random_stochastic_map(int to, int from, Rng& rng) {
  if (to < 1 || from < 1) {
    throw ValidationError("random_stochastic_map: sizes must be positive");
  }
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd p(to, from);
  for (int j = 0; j < from; ++j) {
    double sum = 0.0;
    for (int i = 0; i < to; ++i) {
      p(i, j) = expo(rng);
      sum += p(i, j);
    }
    p.col(j) /= sum;
  }
  return StochasticMap(std::move(p));
}

/// Replace element `index` by the proportional pair (fraction * A, rest * A),
/// with the second copy appended as the last outcome.  Useful for building
/// instances with a known proportional pair (index, old outcome count).
inline Povm split_element(const Povm& e, int index, double fraction) {
  if (index < 0 || index >= e.outcomes()) {
    throw std::out_of_range("split_element: index out of range");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split_element: fraction must lie strictly between 0 and 1");
  }
  std::vector<Matrix> elements = e.elements();
  const Matrix original = elements[static_cast<std::size_t>(index)];
  elements[static_cast<std::size_t>(index)] = fraction * original;
  elements.push_back((1.0 - fraction) * original);
  return Povm(std::move(elements));
}

// --- rank-1 refinement ---------------------------------------------------

/// A POVM whose elements are all rank one, together with the index of the
/// original element each refined element came from.
struct Refinement {
  Povm povm;
  std::vector<int> origin;  // origin[i] = original outcome of refined element i

  /// The deterministic coarse-graining map that reconstructs the original
  /// measurement: post_process(povm, origin_map(original_outcomes)) is the
  /// original POVM.
  StochasticMap origin_map(int original_outcomes) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(original_outcomes,
                                              static_cast<Eigen::Index>(origin.size()));
    for (std::size_t i = 0; i < origin.size(); ++i) {
      p(origin[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    return StochasticMap(std::move(p));
  }
};

/// Split every element into its spectral rank-1 pieces lambda |v><v|.
/// Eigenvalues at or below drop_tolerance * max(1, lambda_max) are dropped,
/// so zero elements contribute nothing.  Every measurement is a
/// coarse-graining of its refinement, hence never more useful than it.
inline Refinement rank1_refine(const Povm& e, double drop_tolerance = tol::spectrum_drop) {
  std::vector<Matrix> elements;
  std::vector<int> origin;
  for (int y = 0; y < e.outcomes(); ++y) {
    const Spectrum s = spectral_decomposition(e.element(y));
    const double cutoff = drop_tolerance * std::max(1.0, s.eigenvalues(0));
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
      if (s.eigenvalues(k) <= cutoff) continue;
      elements.push_back(s.eigenvalues(k) * s.eigenvectors.col(k) *
                         s.eigenvectors.col(k).adjoint());
      origin.push_back(y);
    }
  }
  return Refinement{Povm(std::move(elements)), std::move(origin)};
}

// --- structural conditions -------------------------------------------------

enum class CheckResult { Pass, Fail, Inapplicable };

struct CheckReport {
  CheckResult result = CheckResult::Inapplicable;
  std::string detail;
};

/// C1: the utility of an outcome depends on it only through its POVM element
/// (up to scale) and its decision.  Checked by comparing the utility of two
/// proportional elements across every shared decision and true state.
/// Inapplicable when the elements are not proportional.
inline CheckReport check_C1(const UtilityFunction& u, const Scenario& s, const Povm& e,
                            int i, int j, double tolerance = tol::lexicographic) {
  require_compatible(s, e);
  if (i < 0 || i >= e.outcomes() || j < 0 || j >= e.outcomes() || i == j) {
    throw std::out_of_range("check_C1: outcome indices out of range");
  }
  if (!proportional(e.element(i), e.element(j))) {
    return {CheckResult::Inapplicable, "elements are not proportional"};
  }
  DecisionStrategy g;
  g.decisions.assign(static_cast<std::size_t>(e.outcomes()), 0);
  for (int d = 0; d <= s.size(); ++d) {
    g.decisions[static_cast<std::size_t>(i)] = d;
    g.decisions[static_cast<std::size_t>(j)] = d;
    for (int nu = 0; nu < s.size(); ++nu) {
      const UtilityScore a = u.evaluate(s, e, i, g, nu);
      const UtilityScore b = u.evaluate(s, e, j, g, nu);
      for (int k = 0; k < u.arity; ++k) {
        const double da = a.components[static_cast<std::size_t>(k)];
        const double db = b.components[static_cast<std::size_t>(k)];
        if (std::abs(da - db) > tolerance) {
          std::ostringstream msg;
          msg << "outcomes " << i << " vs " << j << " differ under decision " << d
              << ", state " << nu << ", component " << k << ": " << da << " vs " << db;
          return {CheckResult::Fail, msg.str()};
        }
      }
    }
  }
  return {CheckResult::Pass, ""};
}

/// C2: some optimal strategy gives proportional elements the same decision.
/// Checked by exhaustive enumeration: among all strategies within the
/// dictionary-order tolerance of the maximum there must be one with
/// matching decisions on i and j.
inline CheckReport check_C2(const UtilityFunction& u, const Scenario& s, const Povm& e,
                            int i, int j,
                            std::int64_t cap = StrategyEnumerator::default_cap) {
  require_compatible(s, e);
  if (i < 0 || i >= e.outcomes() || j < 0 || j >= e.outcomes() || i == j) {
    throw std::out_of_range("check_C2: outcome indices out of range");
  }
  if (!proportional(e.element(i), e.element(j))) {
    return {CheckResult::Inapplicable, "elements are not proportional"};
  }
  // Pass 1: exact maximum.
  UtilityScore best = UtilityScore::zero(u.arity);
  bool have_best = false;
  {
    StrategyEnumerator en(e.outcomes(), s.size(), true, cap);
    while (auto g = en.next()) {
      const UtilityScore score = average_utility_fixed(s, e, u, *g);
      if (!have_best || lex_compare(score, best, 0.0) > 0) {
        best = score;
        have_best = true;
      }
    }
  }
  // Pass 2: look for a maximizer with matching decisions.
  StrategyEnumerator en(e.outcomes(), s.size(), true, cap);
  while (auto g = en.next()) {
    if (g->decisions[static_cast<std::size_t>(i)] != g->decisions[static_cast<std::size_t>(j)]) {
      continue;
    }
    if (lex_compare(average_utility_fixed(s, e, u, *g), best) == 0) {
      return {CheckResult::Pass, ""};
    }
  }
  return {CheckResult::Fail,
          "no optimal strategy assigns outcomes " + std::to_string(i) + " and " +
              std::to_string(j) + " the same decision"};
}

/// C3: merging two outcomes that share a decision never increases the
/// fixed-strategy average utility, with equality when the elements are
/// proportional.  Also verifies that outcomes not involved in the merge keep
/// their per-outcome contribution.  Inapplicable when the two outcomes carry
/// different decisions.
inline CheckReport check_C3(const UtilityFunction& u, const Scenario& s, const Povm& e,
                            const DecisionStrategy& g, int i, int j,
                            double tolerance = tol::lexicographic) {
  require_compatible(s, e);
  require_valid_strategy(g, e.outcomes(), s.size());
  if (i < 0 || i >= e.outcomes() || j < 0 || j >= e.outcomes() || i == j) {
    throw std::out_of_range("check_C3: outcome indices out of range");
  }
  if (g.decisions[static_cast<std::size_t>(i)] != g.decisions[static_cast<std::size_t>(j)]) {
    return {CheckResult::Inapplicable, "outcomes carry different decisions"};
  }
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);

  // Merged measurement: element lo absorbs element hi.
  std::vector<Matrix> elements;
  DecisionStrategy merged_g;
  std::vector<int> old_index;  // merged outcome -> original outcome (lo for the sum)
  for (int y = 0; y < e.outcomes(); ++y) {
    if (y == hi) continue;
    elements.push_back(y == lo ? Matrix(e.element(lo) + e.element(hi)) : e.element(y));
    merged_g.decisions.push_back(g.decisions[static_cast<std::size_t>(y)]);
    old_index.push_back(y);
  }
  const Povm merged(std::move(elements));

  const UtilityScore before = average_utility_fixed(s, e, u, g);
  const UtilityScore after = average_utility_fixed(s, merged, u, merged_g);
  if (lex_compare(after, before, tolerance) > 0) {
    return {CheckResult::Fail, "merging increased the average utility"};
  }

  // Untouched outcomes must contribute identically before and after.
  for (int idx = 0; idx < merged.outcomes(); ++idx) {
    const int y = old_index[static_cast<std::size_t>(idx)];
    if (y == lo) continue;
    for (int nu = 0; nu < s.size(); ++nu) {
      const double w = joint_probability(s, e, y, nu);
      if (w <= 0.0) continue;
      const UtilityScore uy = u.evaluate(s, e, y, g, nu);
      const UtilityScore um = u.evaluate(s, merged, idx, merged_g, nu);
      for (int k = 0; k < u.arity; ++k) {
        if (std::abs(uy.components[static_cast<std::size_t>(k)] -
                     um.components[static_cast<std::size_t>(k)]) > tolerance) {
          return {CheckResult::Fail,
                  "merging changed the utility of untouched outcome " + std::to_string(y)};
        }
      }
    }
  }

  if (proportional(e.element(i), e.element(j))) {
    for (int k = 0; k < u.arity; ++k) {
      const double diff = std::abs(after.components[static_cast<std::size_t>(k)] -
                                   before.components[static_cast<std::size_t>(k)]);
      if (diff > tolerance) {
        return {CheckResult::Fail,
                "proportional merge changed component " + std::to_string(k) + " by " +
                    std::to_string(diff)};
      }
    }
  }
  return {CheckResult::Pass, ""};
}

// --- monotonicity fuzzing ----------------------------------------------------

/// A measurement-level objective: scenario + measurement -> score.  Standard
/// utilities induce one through strategy-maximized averaging; adversarial
/// controls can wrap arbitrary functions.
struct MeasurementObjective {
  std::string name;
  int arity = 1;
  std::function<UtilityScore(const Scenario&, const Povm&)> score;
};

inline MeasurementObjective objective_from_utility(
    const UtilityFunction& u, StrategyMode mode = StrategyMode::Auto,
    std::int64_t cap = StrategyEnumerator::default_cap) {
  return MeasurementObjective{
      u.name, u.arity,
      [u, mode, cap](const Scenario& s, const Povm& e) {
        return average_utility(s, e, u, mode, cap).score;
      }};
}

/// Adversarial control: the negated optimal success probability.  Mixing
/// outcomes destroys information, so this score *rises* under
/// post-processing and the fuzzer must flag it.
inline MeasurementObjective anti_success_objective() {
  return MeasurementObjective{
      "anti-success", 1, [](const Scenario& s, const Povm& e) {
        return UtilityScore{
            {-success_probability(s, e, optimal_strategy_min_error(s, e))}};
      }};
}

struct MonotoneViolation {
  int trial;
  std::uint64_t sub_seed;
  Scenario scenario;
  Povm before;
  Povm after;
  StochasticMap map;
  UtilityScore score_before;
  UtilityScore score_after;
  double magnitude;  // post-processing gain in the deciding component
};

struct MonotoneReport {
  std::string objective;
  int trials = 0;
  std::vector<MonotoneViolation> violations;
  double max_violation = 0.0;
};

/// Seeded random search for monotonicity violations: each trial draws a
/// scenario, a measurement, and a stochastic map, then demands that the
/// objective of the post-processed measurement not exceed the original
/// beyond violation_tolerance (in dictionary order).  Trial k is driven by
/// derive_seed(seed, k), so reports are reproducible and independent of
/// trial count.
inline MonotoneReport monotonicity_fuzz(const MeasurementObjective& obj, int dim_min,
                                        int dim_max, int trials, std::uint64_t seed,
                                        double violation_tolerance = tol::monotone_violation) {
  if (dim_min < 2 || dim_max < dim_min) {
    throw ValidationError("monotonicity_fuzz: need 2 <= dim_min <= dim_max");
  }
  if (trials < 1) throw ValidationError("monotonicity_fuzz: need at least one trial");

  MonotoneReport report;
  report.objective = obj.name;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t sub_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng rng(sub_seed);
    std::uniform_int_distribution<int> dim_dist(dim_min, dim_max);
    std::uniform_int_distribution<int> n_dist(2, 3);
    std::uniform_int_distribution<int> m_dist(2, 5);
    std::uniform_int_distribution<int> m2_dist(1, 5);
    const int dim = dim_dist(rng);
    const int n = n_dist(rng);
    const int m = m_dist(rng);
    const int m2 = m2_dist(rng);

    const Scenario s = random_scenario(n, dim, rng);
    const Povm e = random_povm(m, dim, rng);
    const StochasticMap map = random_stochastic_map(m2, m, rng);
    const Povm degraded = post_process(e, map);

    const UtilityScore before = obj.score(s, e);
    const UtilityScore after = obj.score(s, degraded);
    if (lex_compare(after, before, violation_tolerance) > 0) {
      double magnitude = 0.0;
      for (int k = 0; k < obj.arity; ++k) {
        const double gain = after.components[static_cast<std::size_t>(k)] -
                            before.components[static_cast<std::size_t>(k)];
        if (gain > violation_tolerance) {
          magnitude = gain;
          break;
        }
      }
      report.max_violation = std::max(report.max_violation, magnitude);
      report.violations.push_back(MonotoneViolation{t, sub_seed, s, e, degraded, map,
                                                    before, after, magnitude});
    }
  }
  return report;
}

inline MonotoneReport monotonicity_fuzz(const UtilityFunction& u, int dim_min, int dim_max,
                                        int trials, std::uint64_t seed,
                                        double violation_tolerance = tol::monotone_violation) {
  return monotonicity_fuzz(objective_from_utility(u), dim_min, dim_max, trials, seed,
                           violation_tolerance);
}

}  // namespace qsd
