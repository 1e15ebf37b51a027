// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Utility functions for measurement comparison.  A utility assigns a
// vector-valued score to each (outcome, strategy, true state) triple; scores
// are averaged over the joint outcome/state distribution and maximized over
// decision strategies, then compared between measurements in dictionary
// (lexicographic) order.  Multi-component utilities express tie-breaking
// objectives: optimize component 0 first, then component 1 on the optimal
// set, and so on.

#pragma once

#include <qsd/decision.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

struct UtilityScore {
  std::vector<double> components;

  static UtilityScore zero(int arity) {
    return UtilityScore{std::vector<double>(static_cast<std::size_t>(arity), 0.0)};
  }
  int arity() const { return static_cast<int>(components.size()); }
};

/// Dictionary-order comparison with a per-component tolerance band: returns
/// +1 if a > b, -1 if a < b, 0 if every component agrees within tolerance.
/// Component k only matters when all earlier components are tied.
inline int lex_compare(const UtilityScore& a, const UtilityScore& b,
                       double tolerance = tol::lexicographic) {
  if (a.arity() != b.arity()) {
    throw ValidationError("lex_compare: scores have different arities");
  }
  for (int k = 0; k < a.arity(); ++k) {
    const double da = a.components[static_cast<std::size_t>(k)];
    const double db = b.components[static_cast<std::size_t>(k)];
    if (da > db + tolerance) return 1;
    if (da < db - tolerance) return -1;
  }
  return 0;
}

/// How a utility depends on the decision strategy.
///  - PerDecision: the score for outcome y reads only the decision made on y
///    (possibly not at all).  Strategy optimization decouples per outcome.
///  - FullStrategy: the score may depend on which other outcomes share the
///    decision (e.g. aggregated-decision confidences); optimization needs
///    either enumeration or a dedicated construction.
enum class StrategyDependence { PerDecision, FullStrategy };

struct UtilityFunction {
  std::string name;
  int arity = 1;
  StrategyDependence dependence = StrategyDependence::PerDecision;
  /// U(scenario, measurement, outcome y, strategy, true state nu).
  std::function<UtilityScore(const Scenario&, const Povm&, int, const DecisionStrategy&, int)>
      evaluate;
  /// Optional analytic optimal-strategy construction (FullStrategy only).
  std::function<DecisionStrategy(const Scenario&, const Povm&)> analytic_strategy;
};

// --- built-in utilities ------------------------------------------------------

/// U = 1 if the decision names the true state, else 0.  Average = probability
/// of successful identification.
inline UtilityFunction min_error_utility() {
  UtilityFunction u;
  u.name = "p-success";
  u.evaluate = [](const Scenario&, const Povm&, int y, const DecisionStrategy& g, int nu) {
    const int d = g.decisions[static_cast<std::size_t>(y)];
    return UtilityScore{{d == nu + 1 ? 1.0 : 0.0}};
  };
  return u;
}

/// U = delta(decision, true state) / p(decision group); averaging yields the
/// total confidence sum_d p(state d | decision d).  Groups with probability
/// <= tol::zero_outcome score zero.
inline UtilityFunction max_confidence_utility() {
  UtilityFunction u;
  u.name = "total-confidence";
  u.dependence = StrategyDependence::FullStrategy;
  u.evaluate = [](const Scenario& s, const Povm& e, int y, const DecisionStrategy& g, int nu) {
    const int d = g.decisions[static_cast<std::size_t>(y)];
    if (d != nu + 1) return UtilityScore{{0.0}};
    double p_group = 0.0;
    for (int j = 0; j < e.outcomes(); ++j) {
      if (g.decisions[static_cast<std::size_t>(j)] == d) {
        p_group += outcome_probability(s, e, j);
      }
    }
    if (p_group <= tol::zero_outcome) return UtilityScore{{0.0}};
    return UtilityScore{{1.0 / p_group}};
  };
  u.analytic_strategy = [](const Scenario& s, const Povm& e) {
    return optimal_strategy_max_confidence(s, e);
  };
  return u;
}

/// U = log2 posterior of the true state; average = -H(state | outcome).
/// Zero-probability posteriors score 0 (such terms carry zero weight in the
/// average anyway).  Strategy-independent.
inline UtilityFunction log_posterior_utility() {
  UtilityFunction u;
  u.name = "log-posterior";
  u.evaluate = [](const Scenario& s, const Povm& e, int y, const DecisionStrategy&, int nu) {
    const RealVector post = posterior(s, e, y);
    const double p = post(nu);
    return UtilityScore{{p > 0.0 ? std::log2(p) : 0.0}};
  };
  return u;
}

/// U = log2(posterior / prior) of the true state; average = mutual
/// information between state and outcome.  Strategy-independent.
inline UtilityFunction mutual_information_utility() {
  UtilityFunction u;
  u.name = "mutual-info";
  u.evaluate = [](const Scenario& s, const Povm& e, int y, const DecisionStrategy&, int nu) {
    const RealVector post = posterior(s, e, y);
    const double p = post(nu);
    const double q = s.prior(nu);
    return UtilityScore{{(p > 0.0 && q > 0.0) ? std::log2(p / q) : 0.0}};
  };
  return u;
}

/// U = delta(decision, true state) * log2 p(state | decision group): the
/// information carried by the announced decision rather than the raw
/// outcome.  Average = sum_d p(state d, decision d) log2 p(state d |
/// decision d).
inline UtilityFunction decision_mutual_information_utility() {
  UtilityFunction u;
  u.name = "decision-mutual-info";
  u.dependence = StrategyDependence::FullStrategy;
  u.evaluate = [](const Scenario& s, const Povm& e, int y, const DecisionStrategy& g, int nu) {
    const int d = g.decisions[static_cast<std::size_t>(y)];
    if (d != nu + 1) return UtilityScore{{0.0}};
    double p_group = 0.0;
    double p_joint = 0.0;
    for (int j = 0; j < e.outcomes(); ++j) {
      if (g.decisions[static_cast<std::size_t>(j)] == d) {
        p_group += outcome_probability(s, e, j);
        p_joint += joint_probability(s, e, j, nu);
      }
    }
    if (p_group <= tol::zero_outcome || p_joint <= 0.0) return UtilityScore{{0.0}};
    return UtilityScore{{std::log2(p_joint / p_group)}};
  };
  return u;
}

/// U = 1 for any conclusive decision; average = probability of announcing an
/// identification at all.  Useful as a tie-breaking secondary objective.
inline UtilityFunction conclusive_utility() {
  UtilityFunction u;
  u.name = "conclusive";
  u.evaluate = [](const Scenario&, const Povm&, int y, const DecisionStrategy& g, int) {
    return UtilityScore{{g.decisions[static_cast<std::size_t>(y)] != 0 ? 1.0 : 0.0}};
  };
  return u;
}

/// Dictionary-order combination: optimize `primary` first, then `secondary`
/// among primary-optimal strategies.
inline UtilityFunction lexicographic(UtilityFunction primary, UtilityFunction secondary) {
  UtilityFunction u;
  u.name = primary.name + "+" + secondary.name;
  u.arity = primary.arity + secondary.arity;
  u.dependence = (primary.dependence == StrategyDependence::FullStrategy ||
                  secondary.dependence == StrategyDependence::FullStrategy)
                     ? StrategyDependence::FullStrategy
                     : StrategyDependence::PerDecision;
  u.evaluate = [a = primary.evaluate, b = secondary.evaluate](
                   const Scenario& s, const Povm& e, int y, const DecisionStrategy& g,
                   int nu) {
    UtilityScore sa = a(s, e, y, g, nu);
    const UtilityScore sb = b(s, e, y, g, nu);
    sa.components.insert(sa.components.end(), sb.components.begin(), sb.components.end());
    return sa;
  };
  // No generic analytic construction for combinations; Auto mode enumerates.
  return u;
}

// --- averaging ---------------------------------------------------------------

/// Average a utility over the joint (outcome, state) distribution for a fixed
/// strategy.  Terms with zero joint probability are skipped, which also keeps
/// log-based utilities finite.
inline UtilityScore average_utility_fixed(const Scenario& s, const Povm& e,
                                          const UtilityFunction& u,
                                          const DecisionStrategy& g) {
  require_compatible(s, e);
  require_valid_strategy(g, e.outcomes(), s.size());
  UtilityScore total = UtilityScore::zero(u.arity);
  for (int y = 0; y < e.outcomes(); ++y) {
    for (int nu = 0; nu < s.size(); ++nu) {
      const double w = joint_probability(s, e, y, nu);
      if (w <= 0.0) continue;
      const UtilityScore sc = u.evaluate(s, e, y, g, nu);
      if (sc.arity() != u.arity) {
        throw ValidationError("utility '" + u.name + "' returned arity " +
                              std::to_string(sc.arity()) + ", declared " +
                              std::to_string(u.arity));
      }
      for (int k = 0; k < u.arity; ++k) {
        total.components[static_cast<std::size_t>(k)] +=
            w * sc.components[static_cast<std::size_t>(k)];
      }
    }
  }
  return total;
}

enum class StrategyMode { Auto, Enumerate, Analytic };

struct AveragedUtility {
  UtilityScore score;
  DecisionStrategy strategy;
  std::string mode;  // "analytic" or "enumerate"
};

/// Average utility of a measurement: max over decision strategies of the
/// fixed-strategy average.
///
/// Modes:
///  - Analytic: per-decision utilities use the per-outcome argmax
///    construction; FullStrategy utilities require an analytic_strategy hook.
///  - Enumerate: exhaustive scan of all (n+1)^m strategies (subject to cap),
///    compared exactly in dictionary order; ties keep the first strategy in
///    enumeration order.
///  - Auto: Analytic when available, otherwise Enumerate.
inline AveragedUtility average_utility(const Scenario& s, const Povm& e,
                                       const UtilityFunction& u,
                                       StrategyMode mode = StrategyMode::Auto,
                                       std::int64_t cap = StrategyEnumerator::default_cap) {
  require_compatible(s, e);
  const int m = e.outcomes();
  const int n = s.size();

  const bool analytic_available =
      u.dependence == StrategyDependence::PerDecision || static_cast<bool>(u.analytic_strategy);
  if (mode == StrategyMode::Analytic && !analytic_available) {
    throw ValidationError("average_utility: no analytic strategy construction for '" +
                          u.name + "'");
  }

  if (mode != StrategyMode::Enumerate && analytic_available) {
    if (u.dependence == StrategyDependence::PerDecision) {
      // Optimize each outcome independently: the score contribution of
      // outcome y depends only on the decision made on y.
      DecisionStrategy g;
      g.decisions.assign(static_cast<std::size_t>(m), 0);
      UtilityScore total = UtilityScore::zero(u.arity);
      DecisionStrategy probe = g;
      for (int y = 0; y < m; ++y) {
        UtilityScore best = UtilityScore::zero(u.arity);
        int best_d = 0;
        for (int d = 0; d <= n; ++d) {
          probe.decisions[static_cast<std::size_t>(y)] = d;
          UtilityScore cand = UtilityScore::zero(u.arity);
          for (int nu = 0; nu < n; ++nu) {
            const double w = joint_probability(s, e, y, nu);
            if (w <= 0.0) continue;
            const UtilityScore sc = u.evaluate(s, e, y, probe, nu);
            for (int k = 0; k < u.arity; ++k) {
              cand.components[static_cast<std::size_t>(k)] +=
                  w * sc.components[static_cast<std::size_t>(k)];
            }
          }
          if (d == 0 || lex_compare(cand, best, 0.0) > 0) {
            best = cand;
            best_d = d;
          }
        }
        probe.decisions[static_cast<std::size_t>(y)] = 0;
        g.decisions[static_cast<std::size_t>(y)] = best_d;
        for (int k = 0; k < u.arity; ++k) {
          total.components[static_cast<std::size_t>(k)] +=
              best.components[static_cast<std::size_t>(k)];
        }
      }
      return AveragedUtility{std::move(total), std::move(g), "analytic"};
    }
    DecisionStrategy g = u.analytic_strategy(s, e);
    UtilityScore score = average_utility_fixed(s, e, u, g);
    return AveragedUtility{std::move(score), std::move(g), "analytic"};
  }

  // Exhaustive enumeration with exact dictionary-order comparison.
  StrategyEnumerator en(m, n, true, cap);
  AveragedUtility best;
  bool have_best = false;
  while (auto g = en.next()) {
    UtilityScore score = average_utility_fixed(s, e, u, *g);
    if (!have_best || lex_compare(score, best.score, 0.0) > 0) {
      best = AveragedUtility{std::move(score), std::move(*g), "enumerate"};
      have_best = true;
    }
  }
  return best;
}

// --- registry ----------------------------------------------------------------

/// Parse a utility name as used by the CLI.  Single names:
///   p-success | min-error, total-confidence | max-confidence,
///   log-posterior | neg-conditional-entropy, mutual-info,
///   decision-mutual-info, conclusive.
/// "a+b" builds the dictionary-order combination of a then b.
inline UtilityFunction make_utility(const std::string& name) {
  const auto plus = name.find('+');
  if (plus != std::string::npos) {
    return lexicographic(make_utility(name.substr(0, plus)),
                         make_utility(name.substr(plus + 1)));
  }
  if (name == "p-success" || name == "min-error") return min_error_utility();
  if (name == "total-confidence" || name == "max-confidence") return max_confidence_utility();
  if (name == "log-posterior" || name == "neg-conditional-entropy") return log_posterior_utility();
  if (name == "mutual-info") return mutual_information_utility();
  if (name == "decision-mutual-info") return decision_mutual_information_utility();
  if (name == "conclusive") return conclusive_utility();
  throw ValidationError(
      "unknown utility '" + name +
      "'; expected p-success, total-confidence, log-posterior, mutual-info, "
      "decision-mutual-info, conclusive, or a '+'-combination");
}

}  // namespace qsd
