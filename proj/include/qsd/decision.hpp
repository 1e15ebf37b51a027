// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// Decision strategies over measurement outcomes.  A strategy assigns each
// outcome a decision: 0 means "inconclusive / no identification", d in
// [1, n] means "the prepared state was state d-1".  The module provides
// exhaustive enumeration, the two standard figures of merit (success
// probability and total confidence), their analytic optimal strategies, and
// outcome merging by shared decision.

#pragma once

#include <qsd/scenario.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsd {

struct DecisionStrategy {
  std::vector<int> decisions;

  int outcomes() const { return static_cast<int>(decisions.size()); }
  bool operator==(const DecisionStrategy&) const = default;
};

inline void require_valid_strategy(const DecisionStrategy& g, int outcomes, int messages) {
  if (g.outcomes() != outcomes) {
    throw ValidationError("strategy covers " + std::to_string(g.outcomes()) +
                          " outcomes, measurement has " + std::to_string(outcomes));
  }
  for (int d : g.decisions) {
    if (d < 0 || d > messages) {
      throw ValidationError("strategy decision " + std::to_string(d) +
                            " outside [0, " + std::to_string(messages) + "]");
    }
  }
}

/// Streams all decision strategies in lexicographic order (last outcome
/// varies fastest).  Construction fails if the strategy space exceeds `cap`.
class StrategyEnumerator {
 public:
  static constexpr std::int64_t default_cap = 10'000'000;

  StrategyEnumerator(int outcomes, int messages, bool allow_inconclusive = true,
                     std::int64_t cap = default_cap)
      : outcomes_(outcomes),
        base_(messages + (allow_inconclusive ? 1 : 0)),
        lo_(allow_inconclusive ? 0 : 1) {
    if (outcomes <= 0 || messages <= 0) {
      throw ValidationError("StrategyEnumerator: outcomes and messages must be positive");
    }
    if (cap <= 0) throw ValidationError("StrategyEnumerator: cap must be positive");
    total_ = 1;
    for (int i = 0; i < outcomes_; ++i) {
      if (total_ > cap / base_) {
        throw ValidationError("StrategyEnumerator: " + std::to_string(base_) + "^" +
                              std::to_string(outcomes_) + " strategies exceed cap " +
                              std::to_string(cap));
      }
      total_ *= base_;
    }
    current_.decisions.assign(static_cast<std::size_t>(outcomes_), lo_);
  }

  std::int64_t total() const { return total_; }

  std::optional<DecisionStrategy> next() {
    if (done_) return std::nullopt;
    DecisionStrategy out = current_;
    int i = outcomes_ - 1;
    for (; i >= 0; --i) {
      if (current_.decisions[static_cast<std::size_t>(i)] + 1 < lo_ + base_) {
        ++current_.decisions[static_cast<std::size_t>(i)];
        break;
      }
      current_.decisions[static_cast<std::size_t>(i)] = lo_;
    }
    if (i < 0) done_ = true;
    return out;
  }

 private:
  int outcomes_;
  int base_;
  int lo_;
  std::int64_t total_ = 0;
  DecisionStrategy current_;
  bool done_ = false;
};

inline std::vector<DecisionStrategy> enumerate_strategies(
    int outcomes, int messages, bool allow_inconclusive = true,
    std::int64_t cap = StrategyEnumerator::default_cap) {
  StrategyEnumerator en(outcomes, messages, allow_inconclusive, cap);
  std::vector<DecisionStrategy> all;
  all.reserve(static_cast<std::size_t>(en.total()));
  while (auto g = en.next()) all.push_back(std::move(*g));
  return all;
}

/// Probability of a correct identification: sum over conclusive outcomes of
/// the joint probability that decision d was made and state d-1 was sent.
inline double success_probability(const Scenario& s, const Povm& e,
                                  const DecisionStrategy& g) {
  require_compatible(s, e);
  require_valid_strategy(g, e.outcomes(), s.size());
  double p = 0.0;
  for (int y = 0; y < e.outcomes(); ++y) {
    const int d = g.decisions[static_cast<std::size_t>(y)];
    if (d >= 1) p += joint_probability(s, e, y, d - 1);
  }
  return p;
}

/// Total confidence: sum over used decisions d of p(state d-1 | decision d),
/// where decision d aggregates all outcomes the strategy maps to it.
/// Decisions whose aggregated probability is <= tol::zero_outcome are
/// skipped (their confidence is undefined).
inline double total_confidence(const Scenario& s, const Povm& e,
                               const DecisionStrategy& g) {
  require_compatible(s, e);
  require_valid_strategy(g, e.outcomes(), s.size());
  const int n = s.size();
  std::vector<double> numer(static_cast<std::size_t>(n), 0.0);
  std::vector<double> denom(static_cast<std::size_t>(n), 0.0);
  for (int y = 0; y < e.outcomes(); ++y) {
    const int d = g.decisions[static_cast<std::size_t>(y)];
    if (d < 1) continue;
    numer[static_cast<std::size_t>(d - 1)] += joint_probability(s, e, y, d - 1);
    denom[static_cast<std::size_t>(d - 1)] += outcome_probability(s, e, y);
  }
  double conf = 0.0;
  for (int d = 0; d < n; ++d) {
    if (denom[static_cast<std::size_t>(d)] <= tol::zero_outcome) continue;
    conf += numer[static_cast<std::size_t>(d)] / denom[static_cast<std::size_t>(d)];
  }
  return conf;
}

/// Optimal strategy for success probability: pick the posterior argmax for
/// every outcome (ties break to the smallest state index; zero-probability
/// outcomes are marked inconclusive).
inline DecisionStrategy optimal_strategy_min_error(const Scenario& s, const Povm& e) {
  require_compatible(s, e);
  DecisionStrategy g;
  g.decisions.resize(static_cast<std::size_t>(e.outcomes()));
  for (int y = 0; y < e.outcomes(); ++y) {
    int best = -1;
    double best_joint = tol::zero_outcome;
    for (int nu = 0; nu < s.size(); ++nu) {
      const double j = joint_probability(s, e, y, nu);
      if (j > best_joint) {
        best_joint = j;
        best = nu;
      }
    }
    g.decisions[static_cast<std::size_t>(y)] = best + 1;  // -1 -> 0 (inconclusive)
  }
  return g;
}

/// Optimal strategy for total confidence.  Merging outcomes into one decision
/// can never beat the best single outcome for that decision, so an optimal
/// strategy assigns at most one outcome to each decision; this searches all
/// injective partial assignments (bounded by `cap` candidates).  Ties prefer
/// the lexicographically smallest decision vector.
inline DecisionStrategy optimal_strategy_max_confidence(
    const Scenario& s, const Povm& e, std::int64_t cap = 1'000'000) {
  require_compatible(s, e);
  const int m = e.outcomes();
  const int n = s.size();

  // Candidate count: sum_k C(n, k) * P(m, k).
  double count = 0.0;
  double choose = 1.0;
  for (int k = 0; k <= std::min(m, n); ++k) {
    double perm = 1.0;
    for (int i = 0; i < k; ++i) perm *= static_cast<double>(m - i);
    count += choose * perm;
    choose = choose * static_cast<double>(n - k) / static_cast<double>(k + 1);
    if (count > static_cast<double>(cap)) {
      throw ValidationError("optimal_strategy_max_confidence: assignment space exceeds cap");
    }
  }

  // Confidence of assigning outcome y to decision nu+1.
  std::vector<std::vector<double>> conf(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int y = 0; y < m; ++y) {
    const double py = outcome_probability(s, e, y);
    if (py <= tol::zero_outcome) continue;
    for (int nu = 0; nu < n; ++nu) {
      conf[static_cast<std::size_t>(y)][static_cast<std::size_t>(nu)] =
          joint_probability(s, e, y, nu) / py;
    }
  }

  DecisionStrategy current;
  current.decisions.assign(static_cast<std::size_t>(m), 0);
  DecisionStrategy best = current;
  double best_score = 0.0;
  bool have_best = false;

  // Depth-first over decisions 1..n: leave unassigned or pick an unused outcome.
  auto search = [&](auto&& self, int nu, double score) -> void {
    if (nu == n) {
      if (!have_best || score > best_score + 1e-12 ||
          (std::abs(score - best_score) <= 1e-12 && current.decisions < best.decisions)) {
        best = current;
        best_score = score;
        have_best = true;
      }
      return;
    }
    self(self, nu + 1, score);  // decision nu+1 unused
    for (int y = 0; y < m; ++y) {
      if (current.decisions[static_cast<std::size_t>(y)] != 0) continue;
      current.decisions[static_cast<std::size_t>(y)] = nu + 1;
      self(self, nu + 1, score + conf[static_cast<std::size_t>(y)][static_cast<std::size_t>(nu)]);
      current.decisions[static_cast<std::size_t>(y)] = 0;
    }
  };
  search(search, 0, 0.0);
  return best;
}

/// Merge POVM outcomes that share a decision.  Groups are emitted in
/// ascending decision order with the inconclusive group (if present) last;
/// the returned strategy assigns each merged element its group's decision.
struct MergeResult {
  Povm povm;
  DecisionStrategy strategy;
};

inline MergeResult merge_by_strategy(const Povm& e, const DecisionStrategy& g,
                                     int messages) {
  require_valid_strategy(g, e.outcomes(), messages);
  const Eigen::Index d = e.element(0).rows();

  std::vector<Matrix> elements;
  std::vector<int> decisions;
  for (int dec = 1; dec <= messages; ++dec) {
    Matrix sum = Matrix::Zero(d, d);
    bool used = false;
    for (int y = 0; y < e.outcomes(); ++y) {
      if (g.decisions[static_cast<std::size_t>(y)] == dec) {
        sum += e.element(y);
        used = true;
      }
    }
    if (used) {
      elements.push_back(std::move(sum));
      decisions.push_back(dec);
    }
  }
  Matrix inconclusive = Matrix::Zero(d, d);
  bool any_inconclusive = false;
  for (int y = 0; y < e.outcomes(); ++y) {
    if (g.decisions[static_cast<std::size_t>(y)] == 0) {
      inconclusive += e.element(y);
      any_inconclusive = true;
    }
  }
  if (any_inconclusive) {
    elements.push_back(std::move(inconclusive));
    decisions.push_back(0);
  }
  return MergeResult{Povm(std::move(elements)), DecisionStrategy{std::move(decisions)}};
}

}  // namespace qsd
