// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT

#include <qsd/scenario.hpp>

#include <qsd/fixtures.hpp>
#include <qsd/random.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_helpers.hpp"

using namespace qsd;
namespace fx = qsd::fixtures;
using qsd::testing::max_abs_diff;

namespace {

// Binary entropy in bits, independent of the library implementation.
double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

TEST_CASE("DensityMatrix validation", "[scenario]") {
  CHECK_NOTHROW(DensityMatrix(Matrix::Identity(2, 2) * 0.5));
  // Wrong trace.
  CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(2, 2)), ValidationError);
  // Indefinite.
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(m), ValidationError);
  // Non-Hermitian.
  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 0) = 1.0;
  nh(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix(nh), ValidationError);
}

TEST_CASE("Scenario validation", "[scenario]") {
  const DensityMatrix qubit(0.5 * Matrix::Identity(2, 2));
  const DensityMatrix qutrit(Matrix::Identity(3, 3) / 3.0);
  RealVector q(2);
  q << 0.5, 0.5;
  CHECK_THROWS_AS(Scenario({qubit, qutrit}, q), ValidationError);

  RealVector bad_sum(2);
  bad_sum << 0.6, 0.6;
  CHECK_THROWS_AS(Scenario({qubit, qubit}, bad_sum), ValidationError);

  RealVector negative(2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(Scenario({qubit, qubit}, negative), ValidationError);

  RealVector one(1);
  one << 1.0;
  CHECK_THROWS_AS(Scenario({qubit}, one), ValidationError);
}

TEST_CASE("Povm validation", "[scenario]") {
  // Does not sum to identity.
  CHECK_THROWS_AS(Povm({0.5 * Matrix::Identity(2, 2), 0.4 * Matrix::Identity(2, 2)}),
                  ValidationError);
  // Indefinite element.
  Matrix up = Matrix::Zero(2, 2);
  up(0, 0) = 1.5;
  up(1, 1) = 0.5;
  Matrix down = Matrix::Identity(2, 2) - up;
  CHECK_THROWS_AS(Povm({up, down}), ValidationError);
  // Trivial measurement is fine.
  CHECK_NOTHROW(Povm({Matrix::Identity(3, 3)}));
}

TEST_CASE("qutrit family bound", "[scenario]") {
  // a2 at its maximum keeps the remainder element on the PSD boundary.
  const double a1 = 0.3;
  const double a2_max = fx::qutrit_a2_max(a1);
  CHECK(a2_max == Catch::Approx(2.0 - 2.0 / 1.7).margin(1e-15));
  CHECK_NOTHROW(fx::qutrit_family_a(a1, a2_max));
  CHECK_THROWS_AS(fx::qutrit_family_a(a1, a2_max + 1e-6), ValidationError);
  CHECK_NOTHROW(fx::qutrit_family_a(1.0, 0.0));
  CHECK_THROWS_AS(fx::qutrit_family_a(1.0, 1e-6), ValidationError);
}

TEST_CASE("qutrit scenario reference probabilities", "[scenario]") {
  const Scenario s = fx::qutrit_pair();

  Matrix avg_expected = Matrix::Zero(3, 3);
  avg_expected(0, 0) = 0.25;
  avg_expected(1, 1) = 0.5;
  avg_expected(1, 2) = 0.25;
  avg_expected(2, 1) = 0.25;
  avg_expected(2, 2) = 0.25;
  CHECK(max_abs_diff(s.average_state(), avg_expected) <= 1e-12);

  // Weights of the two conclusive directions under the average state.
  CHECK(trace_product(s.average_state(), fx::projector(fx::qutrit_minus())) ==
        Catch::Approx(0.125).margin(1e-12));
  CHECK(trace_product(s.average_state(), fx::projector(fx::basis_ket(3, 2))) ==
        Catch::Approx(0.25).margin(1e-12));

  // Inconclusive probability of the family: p(A0) = 1 - a1/8 - a2/4.
  auto p_inconclusive = [&](double a1, double a2) {
    return outcome_probability(s, fx::qutrit_family_a(a1, a2), 2);
  };
  CHECK(p_inconclusive(0.5, 0.5) == Catch::Approx(13.0 / 16.0).margin(1e-12));
  CHECK(p_inconclusive(1.0, 0.0) == Catch::Approx(7.0 / 8.0).margin(1e-12));
  // Outcome 0 at a1 = 1 fires with probability 1/8.
  CHECK(outcome_probability(s, fx::qutrit_family_a(1.0, 0.0), 0) ==
        Catch::Approx(0.125).margin(1e-12));

  // The projective endpoint: inconclusive outcome has probability 1/2 and a
  // maximally uninformative posterior.
  const Povm b = fx::qutrit_family_b();
  CHECK(outcome_probability(s, b, 2) == Catch::Approx(0.5).margin(1e-12));
  const RealVector post_b0 = posterior(s, b, 2);
  CHECK(post_b0(0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(post_b0(1) == Catch::Approx(0.5).margin(1e-12));

  // The conclusive outcomes identify their state with certainty.
  CHECK(posterior(s, b, 0)(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(posterior(s, b, 1)(1) == Catch::Approx(1.0).margin(1e-12));
  const Povm a = fx::qutrit_family_a(0.5, 0.5);
  CHECK(posterior(s, a, 0)(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(posterior(s, a, 1)(1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("biased qubit reference probabilities", "[scenario]") {
  const Scenario s = fx::biased_qubit_pair();
  const Povm e = fx::qubit_projective();

  // Exact fractions: p(0) = 47/60, p(1) = 13/60.
  CHECK(outcome_probability(s, e, 0) == Catch::Approx(47.0 / 60.0).margin(1e-12));
  CHECK(outcome_probability(s, e, 1) == Catch::Approx(13.0 / 60.0).margin(1e-12));
  CHECK(joint_probability(s, e, 0, 0) == Catch::Approx(17.0 / 24.0).margin(1e-12));
  CHECK(joint_probability(s, e, 0, 1) == Catch::Approx(3.0 / 40.0).margin(1e-12));

  // Posteriors: (85/94, 9/94) after outcome 0 and (17/26, 9/26) after 1.
  const RealVector p0 = posterior(s, e, 0);
  const RealVector p1 = posterior(s, e, 1);
  CHECK(p0(0) == Catch::Approx(85.0 / 94.0).margin(1e-12));
  CHECK(p0(1) == Catch::Approx(9.0 / 94.0).margin(1e-12));
  CHECK(p1(0) == Catch::Approx(17.0 / 26.0).margin(1e-12));
  CHECK(p1(1) == Catch::Approx(9.0 / 26.0).margin(1e-12));
  CHECK(p1(0) == Catch::Approx(0.653846).margin(1e-6));
}

TEST_CASE("entropy and information references", "[scenario]") {
  const Scenario s = fx::biased_qubit_pair();
  const Povm e = fx::qubit_projective();

  CHECK(entropy((RealVector(2) << 0.5, 0.5).finished()) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(prior_entropy(s) == Catch::Approx(h2(0.85)).margin(1e-12));
  CHECK(prior_entropy(s) == Catch::Approx(0.609840).margin(1e-6));

  // Conditional entropy from hand-computed posteriors.
  const double expected_cond =
      (47.0 / 60.0) * h2(85.0 / 94.0) + (13.0 / 60.0) * h2(17.0 / 26.0);
  CHECK(conditional_entropy(s, e) == Catch::Approx(expected_cond).margin(1e-12));

  // Mutual information via the joint-sum formula, an independent path.
  double mi_direct = 0.0;
  for (int y = 0; y < e.outcomes(); ++y) {
    for (int nu = 0; nu < s.size(); ++nu) {
      const double joint = joint_probability(s, e, y, nu);
      if (joint <= 0.0) continue;
      mi_direct += joint * std::log2(joint / (outcome_probability(s, e, y) * s.prior(nu)));
    }
  }
  CHECK(mutual_information(s, e) == Catch::Approx(mi_direct).margin(1e-12));
  CHECK(mutual_information(s, e) > 0.0);
}

TEST_CASE("zero-probability outcomes yield the sentinel posterior", "[scenario]") {
  const Scenario s = fx::qutrit_pair();
  // A POVM with an element orthogonal to both states' support intersection:
  // the zero matrix is a degenerate but valid element.
  const Povm e({Matrix::Zero(3, 3), Matrix::Identity(3, 3)});
  const RealVector p = posterior(s, e, 0);
  CHECK(is_undefined_distribution(p));
  CHECK(outcome_probability(s, e, 0) <= tol::zero_outcome);
  // Undefined outcomes contribute nothing to the conditional entropy.
  CHECK(conditional_entropy(s, e) == Catch::Approx(prior_entropy(s)).margin(1e-12));
}

TEST_CASE("random scenarios and measurements are normalized", "[scenario][random]") {
  Rng rng(20260501);
  for (int rep = 0; rep < 30; ++rep) {
    const int dim = 2 + rep % 3;
    const int n = 2 + rep % 2;
    const int m = 2 + rep % 4;
    const Scenario s = random_scenario(n, dim, rng);
    const Povm e = random_povm(m, dim, rng);

    CHECK(s.priors().sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.average_state().trace().real() == Catch::Approx(1.0).margin(1e-10));

    double total = 0.0;
    for (int y = 0; y < m; ++y) {
      const double py = outcome_probability(s, e, y);
      CHECK(py >= 0.0);
      total += py;
      const RealVector post = posterior(s, e, y);
      if (!is_undefined_distribution(post)) {
        CHECK(post.sum() == Catch::Approx(1.0).margin(1e-10));
        CHECK(post.minCoeff() >= 0.0);
      }
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-10));

    // Information bounds.
    const double mi = mutual_information(s, e);
    CHECK(mi >= -1e-10);
    CHECK(mi <= prior_entropy(s) + 1e-9);
    CHECK(mi <= std::log2(static_cast<double>(m)) + 1e-9);
  }
}

TEST_CASE("sub-seed derivation is stable and spread out", "[random]") {
  const std::uint64_t master = 42;
  CHECK(derive_seed(master, 0) == derive_seed(master, 0));
  CHECK(derive_seed(master, 0) != derive_seed(master, 1));
  CHECK(derive_seed(master, 0) != derive_seed(master + 1, 0));
  // Equal sub-seeds reproduce the same draw stream exactly.
  Rng a(derive_seed(master, 7));
  Rng b(derive_seed(master, 7));
  const RealVector qa = random_prior(4, a);
  const RealVector qb = random_prior(4, b);
  CHECK((qa - qb).cwiseAbs().maxCoeff() == 0.0);
}
