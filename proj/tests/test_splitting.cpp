#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bmolab/extremal.hpp"
#include "bmolab/splitting.hpp"
#include "bmolab/util.hpp"
#include "oracles.hpp"

using namespace bmolab;

TEST_CASE("split of a constant-valued stretch returns the midpoint") {
  StepFunction f(Space::Interval, {{0.3, 0.2}, {0.3, 0.2}, {0.4, 0.2}});
  PlaneStepFunction psi = lift(f);
  CombDomain d(1.0, 1.0);
  SplitResult s = split(psi, 0.0, 1.0, d);
  CHECK(s.t0 == doctest::Approx(0.5));
  CHECK(s.clearance < 0.0);
  CHECK(s.kind == SplitCase::A);
}

TEST_CASE("split at a ray tip: the symmetric two-valued function") {
  // the global average sits exactly at the first ray tip
  StepFunction f(Space::Interval, {{0.5, -1.0}, {0.5, 1.0}});
  PlaneStepFunction psi = lift(f);
  CombDomain d(1.0, 1.0);
  SplitResult s = split(psi, 0.0, 1.0, d);
  CHECK(s.clearance <= 1e-9);
  CHECK(s.recombination_error <= 1e-12);
}

TEST_CASE("split of the extremal at the root stays on the first chord line") {
  // the prefix curve of the extremal runs along the hull chords, so both
  // child averages of any admissible root split lie on x2 = x1 + eps^2
  ExtremalSpec spec{1.0, 1.0, 25};
  PlaneStepFunction psi = lift(build_extremal(spec));
  CombDomain d(1.0, 1.0);
  SplitResult s = split(psi, 0.0, 1.0, d);
  CHECK(s.clearance <= 1e-9);
  CHECK(s.recombination_error <= 1e-12);
  CHECK(std::abs(s.left_avg.x2 - (s.left_avg.x1 + 1.0)) <= 1e-8);
  CHECK(std::abs(s.right_avg.x2 - (s.right_avg.x1 + 1.0)) <= 1e-8);
}

TEST_CASE("split rejects parents inside the hull") {
  // averages (0, 2.2) with lattice mean and variance above the ray base
  StepFunction f(Space::Interval, {{0.5, -1.4832396974191326}, {0.5, 1.4832396974191326}});
  PlaneStepFunction psi = lift(f);
  CombDomain d(1.0, 1.0);
  PlanePoint mean = psi.average(0.0, 1.0);
  REQUIRE(d.classify(mean).region == Region::OnRay);
  REQUIRE(mean.x2 > d.ray_height(0) + d.snap_tol());
  CHECK_THROWS_AS(split(psi, 0.0, 1.0, d), std::invalid_argument);
}

TEST_CASE("random member splits satisfy the chord postcondition") {
  std::mt19937_64 rng = seeded_rng(61, 0);
  CombDomain d(1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    StepFunction f = testing::random_member(rng, d, 8);
    PlaneStepFunction psi = lift(f);
    SplitResult s = split(psi, 0.0, 1.0, d);
    CHECK(s.clearance <= 1e-9);
    CHECK(s.recombination_error <= 1e-12);
    CHECK(s.t0 > 0.0);
    CHECK(s.t0 < 1.0);
  }
}

TEST_CASE("induction on a constant function is a single tight leaf") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  StepFunction f = StepFunction::constant(0.3);
  MainInequalityReport rep = verify_main_inequality(f, d, ev);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.trace.leaf_mass == doctest::Approx(1.0));
  CHECK(rep.b0 == doctest::Approx(std::exp(0.5 * 0.3)).epsilon(1e-13));
  CHECK(rep.margin == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("induction on the extremal is nearly tight") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  int n = default_piece_count(1.0, 1.0);
  StepFunction f = build_extremal({1.0, 1.0, n});
  MainInequalityReport rep = verify_main_inequality(f, d, ev, 80, 1e-13);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.margin >= -1e-10);
  CHECK(rep.margin <= 1e-6);
  CHECK(rep.trace.worst_clearance <= 1e-9);
  CHECK(rep.trace.worst_recombination <= 1e-12);
  // Bellman sums decrease along the generations
  for (size_t k = 1; k < rep.trace.generations.size(); ++k)
    CHECK(rep.trace.generations[k].bellman_sum <=
          rep.trace.generations[k - 1].bellman_sum + 1e-9);
}

TEST_CASE("truncated extremal margin matches the exact closure defect") {
  // For N pieces with the tail closed by a constant, the distance between
  // <e^{mu phi}> and the full series is a^N e^{mu v_N} (r - a)/(1 - r).
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  ExtremalSpec spec{1.0, 1.0, 20};
  StepFunction f = build_extremal(spec);
  MainInequalityReport rep = verify_main_inequality(f, d, ev, 80, 1e-13);
  double a = spec.a();
  double r = a * std::exp(0.5);
  double defect = std::pow(a, 20) * std::exp(0.5 * spec.value(20)) * (r - a) / (1.0 - r);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.margin == doctest::Approx(defect).epsilon(1e-3));
}

TEST_CASE("non-members are reported as skipped with a witness") {
  CombDomain d(1.0, 0.5);
  BellmanEvaluator ev(d, 0.5);
  StepFunction f(Space::Interval, {{0.5, -1.0}, {0.5, 1.0}});
  MainInequalityReport rep = verify_main_inequality(f, d, ev);
  CHECK(rep.verdict == Verdict::Skipped);
  CHECK(rep.membership.witness.has_value());
}

TEST_CASE("main inequality holds across a random member population") {
  std::mt19937_64 rng = seeded_rng(62, 0);
  CombDomain d(0.5, 1.0);
  BellmanEvaluator ev(d, 0.5 * mu_critical(0.5, 1.0));
  for (int trial = 0; trial < 40; ++trial) {
    StepFunction f = testing::random_member(rng, d, 6);
    MainInequalityReport rep = verify_main_inequality(f, d, ev);
    INFO("trial ", trial, " margin=", rep.margin, " reason=", rep.reason);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.margin >= -1e-8);
    CHECK(rep.trace.worst_clearance <= 1e-9);
    CHECK(rep.trace.worst_recombination <= 1e-12);
  }
}

TEST_CASE("circle members pass through the mean theorem path") {
  // circle membership guarantees the global average avoids the hull interior,
  // so the induction never skips on root position
  std::mt19937_64 rng = seeded_rng(63, 0);
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.4);
  int done = 0;
  for (int trial = 0; trial < 200 && done < 20; ++trial) {
    StepFunction f =
        testing::random_step_function(rng, 6, 0.9 * d.epsilon(), 0.5, Space::Circle);
    Membership m = membership_A(f, d, false);
    if (!m.member) continue;
    CHECK(m.circle_mean_ok);
    MainInequalityReport rep = verify_main_inequality(f, d, ev);
    INFO("trial ", trial, " reason=", rep.reason);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.root_ok);
    CHECK(rep.margin >= -1e-8);
    ++done;
  }
  CHECK(done >= 10);
}

TEST_CASE("mass and average recombine exactly along a full induction") {
  std::mt19937_64 rng = seeded_rng(64, 0);
  CombDomain d(1.0, 0.8);
  BellmanEvaluator ev(d, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    StepFunction f = testing::random_member(rng, d, 8);
    InductionTrace tr = induct(lift(f), d, ev, 48, 1e-10);
    CHECK(tr.worst_recombination <= 1e-12);
    CHECK(tr.leaf_mass + tr.frontier_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("final inequality brackets the completed sums") {
  // leaves plus the frontier's cheapest boundary reach stay below the last
  // Bellman sum, which stays below the starting one
  std::mt19937_64 rng = seeded_rng(65, 0);
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.4);
  for (int trial = 0; trial < 15; ++trial) {
    StepFunction f = testing::random_member(rng, d, 8);
    InductionTrace tr = induct(lift(f), d, ev, 48, 1e-10);
    REQUIRE(!tr.generations.empty());
    double b_last = tr.generations.back().bellman_sum;
    double b_0 = tr.generations.front().bellman_sum;
    double inf_f = std::exp(0.4 * f.min_value());
    CHECK(tr.final_sum_f + tr.frontier_mass * inf_f <= b_last + 1e-9);
    CHECK(b_last <= b_0 + 1e-8);
    if (tr.frontier_mass < 1e-6) {
      double sup_f = std::exp(0.4 * f.max_value());
      KahanSum exact;
      for (const Piece& p : f.pieces()) exact.add(p.length * std::exp(0.4 * p.value));
      CHECK(exact.value() <= b_0 + 1e-6 * sup_f + 1e-9);
    }
  }
}
