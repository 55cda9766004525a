#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bmolab/geometry.hpp"
#include "bmolab/util.hpp"

using namespace bmolab;

TEST_CASE("hull_upper at vertices and chord midpoints") {
  CombDomain d(1.0, 1.0);
  CHECK(d.hull_upper(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.hull_upper(0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(d.hull_upper(-1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("hull_upper vertex identity and convexity") {
  for (auto [lam, eps] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.1}, std::pair{0.3, 0.7}}) {
    CombDomain d(lam, eps);
    for (long long n = -5; n <= 5; ++n)
      CHECK(d.hull_upper(lam * n) == doctest::Approx(d.ray_height(n)).epsilon(1e-14));
    std::mt19937_64 rng = seeded_rng(7, 0);
    std::uniform_real_distribution<double> u(-3.0 * lam, 3.0 * lam);
    for (int k = 0; k < 500; ++k) {
      double x = u(rng), z = u(rng);
      if (x > z) std::swap(x, z);
      if (z - x < 1e-6) continue;
      double y = 0.5 * (x + z);
      double secant = 0.5 * (d.hull_upper(x) + d.hull_upper(z));
      CHECK(d.hull_upper(y) <= secant + 1e-12);
    }
  }
}

TEST_CASE("hull lies above the shifted parabola") {
  CombDomain d(0.7, 0.4);
  for (int k = -100; k <= 100; ++k) {
    double x = 0.03 * k;
    CHECK(d.hull_upper(x) >= x * x + 0.4 * 0.4 - 0.7 * 0.7 / 4.0 - 1e-12);
  }
}

TEST_CASE("classify examples") {
  CombDomain d(1.0, 1.0);
  CHECK(d.classify({0.5, 0.25}).region == Region::OnFixedBoundary);
  auto ray = d.classify({0.0, 3.0});
  CHECK(ray.region == Region::OnRay);
  CHECK(ray.n == 0);
  auto chord = d.classify({0.5, 1.5});
  CHECK(chord.region == Region::OnChord);
  CHECK(chord.n == 0);
  CHECK(d.classify({0.5, 0.5}).region == Region::FreeBelowHull);
  CHECK(d.classify({0.5, 1.8}).region == Region::InteriorHullComponent);
  CHECK(d.classify({0.5, 0.1}).region == Region::Outside);
}

TEST_CASE("classify is covariant under the parabolic lattice shift") {
  CombDomain d(0.8, 0.6);
  double lam = 0.8;
  std::mt19937_64 rng = seeded_rng(11, 0);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    PlanePoint p{ux(rng), 0.0};
    p.x2 = p.x1 * p.x1 + uy(rng);
    PlanePoint q{p.x1 + lam, p.x2 + 2.0 * p.x1 * lam + lam * lam};
    RegionTag tp = d.classify(p), tq = d.classify(q);
    CHECK(tp.region == tq.region);
    if (tp.region == Region::OnRay || tp.region == Region::OnChord ||
        tp.region == Region::InteriorHullComponent)
      CHECK(tq.n == tp.n + 1);
  }
}

TEST_CASE("segment_clearance examples") {
  CombDomain d(1.0, 1.0);
  CHECK(d.segment_clearance({-1.0, 1.0}, {1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.segment_clearance({0.0, 0.0}, {0.2, 0.04}) < 0.0);
  CHECK(d.segment_clearance({0.0, 3.0}, {1.0, 3.0}) > 0.0);
}

TEST_CASE("segment_clearance symmetry and degenerate segments") {
  CombDomain d(0.6, 0.9);
  std::mt19937_64 rng = seeded_rng(13, 0);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    PlanePoint p{ux(rng), uy(rng)}, q{ux(rng), uy(rng)};
    double c1 = d.segment_clearance(p, q), c2 = d.segment_clearance(q, p);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-14));
    CHECK(d.segment_clearance(p, p) ==
          doctest::Approx(p.x2 - d.hull_upper(p.x1)).epsilon(1e-14));
  }
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(CombDomain(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CombDomain(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CombDomain(1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("comb axioms all pass") {
  for (auto [lam, eps] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.1}}) {
    AxiomReport rep = check_axioms(CombDomain(lam, eps));
    CHECK(rep.all_pass);
    for (const auto& c : rep.checks) {
      CHECK(c.pass);
      CHECK(!c.witness.empty());
    }
  }
}

TEST_CASE("two-disk fails exactly the supporting-line axiom") {
  AxiomReport rep = check_axioms(TwoDiskDomain{});
  CHECK(!rep.all_pass);
  for (const auto& c : rep.checks) {
    if (c.axiom == 5)
      CHECK(!c.pass);
    else
      CHECK(c.pass);
  }
}

TEST_CASE("two-disk: the vertical average segment clears the obstacles by 0.1") {
  TwoDiskDomain d;
  double da = segment_segment_distance({0.0, -1.0}, {0.0, 1.0}, d.center_a, d.center_a);
  double db = segment_segment_distance({0.0, -1.0}, {0.0, 1.0}, d.center_b, d.center_b);
  CHECK(da - d.obstacle_radius == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(db - d.obstacle_radius == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d.in_hull({0.0, 0.39}));
  CHECK(!d.in_hull({0.0, 0.41}));
  CHECK(!d.in_hull({0.0, -0.8}));
}
