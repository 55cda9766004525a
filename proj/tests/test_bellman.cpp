#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bmolab/bellman.hpp"
#include "bmolab/extremal.hpp"
#include "bmolab/util.hpp"

using namespace bmolab;

TEST_CASE("mu_critical closed form and limits") {
  CHECK(mu_critical(1.0, 1.0) ==
        doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-14));

  // lambda -> 0 at eps = 0.5 approaches 1/eps = 2
  double prev = 0.0;
  for (double lam : {0.1, 0.01, 0.001}) {
    double mc = mu_critical(lam, 0.5);
    CHECK(mc > prev);
    prev = mc;
  }
  CHECK(std::abs(mu_critical(0.001, 0.5) - 2.0) < 1e-5);

  // eps -> infinity at fixed lambda: decreasing to 0
  double last = mu_critical(1.0, 1.0);
  for (double eps : {2.0, 8.0, 64.0, 1024.0}) {
    double mc = mu_critical(1.0, eps);
    CHECK(mc < last);
    last = mc;
  }
  CHECK(last < 1e-2);

  CHECK_THROWS_AS(mu_critical(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("mu_critical agrees with the bisection oracle on the denominator zero") {
  std::mt19937_64 rng = seeded_rng(41, 0);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int k = 0; k < 20; ++k) {
    double lam = u(rng), eps = u(rng);
    double s = std::sqrt(lam * lam / 4.0 + eps * eps);
    auto denom = [&](double mu) {
      return lam / 2.0 + s + (lam / 2.0 - s) * std::exp(lam * mu);
    };
    double lo = 0.0, hi = 1.0;
    while (denom(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (denom(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(mu_critical(lam, eps) - 0.5 * (lo + hi)) <= 1e-10);
  }
}

TEST_CASE("the extremal ratio satisfies a*e^{lambda*mu_crit} = 1") {
  for (auto [lam, eps] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.0}, std::pair{0.3, 0.7}}) {
    BellmanEvaluator ev(CombDomain(lam, eps), 0.5 * mu_critical(lam, eps));
    CHECK(ev.a() * std::exp(lam * mu_critical(lam, eps)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("vertex_value against the extremal series") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  ExpAverage ea = exp_average({1.0, 1.0, 60}, 0.5);
  CHECK(ev.vertex_value(0) == doctest::Approx(ea.value).epsilon(1e-12));
  CHECK(ev.vertex_value(0) == doctest::Approx(1.22552).epsilon(1e-4));

  CHECK(ev.vertex_value(1) ==
        doctest::Approx(std::exp(0.5) * ev.vertex_value(0)).epsilon(1e-13));

  BellmanEvaluator tiny(d, 1e-9);
  for (long long n : {-2LL, 0LL, 3LL})
    CHECK(tiny.vertex_value(n) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("mu at or above critical is rejected") {
  CombDomain d(1.0, 1.0);
  double crit = mu_critical(1.0, 1.0);
  CHECK_THROWS_AS(BellmanEvaluator(d, crit), std::domain_error);
  CHECK_THROWS_AS(BellmanEvaluator(d, crit + 0.1), std::domain_error);
  CHECK_THROWS_AS(BellmanEvaluator(d, 0.0), std::domain_error);
  CHECK_NOTHROW(BellmanEvaluator(d, crit * 0.999));
}

TEST_CASE("evaluate on the fixed boundary and at ray tips") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  for (double t : {-1.3, -0.2, 0.0, 0.7, 1.9})
    CHECK(ev.evaluate({t, t * t}).value == doctest::Approx(std::exp(0.5 * t)).epsilon(1e-13));
  CHECK(ev.evaluate({0.0, 1.0}).value == doctest::Approx(ev.vertex_value(0)).epsilon(1e-13));
  CHECK(ev.evaluate({1.0, 2.0}).value == doctest::Approx(ev.vertex_value(1)).epsilon(1e-13));
}

TEST_CASE("evaluate rejects points outside its domain") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  CHECK_THROWS_AS(ev.evaluate({0.0, -0.5}), std::domain_error);        // below parabola
  CHECK_THROWS_AS(ev.evaluate({0.5, 1.8}), std::domain_error);         // hull interior
  CHECK_THROWS_AS(ev.evaluate({0.0, 2.5}), std::domain_error);         // ray interior
}

TEST_CASE("homogeneity identity at random points") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  double lam = 1.0;
  std::mt19937_64 rng = seeded_rng(42, 0);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), uf(0.0, 1.0);
  double factor = std::exp(lam * 0.5);
  for (int k = 0; k < 1000; ++k) {
    double x1 = ux(rng);
    double x2 = x1 * x1 + uf(rng) * (d.hull_upper(x1) - x1 * x1) * 0.999;
    PlanePoint p{x1, x2};
    PlanePoint q{x1 + lam, x2 + 2.0 * x1 * lam + lam * lam};
    double vp = ev.evaluate(p).value;
    double vq = ev.evaluate(q).value;
    CHECK(std::abs(vq - factor * vp) <= 1e-12 * std::abs(vq));
  }
}

TEST_CASE("boundary consistency of the foliation lookup") {
  CombDomain d(0.5, 0.8);
  BellmanEvaluator ev(d, 0.3);
  for (double t = -1.2; t <= 1.2; t += 0.037)
    CHECK(ev.evaluate({t, t * t}).value == doctest::Approx(std::exp(0.3 * t)).epsilon(1e-13));
}

TEST_CASE("foliation lookup is continuous across fan boundaries") {
  CombDomain d(1.0, 1.0);
  BellmanEvaluator ev(d, 0.5);
  // the chord-0 line x2 = x1 + 1 separates two fans; its in-domain part below
  // the hull has x1 = y - 1 with y in (0.382, 1)
  for (double y : {0.5, 0.8, 0.95}) {
    double x1 = y - 1.0;
    PlanePoint left{x1 - 1e-9, y}, right{x1 + 1e-9, y};
    double vl = ev.evaluate(left).value;
    double vr = ev.evaluate(right).value;
    CHECK(std::abs(vl - vr) < 1e-6);
  }
}

TEST_CASE("vertex-series identity across parameters") {
  for (auto [lam, eps] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.0}, std::pair{1.0, 0.5}}) {
    double mu = 0.5 * mu_critical(lam, eps);
    BellmanEvaluator ev(CombDomain(lam, eps), mu);
    ExtremalSpec spec{lam, eps, default_piece_count(lam, eps)};
    ExpAverage ea = exp_average(spec, mu);
    CHECK(std::abs(ev.vertex_value(0) - ea.value) <= 1e-10);
  }
}

TEST_CASE("vertex value approaches the classical sharp constant as lambda -> 0") {
  double target = 2.0 * std::exp(-0.5);
  double prev_err = 1e300;
  for (int k = 0; k <= 10; ++k) {
    double lam = std::ldexp(1.0, -k);
    BellmanEvaluator ev(CombDomain(lam, 0.5), 1.0);
    double err = std::abs(ev.vertex_value(0) - target);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 2e-3);
}

TEST_CASE("concavity probe") {
  BellmanEvaluator ev(CombDomain(1.0, 1.0), 0.5);
  ProbeResult pr = concavity_probe(ev, 10000, 12345);
  CHECK(pr.trials > 9000);
  CHECK(pr.worst_violation >= -1e-9);

  // a chord along one foliation segment is exactly affine
  auto seg = ev.evaluate({-0.2, 0.6});
  PlanePoint p0 = seg.segment.p0, p1 = seg.segment.p1;
  PlanePoint a{0.7 * p0.x1 + 0.3 * p1.x1, 0.7 * p0.x2 + 0.3 * p1.x2};
  PlanePoint b{0.3 * p0.x1 + 0.7 * p1.x1, 0.3 * p0.x2 + 0.7 * p1.x2};
  PlanePoint mid{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
  double slack = ev.evaluate(mid).value -
                 0.5 * (ev.evaluate(a).value + ev.evaluate(b).value);
  CHECK(std::abs(slack) <= 1e-12);

  // degenerate chord
  PlanePoint p{0.3, 0.5};
  CHECK(ev.evaluate(p).value - 0.5 * (ev.evaluate(p).value + ev.evaluate(p).value) == 0.0);
}

TEST_CASE("probe is deterministic for a fixed seed") {
  BellmanEvaluator ev(CombDomain(1.0, 1.0), 0.5);
  ProbeResult a = concavity_probe(ev, 500, 99);
  ProbeResult b = concavity_probe(ev, 500, 99);
  CHECK(a.worst_violation == b.worst_violation);
  CHECK(a.trials == b.trials);
}
