#include "bmolab/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmolab/util.hpp"

namespace bmolab {

double mu_critical(double lambda, double epsilon) {
  if (!(lambda > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("mu_critical: lambda and epsilon must be positive");
  double s = std::sqrt(lambda * lambda / 4.0 + epsilon * epsilon);
  return (2.0 / lambda) * std::log((lambda / 2.0 + s) / epsilon);
}

BellmanEvaluator::BellmanEvaluator(CombDomain domain, double mu)
    : domain_(std::move(domain)), mu_(mu) {
  double lam = domain_.lambda(), eps = domain_.epsilon();
  s_ = std::sqrt(lam * lam / 4.0 + eps * eps);
  a_ = (s_ - lam / 2.0) / (s_ + lam / 2.0);
  double crit = mu_critical(lam, eps);
  if (!(mu > 0.0))
    throw std::domain_error("BellmanEvaluator: mu must be positive");
  if (!(mu < crit))
    throw std::domain_error("BellmanEvaluator: mu >= critical exponent " + fmt_g17(crit) +
                            " (the closed form loses positivity)");
  denom_ = lam / 2.0 + s_ + (lam / 2.0 - s_) * std::exp(lam * mu_);
}

double BellmanEvaluator::vertex_value(long long n) const {
  double lam = domain_.lambda();
  return lam * std::exp(mu_ * (lam * static_cast<double>(n) + lam / 2.0 - s_)) / denom_;
}

double BellmanEvaluator::boundary_value(double u) const { return std::exp(mu_ * u); }

// Parabola abscissa hit by the ray from vertex(n) through p, beyond p.
double BellmanEvaluator::parabola_hit(long long n, const PlanePoint& p) const {
  PlanePoint v = domain_.vertex(n);
  double w1 = p.x1 - v.x1, w2 = p.x2 - v.x2;
  double eps2 = domain_.epsilon() * domain_.epsilon();
  // (v1 + t*w1)^2 = v2 + t*w2, C = v1^2 - v2 = -eps^2 < 0
  double A = w1 * w1;
  double B = 2.0 * v.x1 * w1 - w2;
  double C = -eps2;
  double t;
  if (A < 1e-300) {
    t = -C / B;
  } else {
    double disc = B * B - 4.0 * A * C;  // > 0 since C < 0
    double q = -0.5 * (B + std::copysign(std::sqrt(disc), B == 0.0 ? 1.0 : B));
    double r1 = q / A;
    double r2 = (std::abs(q) > 1e-300) ? C / q : -r1;
    t = std::max(r1, r2);  // the roots straddle 0; take the forward one
  }
  return v.x1 + t * w1;
}

long long BellmanEvaluator::locate_fan(const PlanePoint& p, double* u_out) const {
  double lam = domain_.lambda();
  long long n_lo = static_cast<long long>(std::ceil(p.x1 / lam - 1e-9));
  long long n_hi = static_cast<long long>(std::floor((p.x1 + lam / 2.0 + s_) / lam + 1e-9)) + 1;
  double best_gap = 1e300;
  long long best_n = n_lo;
  double best_u = p.x1;
  for (long long n = n_lo; n <= n_hi; ++n) {
    double u = parabola_hit(n, p);
    double arc_lo = lam * (static_cast<double>(n) - 0.5) - s_;
    double arc_hi = lam * (static_cast<double>(n) + 0.5) - s_;
    double tol = 1e-9 * std::max(1.0, std::abs(u));
    if (u >= arc_lo - tol && u <= arc_hi + tol) {
      *u_out = u;
      return n;  // lowest matching fan wins ties on the shared arc endpoints
    }
    double gap = std::max(arc_lo - u, u - arc_hi);
    if (gap < best_gap) {
      best_gap = gap;
      best_n = n;
      best_u = u;
    }
  }
  *u_out = best_u;  // nearest fan; gaps here are rounding-level cracks
  return best_n;
}

BellmanEvaluator::EvalResult BellmanEvaluator::evaluate(const PlanePoint& p) const {
  RegionTag tag = domain_.classify(p);
  double lam = domain_.lambda();
  switch (tag.region) {
    case Region::Outside:
      throw std::domain_error("evaluate: point below the fixed boundary");
    case Region::InteriorHullComponent:
      throw std::domain_error("evaluate: point inside the hull of the forbidden set");
    case Region::OnRay: {
      double eps = domain_.epsilon();
      if (p.x2 - p.x1 * p.x1 > eps * eps + domain_.snap_tol())
        throw std::domain_error("evaluate: interior ray point; only the tip carries a value");
      long long n = tag.n;
      double u = lam * (static_cast<double>(n) - 0.5) - s_;
      FoliationSegment seg{u, n, {u, u * u}, domain_.vertex(n)};
      return {vertex_value(n), seg};
    }
    case Region::OnChord: {
      long long n = tag.n;
      double u = lam * static_cast<double>(n) + lam / 2.0 - s_;
      PlanePoint v1 = domain_.vertex(n + 1);
      double theta = std::clamp((p.x1 - u) / (v1.x1 - u), 0.0, 1.0);
      double val = (1.0 - theta) * boundary_value(u) + theta * vertex_value(n + 1);
      return {val, {u, n + 1, {u, u * u}, v1}};
    }
    case Region::OnFixedBoundary:
    case Region::FreeBelowHull: {
      if (tag.region == Region::OnFixedBoundary) {
        double u = p.x1;
        return {boundary_value(u), {u, llround(p.x1 / lam), {u, u * u}, {u, u * u}}};
      }
      double u;
      long long n = locate_fan(p, &u);
      PlanePoint v = domain_.vertex(n);
      double theta = std::clamp((p.x1 - u) / (v.x1 - u), 0.0, 1.0);
      double val = (1.0 - theta) * boundary_value(u) + theta * vertex_value(n);
      return {val, {u, n, {u, u * u}, v}};
    }
  }
  throw std::domain_error("evaluate: unclassified point");
}

ProbeResult concavity_probe(const BellmanEvaluator& ev, long long trials, uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("concavity_probe: trials must be >= 1");
  const CombDomain& d = ev.domain();
  double lam = d.lambda();
  ProbeResult out;
  out.worst_violation = 0.0;
  for (long long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng = seeded_rng(seed, static_cast<uint64_t>(trial));
    std::uniform_real_distribution<double> ux(-1.5 * lam, 2.5 * lam);
    std::uniform_real_distribution<double> uf(0.0, 1.0);
    auto sample = [&]() {
      double x1 = ux(rng);
      double lo = x1 * x1, hi = d.hull_upper(x1);
      return PlanePoint{x1, lo + uf(rng) * (hi - lo)};
    };
    PlanePoint p = sample(), q = sample();
    int shrink = 0;
    while (d.segment_clearance(p, q) > 0.0 && shrink < 80) {
      q = {0.5 * (p.x1 + q.x1), 0.5 * (p.x2 + q.x2)};
      ++shrink;
    }
    if (d.segment_clearance(p, q) > 0.0) continue;
    PlanePoint mid{0.5 * (p.x1 + q.x1), 0.5 * (p.x2 + q.x2)};
    double vp = ev.evaluate(p).value;
    double vq = ev.evaluate(q).value;
    double vm = ev.evaluate(mid).value;
    double slack = vm - 0.5 * (vp + vq);
    ++out.trials;
    if (slack < out.worst_violation) {
      out.worst_violation = slack;
      out.worst_p = p;
      out.worst_q = q;
    }
  }
  return out;
}

}  // namespace bmolab
