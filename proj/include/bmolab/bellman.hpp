#pragma once

#include <cstdint>

#include "bmolab/geometry.hpp"

namespace bmolab {

// Supremum of exponents mu for which e^{mu*phi} stays summable under the
// lattice-oscillation constraint; equals (2/lambda)*log((lambda/2 + s)/eps)
// with s = sqrt(lambda^2/4 + eps^2).
double mu_critical(double lambda, double epsilon);

struct FoliationSegment {
  double u = 0.0;       // parabola anchor abscissa
  long long vertex_n = 0;
  PlanePoint p0, p1;    // segment endpoints: (u, u^2) and the fan vertex
};

// Closed-form minimal locally concave function on the comb domain for the
// boundary data e^{mu*x1}.  Affine along the foliation segments that join
// parabola points to the ray tips; fan n covers parabola abscissas
// [lambda*(n-1/2) - s, lambda*(n+1/2) - s].
class BellmanEvaluator {
 public:
  BellmanEvaluator(CombDomain domain, double mu);

  const CombDomain& domain() const { return domain_; }
  double mu() const { return mu_; }
  double s() const { return s_; }
  double a() const { return a_; }  // extremal ratio (s - lambda/2)/(s + lambda/2)

  double vertex_value(long long n) const;
  double boundary_value(double u) const;  // e^{mu*u}

  struct EvalResult {
    double value = 0.0;
    FoliationSegment segment;
  };
  // Defined on the closure of the region between the parabola and the hull,
  // including chords and ray tips; throws std::domain_error elsewhere.
  EvalResult evaluate(const PlanePoint& p) const;

 private:
  long long locate_fan(const PlanePoint& p, double* u_out) const;
  double parabola_hit(long long n, const PlanePoint& p) const;

  CombDomain domain_;
  double mu_;
  double s_;
  double a_;
  double denom_;
};

struct ProbeResult {
  double worst_violation = 0.0;  // most negative midpoint slack observed
  PlanePoint worst_p, worst_q;
  long long trials = 0;
};

// Random in-domain chords; checks the midpoint concavity inequality for the
// closed form.  Deterministic for a given seed, independent of threading.
ProbeResult concavity_probe(const BellmanEvaluator& ev, long long trials, uint64_t seed);

}  // namespace bmolab
