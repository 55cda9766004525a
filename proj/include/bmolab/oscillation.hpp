#pragma once

#include <optional>

#include "bmolab/geometry.hpp"
#include "bmolab/stepfn.hpp"

namespace bmolab {

struct IntervalArg {
  double a = 0.0;
  double b = 0.0;
};

struct NormValue {
  double value = 0.0;  // square root of the supremum of variances
  IntervalArg argmax;
  bool attained = false;  // false when the constraint set is empty
};

struct CircleNormValue {
  double value = 0.0;
  IntervalArg argmax;
  bool attained = false;
  double error_bar = 0.0;  // variance-scale bound for intervals longer than k_max
};

// <phi^2> - <phi>^2 over [a,b], clamped at 0.
double variance(const StepFunction& f, double a, double b);

// Quadratic BMO norm: sup of variance over all subintervals of [0,1].
NormValue bmo_norm(const StepFunction& f);

// Oscillation restricted to intervals whose average lies on the lattice
// lambda*Z.  Supremum over the exact constraint set; 0 if it is empty.
NormValue weak_bmo(const StepFunction& f, double lambda);

// Same over intervals of the periodization with length <= k_max.
CircleNormValue weak_bmo_circle(const StepFunction& f, double lambda, int k_max);

// Sup over dyadic subintervals of generation <= depth.
NormValue bmo_dyadic(const StepFunction& f, int depth);

struct JnBounds {
  double classical = 0.0;  // e^{-eps}/(1-eps), eps in [0,1)
  double dyadic = 0.0;     // e^{-eps/sqrt2}/(2-e^{eps/sqrt2}), eps in [0, sqrt2*log2)
};

double jn_classical(double eps);
double jn_dyadic(double eps);
JnBounds jn_bounds(double eps);

struct Membership {
  bool member = false;
  bool strict = false;
  double weak_norm = 0.0;
  std::optional<IntervalArg> witness;  // offending interval when not a member
  bool circle_mean_ok = true;          // circle inputs: global mean avoids the hull interior
  double circle_error_bar = 0.0;
};

// Class membership: the weak norm at the domain's lattice spacing stays below
// epsilon (strictly, when requested).  Circle inputs additionally have their
// global lifted mean checked against the hull interior.
Membership membership_A(const StepFunction& f, const CombDomain& d, bool strict,
                        int circle_k_max = 64);

}  // namespace bmolab
