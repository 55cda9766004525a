#pragma once

#include <string>
#include <vector>

#include "bmolab/stepfn.hpp"

namespace bmolab {

// Geometric-piece extremal: a = (s - lambda/2)/(s + lambda/2), values
// v_n = (n + 1/2)*lambda - s on [a^{n+1}, a^n], truncated after n_pieces terms
// with the tail [0, a^N] closed off by the constant v_N.
struct ExtremalSpec {
  double lambda = 1.0;
  double epsilon = 1.0;
  int n_pieces = 1;

  double s() const;
  double a() const;
  double value(int n) const;  // v_n
};

// Smallest N with a^N < 1e-12 (clamped to [1, 4000]).
int default_piece_count(double lambda, double epsilon);

StepFunction build_extremal(const ExtremalSpec& spec);

struct ExpAverage {
  double value = 0.0;       // partial sum plus the exact geometric tail
  double partial_sum = 0.0; // first n_pieces terms only
  double tail_bound = 0.0;  // exact tail mass (a*e^{mu*lambda})^N * factor
  double ratio = 0.0;       // a*e^{mu*lambda}
  bool divergent = false;   // ratio >= 1: the series has no finite sum
};

ExpAverage exp_average(const ExtremalSpec& spec, double mu);

// Terms needed for the partial sums to exceed `threshold`; -1 if max_terms
// was reached first.
long long partial_sum_exceeds(const ExtremalSpec& spec, double mu, double threshold,
                              long long max_terms);

struct TrajectoryCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct TrajectoryReport {
  std::vector<TrajectoryCheck> checks;
  bool all_pass = false;
};

// Verifies the prefix curve hits the ray tips, the global mean/variance, the
// weak norm, and class membership of the truncated extremal.
TrajectoryReport verify_trajectory(const ExtremalSpec& spec);

}  // namespace bmolab
