#pragma once

// Test-only oracles: brute-force grid searches and random function
// generators, kept independent of the production search paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bmolab/oscillation.hpp"
#include "bmolab/stepfn.hpp"
#include "bmolab/util.hpp"

namespace bmolab::testing {

// Exhaustive grid search for the unconstrained variance supremum.
inline double bmo_grid_oracle(const StepFunction& f, double res) {
  int n = static_cast<int>(std::lround(1.0 / res));
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      double a = i * res, b = std::min(1.0, j * res);
      best = std::max(best, variance(f, a, b));
    }
  return std::sqrt(best);
}

// Constrained oracle: sweep the left endpoint on a grid and, per lattice
// level, solve the piecewise-affine mean constraint for the right endpoint
// directly.  Every evaluated interval has its average on the lattice to
// rounding accuracy (well inside 1e-6).
inline double weak_bmo_grid_oracle(const StepFunction& f, double lambda, double res) {
  const PrefixSums& ps = f.prefix();
  int P = ps.piece_count();
  int n = static_cast<int>(std::lround(1.0 / res));
  double vmin = f.min_value(), vmax = f.max_value();
  long long m_lo = static_cast<long long>(std::ceil(vmin / lambda - 1e-9));
  long long m_hi = static_cast<long long>(std::floor(vmax / lambda + 1e-9));
  double best = -1.0;
  for (int i = 0; i <= n; ++i) {
    double x = std::min(1.0, i * res);
    for (long long m = m_lo; m <= m_hi; ++m) {
      double A = lambda * static_cast<double>(m);
      double hx = ps.eval1(x) - A * x;
      for (int j = 0; j < P; ++j) {
        double y0 = ps.breaks[j], y1 = ps.breaks[j + 1];
        if (y1 <= x + 1e-12) continue;
        double sj = ps.s1[j] - A;
        double hy0 = ps.c1[j] - A * y0;
        if (std::abs(sj) < 1e-13) {
          if (std::abs(hy0 - hx) < 1e-12 && y1 > x + 1e-9) {
            double y = y1;
            if (y > x + 1e-9) best = std::max(best, variance(f, x, y));
          }
          continue;
        }
        double y = y0 + (hx - hy0) / sj;
        if (y < std::max(y0, x + 1e-9) || y > y1) continue;
        if (std::abs(f.average(x, y) - A) > 1e-6) continue;
        best = std::max(best, variance(f, x, y));
      }
    }
  }
  return best < 0.0 ? 0.0 : std::sqrt(best);
}

inline StepFunction random_step_function(std::mt19937_64& rng, int max_pieces,
                                         double amplitude, double offset_scale,
                                         Space space = Space::Interval,
                                         double min_len = 0.02) {
  std::uniform_int_distribution<int> np(2, max_pieces);
  std::uniform_real_distribution<double> ul(min_len, 1.0);
  std::uniform_real_distribution<double> uv(-amplitude, amplitude);
  std::uniform_real_distribution<double> uo(-offset_scale, offset_scale);
  int k = np(rng);
  std::vector<Piece> pieces(k);
  double total = 0.0;
  for (auto& p : pieces) {
    p.length = ul(rng);
    total += p.length;
  }
  double offset = uo(rng);
  for (auto& p : pieces) {
    p.length /= total;
    p.value = offset + uv(rng);
  }
  return StepFunction(space, std::move(pieces));
}

// Rejection sampler for class members whose global average is admissible as
// an induction root.
inline StepFunction random_member(std::mt19937_64& rng, const CombDomain& d,
                                  int max_pieces) {
  for (int attempt = 0; attempt < 400; ++attempt) {
    StepFunction f = random_step_function(rng, max_pieces, 0.95 * d.epsilon(),
                                          0.8 * d.lambda());
    NormValue w = weak_bmo(f, d.lambda());
    if (w.value > 0.995 * d.epsilon()) continue;
    PlanePoint mean = f.lift_average(0.0, 1.0);
    RegionTag tag = d.classify(mean);
    if (tag.region == Region::InteriorHullComponent) continue;
    if (tag.region == Region::OnRay &&
        mean.x2 - mean.x1 * mean.x1 > d.epsilon() * d.epsilon() + d.snap_tol())
      continue;
    return f;
  }
  throw std::runtime_error("random_member: rejection sampling failed");
}

}  // namespace bmolab::testing
