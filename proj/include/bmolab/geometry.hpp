#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace bmolab {

// A point of the Bellman diagram: x1 = mean, x2 = second moment.
struct PlanePoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class Region {
  OnFixedBoundary,        // on the parabola x2 = x1^2
  FreeBelowHull,          // strictly between parabola and hull lower boundary
  OnChord,                // on a hull boundary chord [vertex(n), vertex(n+1)]
  OnRay,                  // on a forbidden vertical ray (tip included)
  InteriorHullComponent,  // strictly inside the hull, off the rays
  Outside                 // below the parabola
};

struct RegionTag {
  Region region = Region::Outside;
  long long n = 0;  // chord/ray/component index where applicable
};

const char* to_string(Region r);

// Lattice-comb geometry: forbidden vertical rays at x1 = lambda*n starting at
// height lambda^2 n^2 + epsilon^2, over the outer region x2 > x1^2.  The hull
// of the rays has the piecewise-linear lower boundary g interpolating the ray
// tips; the chord over [lambda*n, lambda*(n+1)] has slope lambda*(2n+1).
class CombDomain {
 public:
  CombDomain(double lambda, double epsilon, double snap_tol = -1.0);

  double lambda() const { return lambda_; }
  double epsilon() const { return epsilon_; }
  double snap_tol() const { return snap_; }

  PlanePoint vertex(long long n) const;
  double ray_height(long long n) const;
  double chord_slope(long long n) const;

  // Lower boundary g of the hull of the rays; g(lambda*n) is the tip height.
  double hull_upper(double x1) const;

  RegionTag classify(const PlanePoint& p) const;

  // max over the segment [p,q] of x2 - g(x1); <= 0 iff the segment avoids the
  // open hull interior.  Exact: the integrand is affine per linear piece of g.
  double segment_clearance(const PlanePoint& p, const PlanePoint& q) const;

 private:
  bool near_chord(long long n, const PlanePoint& p) const;

  double lambda_;
  double epsilon_;
  double snap_;
};

// The generic two-obstacle domain: unit outer disk, two forbidden disks of
// radius 0.4 centered at (+-1/2, 0).  The hull of the obstacles is the stadium
// bounded by the tangent segments x2 = +-0.4 (|x1| <= 1/2) and two arcs.
struct TwoDiskDomain {
  double outer_radius = 1.0;
  double obstacle_radius = 0.4;
  PlanePoint center_a{-0.5, 0.0};
  PlanePoint center_b{0.5, 0.0};

  double core_half_width() const { return 0.5; }
  double dist_to_core(const PlanePoint& p) const;  // distance to the segment joining centers
  bool in_hull(const PlanePoint& p) const;         // closed stadium
  bool in_outer(const PlanePoint& p) const;        // closed outer disk
  bool in_obstacle(const PlanePoint& p) const;     // either closed obstacle disk
};

struct AxiomCheck {
  int axiom = 0;  // 1..5
  bool pass = false;
  std::string witness;
};

struct AxiomReport {
  std::array<AxiomCheck, 5> checks{};
  bool all_pass = false;
};

AxiomReport check_axioms(const CombDomain& d);
AxiomReport check_axioms(const TwoDiskDomain& d);

double point_segment_distance(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b);
double segment_segment_distance(const PlanePoint& a0, const PlanePoint& a1,
                                const PlanePoint& b0, const PlanePoint& b1);

}  // namespace bmolab
