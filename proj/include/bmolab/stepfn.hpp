#pragma once

#include <vector>

#include "bmolab/geometry.hpp"

namespace bmolab {

enum class Space { Interval, Circle };

struct Piece {
  double length = 0.0;
  double value = 0.0;
};

// Piecewise-linear cumulative integrals of a pair of piecewise-constant
// weights (w1, w2) over [0, total].  For a real step function w1 = phi and
// w2 = phi^2; for a lifted function the two components of psi.
struct PrefixSums {
  std::vector<double> breaks;  // size P+1, breaks.front() = 0
  std::vector<double> c1, c2;  // cumulative integrals at breaks (size P+1)
  std::vector<double> s1, s2;  // per-piece slopes (size P)

  int piece_count() const { return static_cast<int>(s1.size()); }
  double total_length() const { return breaks.back(); }
  int piece_index(double t) const;
  double eval1(double t) const;
  double eval2(double t) const;
  // 1-periodic extension with linear drift (period = total_length).
  double eval1_periodic(double t) const;
  double eval2_periodic(double t) const;
  // Integrals over [a,b] assembled from within-piece masses; accurate for
  // arbitrarily short intervals (endpoint offsets are exact differences of
  // nearby doubles).  `integrals` needs 0 <= a <= b <= total; the periodic
  // variant accepts any a < b.
  void integrals(double a, double b, double* s1_out, double* s2_out) const;
  void integrals_periodic(double a, double b, double* s1_out, double* s2_out) const;

  static PrefixSums build(const std::vector<double>& lengths,
                          const std::vector<double>& w1,
                          const std::vector<double>& w2);
};

// Real-valued step function on the unit interval or circle, total length 1.
class StepFunction {
 public:
  StepFunction(Space space, std::vector<Piece> pieces, double sum_tol = 1e-9);

  Space space() const { return space_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const PrefixSums& prefix() const { return ps_; }
  double min_value() const { return min_v_; }
  double max_value() const { return max_v_; }

  double value_at(double t) const;
  double average(double a, double b) const;     // <phi> over [a,b]
  double average_sq(double a, double b) const;  // <phi^2> over [a,b]
  PlanePoint lift_average(double a, double b) const;

  static StepFunction constant(double c, Space space = Space::Interval);

 private:
  void check_range(double a, double b) const;

  Space space_;
  std::vector<Piece> pieces_;
  PrefixSums ps_;
  double min_v_ = 0.0, max_v_ = 0.0;
};

// Plane-valued step function; produced by lift().
class PlaneStepFunction {
 public:
  PlaneStepFunction(Space space, std::vector<double> lengths, std::vector<PlanePoint> values);

  Space space() const { return space_; }
  int piece_count() const { return static_cast<int>(values_.size()); }
  const std::vector<PlanePoint>& values() const { return values_; }
  const PrefixSums& prefix() const { return ps_; }

  PlanePoint value_at(double t) const;
  PlanePoint average(double a, double b) const;
  // Number of pieces a subinterval of [0,1] meets (1 means constant there).
  int span_pieces(double a, double b) const;

 private:
  Space space_;
  std::vector<PlanePoint> values_;
  PrefixSums ps_;
};

PlaneStepFunction lift(const StepFunction& f);

// Prefix-average curve t -> (<phi>_[0,t], <phi^2>_[0,t]); exact for t inside
// the first piece, defined for 0 < t <= 1.
PlanePoint gamma(const PlaneStepFunction& psi, double t);

}  // namespace bmolab
