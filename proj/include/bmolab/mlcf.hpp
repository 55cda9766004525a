#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "bmolab/bellman.hpp"
#include "bmolab/geometry.hpp"
#include "bmolab/util.hpp"

namespace bmolab {

enum class CellTag : uint8_t { Free = 0, Dirichlet = 1, Outside = 2 };

struct GridWindow {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

struct ScalarField {
  int nx = 0, ny = 0;
  GridWindow win;
  std::vector<double> values;  // nx*ny, row-major by j
  std::vector<CellTag> mask;

  double hx() const { return (win.x1 - win.x0) / (nx - 1); }
  double hy() const { return (win.y1 - win.y0) / (ny - 1); }
  int idx(int i, int j) const { return j * nx + i; }
  PlanePoint pos(int i, int j) const {
    return {win.x0 + i * hx(), win.y0 + j * hy()};
  }
};

struct BoundaryCut {
  double t = 0.0;      // fractional position in (0,1] along the probe step
  double value = 0.0;  // boundary datum at the crossing point
};

// Geometry/data callbacks for the grid solver.  `inside` is an open-domain
// membership test, `unit_clear` decides whether a short segment between two
// inside points stays in the domain, `dirichlet` pins node values, and
// `boundary_cut` finds the exact fixed-boundary crossing of a step that
// leaves the domain, together with the boundary datum there.
class DomainSpec {
 public:
  virtual ~DomainSpec() = default;
  virtual bool inside(const PlanePoint& p) const = 0;
  virtual bool unit_clear(const PlanePoint& a, const PlanePoint& b) const = 0;
  virtual std::optional<double> dirichlet(const PlanePoint& p) const = 0;
  virtual std::optional<BoundaryCut> boundary_cut(const PlanePoint& from,
                                                  const PlanePoint& to) const = 0;
  virtual double floor_value() const = 0;  // start below inf of the data
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  double init_value = 0.0;
};

// Iterated chord concavification to a fixpoint.  The minimal locally concave
// function is the supremum of splitting-tree certificates rooted at the
// boundary data, so every sweep raises each free node to the largest endpoint
// interpolation over a fixed family of chord directions, with exact cut
// anchors where chords exit through the fixed boundary.  Values increase
// monotonically from the floor and never exceed the certificate supremum, so
// the result approximates the true minimal function from below up to the
// discretization gap.
ScalarField solve_minimal_concave(const DomainSpec& spec, const GridWindow& win, int nx,
                                  int ny, double tol, int max_iters,
                                  SolveStats* stats = nullptr);

// Bilinear interpolation on Free/Dirichlet cells; throws outside the domain.
double query(const ScalarField& field, const PlanePoint& p);

// Re-derives random enforced chords from the domain predicates and returns the
// largest positive violation of the midpoint-style chord inequality.
double chord_violation_audit(const DomainSpec& spec, const ScalarField& field,
                             int samples, uint64_t seed);

enum class EdgeMode { ClosedForm, Constant };

struct CombProblem {
  CombDomain domain{1.0, 1.0};
  double mu = 0.5;
  EdgeMode edge = EdgeMode::Constant;
};

GridWindow comb_window(const CombDomain& d);
std::unique_ptr<DomainSpec> make_comb_spec(const CombProblem& problem);
ScalarField solve_comb(const CombProblem& problem, int n, double tol, int max_iters,
                       SolveStats* stats = nullptr);

std::unique_ptr<DomainSpec> make_two_disk_spec();
GridWindow two_disk_window();
ScalarField solve_two_disk(int n, double tol, int max_iters, SolveStats* stats = nullptr);

struct CounterexampleReport {
  double mass_low = 0.9;                  // time spent at (0,-1)
  PlanePoint value_low{0.0, -1.0};
  PlanePoint value_high{0.0, 1.0};
  double obstacle_clearance = 0.0;        // distance of the average segment to the obstacles
  PlanePoint mean;                        // (0, -0.8)
  bool mean_outside_hull = false;
  double f_average = 0.0;                 // <f(psi)> with f = -|x1|
  double solver_value = 0.0;              // grid minimal function at the mean
  bool inequality_violated = false;       // solver_value < f_average
  int grid = 0;
  SolveStats stats;
};

CounterexampleReport counterexample_report(int grid_n = 256, double tol = 1e-7,
                                           int max_iters = 20000);

}  // namespace bmolab
