#include "bmolab/mlcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmolab {

namespace {

// Chord line directions in node units (one representative per line).
constexpr int kLines = 24;
constexpr int kDir[kLines][2] = {
    {1, 0},  {0, 1},  {1, 1},  {-1, 1}, {2, 1},  {1, 2},  {-2, 1}, {-1, 2},
    {3, 1},  {1, 3},  {-3, 1}, {-1, 3}, {3, 2},  {2, 3},  {-3, 2}, {-2, 3},
    {4, 1},  {1, 4},  {-4, 1}, {-1, 4}, {4, 3},  {3, 4},  {-4, 3}, {-3, 4}};
constexpr int kMaxReach = 32;
constexpr int kChordLevels[] = {1, 2, 4, 8, 16, 32};

struct Precomp {
  // reach_m/reach_p: consecutive valid unit steps along -v/+v from each node.
  std::vector<uint8_t> reach_m[kLines], reach_p[kLines];
  // First-step boundary cuts per node and signed direction (NaN t = none).
  std::vector<float> cut_t_m[kLines], cut_v_m[kLines];
  std::vector<float> cut_t_p[kLines], cut_v_p[kLines];
};

bool in_grid(const ScalarField& f, int i, int j) {
  return i >= 0 && i < f.nx && j >= 0 && j < f.ny;
}

void precompute(const DomainSpec& spec, const ScalarField& f, Precomp& pc) {
  const int n = f.nx * f.ny;
  std::vector<uint8_t> valid(n);
  for (int line = 0; line < kLines; ++line) {
    int dx = kDir[line][0], dy = kDir[line][1];
    // unit validity of the segment [node, node+v]
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        int id = f.idx(i, j);
        bool ok = false;
        if (f.mask[id] != CellTag::Outside && in_grid(f, i + dx, j + dy) &&
            f.mask[f.idx(i + dx, j + dy)] != CellTag::Outside)
          ok = spec.unit_clear(f.pos(i, j), f.pos(i + dx, j + dy));
        valid[id] = ok ? 1 : 0;
      }

    auto& rp = pc.reach_p[line];
    auto& rm = pc.reach_m[line];
    rp.assign(n, 0);
    rm.assign(n, 0);
    // reach along +v: process so that (i+dx, j+dy) comes first
    for (int j = f.ny - 1; j >= 0; --j)
      for (int i = (dx >= 0 ? f.nx - 1 : 0); dx >= 0 ? i >= 0 : i < f.nx; dx >= 0 ? --i : ++i) {
        int id = f.idx(i, j);
        if (!valid[id]) continue;
        int jn = j + dy, in_ = i + dx;
        uint8_t nxt = in_grid(f, in_, jn) ? rp[f.idx(in_, jn)] : 0;
        rp[id] = static_cast<uint8_t>(std::min<int>(kMaxReach, 1 + nxt));
      }
    // reach along -v: segment [i-dx, j-dy] -> [i, j] is valid[(i-dx, j-dy)]
    for (int j = 0; j < f.ny; ++j)
      for (int i = (dx >= 0 ? 0 : f.nx - 1); dx >= 0 ? i < f.nx : i >= 0; dx >= 0 ? ++i : --i) {
        int id = f.idx(i, j);
        int jp = j - dy, ip = i - dx;
        if (!in_grid(f, ip, jp)) continue;
        if (!valid[f.idx(ip, jp)]) continue;
        rm[id] = static_cast<uint8_t>(std::min<int>(kMaxReach, 1 + rm[f.idx(ip, jp)]));
      }

    // first-step cuts where the next step is blocked
    auto& ctp = pc.cut_t_p[line];
    auto& cvp = pc.cut_v_p[line];
    auto& ctm = pc.cut_t_m[line];
    auto& cvm = pc.cut_v_m[line];
    ctp.assign(n, -1.0f);
    cvp.assign(n, 0.0f);
    ctm.assign(n, -1.0f);
    cvm.assign(n, 0.0f);
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        int id = f.idx(i, j);
        if (f.mask[id] == CellTag::Outside) continue;
        if (!valid[id]) {
          PlanePoint from = f.pos(i, j);
          PlanePoint to{from.x1 + dx * f.hx(), from.x2 + dy * f.hy()};
          if (auto cut = spec.boundary_cut(from, to)) {
            ctp[id] = static_cast<float>(std::max(cut->t, 1e-9));
            cvp[id] = static_cast<float>(cut->value);
          }
        }
        int jp = j - dy, ip = i - dx;
        bool prev_valid = in_grid(f, ip, jp) && valid[f.idx(ip, jp)];
        if (!prev_valid) {
          PlanePoint from = f.pos(i, j);
          PlanePoint to{from.x1 - dx * f.hx(), from.x2 - dy * f.hy()};
          if (auto cut = spec.boundary_cut(from, to)) {
            ctm[id] = static_cast<float>(std::max(cut->t, 1e-9));
            cvm[id] = static_cast<float>(cut->value);
          }
        }
      }
  }
}

double sweep(const DomainSpec&, ScalarField& f, const Precomp& pc, bool forward) {
  double res = 0.0;
  const int nx = f.nx, ny = f.ny;
  auto relax = [&](int i, int j) {
    int id = f.idx(i, j);
    if (f.mask[id] != CellTag::Free) return;
    double cur = f.values[id];
    for (int line = 0; line < kLines; ++line) {
      int dx = kDir[line][0], dy = kDir[line][1];
      int Rm = pc.reach_m[line][id];
      int Rp = pc.reach_p[line][id];
      for (int c : kChordLevels) {
        int a = std::min(Rm, c), b = std::min(Rp, c);
        double adist = a, bdist = b;
        double aval = 0.0, bval = 0.0;
        bool have_a = a > 0, have_b = b > 0;
        if (have_a) aval = f.values[f.idx(i - a * dx, j - a * dy)];
        if (a < c) {
          int aid = f.idx(i - a * dx, j - a * dy);
          float t = pc.cut_t_m[line][aid];
          if (t >= 0.0f) {
            adist = a + static_cast<double>(t);
            aval = pc.cut_v_m[line][aid];
            have_a = true;
          }
        }
        if (have_b) bval = f.values[f.idx(i + b * dx, j + b * dy)];
        if (b < c) {
          int bid = f.idx(i + b * dx, j + b * dy);
          float t = pc.cut_t_p[line][bid];
          if (t >= 0.0f) {
            bdist = b + static_cast<double>(t);
            bval = pc.cut_v_p[line][bid];
            have_b = true;
          }
        }
        if (have_a && have_b) {
          double cand = (bdist * aval + adist * bval) / (adist + bdist);
          cur = std::max(cur, cand);
        }
        if (Rm <= c && Rp <= c) break;  // further levels repeat the same chord
      }
    }
    double delta = cur - f.values[id];
    if (delta > res) res = delta;
    f.values[id] = cur;
  };
  if (forward) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) relax(i, j);
  } else {
    for (int j = ny - 1; j >= 0; --j)
      for (int i = nx - 1; i >= 0; --i) relax(i, j);
  }
  return res;
}

}  // namespace

ScalarField solve_minimal_concave(const DomainSpec& spec, const GridWindow& win, int nx,
                                  int ny, double tol, int max_iters, SolveStats* stats) {
  if (nx < 4 || ny < 4) throw std::invalid_argument("solve: grid too small");
  if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  ScalarField f;
  f.nx = nx;
  f.ny = ny;
  f.win = win;
  f.values.assign(nx * ny, std::numeric_limits<double>::quiet_NaN());
  f.mask.assign(nx * ny, CellTag::Outside);

  double init = spec.floor_value();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      PlanePoint p = f.pos(i, j);
      int id = f.idx(i, j);
      if (!spec.inside(p)) continue;
      if (auto dv = spec.dirichlet(p)) {
        f.mask[id] = CellTag::Dirichlet;
        f.values[id] = *dv;
      } else {
        f.mask[id] = CellTag::Free;
        f.values[id] = init;
      }
    }

  Precomp pc;
  precompute(spec, f, pc);

  double res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    double r1 = sweep(spec, f, pc, true);
    double r2 = sweep(spec, f, pc, false);
    res = std::max(r1, r2);
    if (res < tol) break;
  }
  if (stats) {
    stats->iterations = iter + 1;
    stats->residual = res;
    stats->init_value = init;
  }
  if (res >= tol)
    throw ConvergenceError("solve: residual " + fmt_g17(res) + " after " +
                               std::to_string(max_iters) + " iterations (tol " +
                               fmt_g17(tol) + ")",
                           res, max_iters);
  return f;
}

double query(const ScalarField& f, const PlanePoint& p) {
  double fx = (p.x1 - f.win.x0) / f.hx();
  double fy = (p.x2 - f.win.y0) / f.hy();
  int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  i = std::clamp(i, 0, f.nx - 2);
  j = std::clamp(j, 0, f.ny - 2);
  double tx = fx - i, ty = fy - j;
  if (tx < -1e-9 || tx > 1.0 + 1e-9 || ty < -1e-9 || ty > 1.0 + 1e-9)
    throw std::domain_error("query: point outside the window");
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di)
      if (f.mask[f.idx(i + di, j + dj)] == CellTag::Outside)
        throw std::domain_error("query: point outside the computed domain");
  tx = std::clamp(tx, 0.0, 1.0);
  ty = std::clamp(ty, 0.0, 1.0);
  double v00 = f.values[f.idx(i, j)], v10 = f.values[f.idx(i + 1, j)];
  double v01 = f.values[f.idx(i, j + 1)], v11 = f.values[f.idx(i + 1, j + 1)];
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
         tx * ty * v11;
}

double chord_violation_audit(const DomainSpec& spec, const ScalarField& f, int samples,
                             uint64_t seed) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng = seeded_rng(seed, static_cast<uint64_t>(s));
    std::uniform_int_distribution<int> ui(0, f.nx - 1), uj(0, f.ny - 1);
    std::uniform_int_distribution<int> uline(0, kLines - 1);
    std::uniform_int_distribution<int> ustep(1, 8);
    int i = ui(rng), j = uj(rng);
    int id = f.idx(i, j);
    if (f.mask[id] != CellTag::Free) continue;
    int line = uline(rng);
    int dx = kDir[line][0], dy = kDir[line][1];
    int a = ustep(rng), b = ustep(rng);
    // walk the chord and re-check validity directly from the predicates
    bool ok = true;
    for (int k = -a; k < b && ok; ++k) {
      int i0 = i + k * dx, j0 = j + k * dy;
      int i1 = i0 + dx, j1 = j0 + dy;
      if (!in_grid(f, i0, j0) || !in_grid(f, i1, j1) ||
          f.mask[f.idx(i0, j0)] == CellTag::Outside ||
          f.mask[f.idx(i1, j1)] == CellTag::Outside ||
          !spec.unit_clear(f.pos(i0, j0), f.pos(i1, j1)))
        ok = false;
    }
    if (!ok) continue;
    double va = f.values[f.idx(i - a * dx, j - a * dy)];
    double vb = f.values[f.idx(i + b * dx, j + b * dy)];
    double interp = (static_cast<double>(b) * va + static_cast<double>(a) * vb) / (a + b);
    worst = std::max(worst, interp - f.values[id]);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Comb-domain problem
// ---------------------------------------------------------------------------

namespace {

// Smallest t in (0,1] where the segment from->to crosses x2 = x1^2, provided
// the sub-segment stays below the hull; the crossing carries e^{mu x1}.
std::optional<BoundaryCut> parabola_cut(const CombDomain& d, double mu,
                                        const PlanePoint& from, const PlanePoint& to) {
  double w1 = to.x1 - from.x1, w2 = to.x2 - from.x2;
  double A = -w1 * w1;
  double B = w2 - 2.0 * from.x1 * w1;
  double C = from.x2 - from.x1 * from.x1;  // >= 0 at the inside endpoint
  double t = -1.0;
  if (std::abs(A) < 1e-300) {
    if (B < 0.0) t = -C / B;
  } else {
    double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      double q = -0.5 * (B + std::copysign(sq, B == 0.0 ? 1.0 : B));
      double r1 = q / A;
      double r2 = std::abs(q) > 1e-300 ? C / q : r1;
      double lo = std::min(r1, r2), hi = std::max(r1, r2);
      if (lo > 1e-12)
        t = lo;
      else if (hi > 1e-12)
        t = hi;
    }
  }
  if (!(t > 0.0) || t > 1.0 + 1e-12) return std::nullopt;
  t = std::min(t, 1.0);
  PlanePoint hit{from.x1 + t * w1, from.x2 + t * w2};
  if (d.segment_clearance(from, hit) > 1e-12) return std::nullopt;
  return BoundaryCut{t, std::exp(mu * hit.x1)};
}

class CombSpec : public DomainSpec {
 public:
  CombSpec(const CombProblem& pr, GridWindow win)
      : d_(pr.domain), mu_(pr.mu), edge_(pr.edge), win_(win) {
    if (edge_ == EdgeMode::ClosedForm) ev_ = std::make_unique<BellmanEvaluator>(d_, mu_);
    edge_eps_ = 1e-9 * std::max(1.0, d_.lambda());
    constant_ = std::exp(mu_ * win_.x1) + 1.0;
  }

  bool inside(const PlanePoint& p) const override {
    if (p.x2 < p.x1 * p.x1 - 1e-14) return false;
    return p.x2 < d_.hull_upper(p.x1) - 1e-14;
  }

  bool unit_clear(const PlanePoint& a, const PlanePoint& b) const override {
    return d_.segment_clearance(a, b) <= 1e-13;
  }

  std::optional<double> dirichlet(const PlanePoint& p) const override {
    if (std::abs(p.x1 - win_.x0) > edge_eps_ && std::abs(p.x1 - win_.x1) > edge_eps_)
      return std::nullopt;
    if (edge_ == EdgeMode::ClosedForm) return ev_->evaluate(p).value;
    return constant_;
  }

  std::optional<BoundaryCut> boundary_cut(const PlanePoint& from,
                                          const PlanePoint& to) const override {
    return parabola_cut(d_, mu_, from, to);
  }

  double floor_value() const override { return -1.0; }  // data e^{mu x1} stays positive

 private:
  CombDomain d_;
  double mu_;
  EdgeMode edge_;
  GridWindow win_;
  std::unique_ptr<BellmanEvaluator> ev_;
  double edge_eps_ = 0.0;
  double constant_ = 0.0;
};

}  // namespace

GridWindow comb_window(const CombDomain& d) {
  double lam = d.lambda();
  return {-lam, lam, 0.0, d.ray_height(1)};
}

std::unique_ptr<DomainSpec> make_comb_spec(const CombProblem& problem) {
  return std::make_unique<CombSpec>(problem, comb_window(problem.domain));
}

ScalarField solve_comb(const CombProblem& problem, int n, double tol, int max_iters,
                       SolveStats* stats) {
  GridWindow win = comb_window(problem.domain);
  CombSpec spec(problem, win);
  return solve_minimal_concave(spec, win, n, n, tol, max_iters, stats);
}

// ---------------------------------------------------------------------------
// Two-disk problem: f(x) = -|x1| on the unit circle
// ---------------------------------------------------------------------------

namespace {

class TwoDiskSpec : public DomainSpec {
 public:
  TwoDiskSpec() = default;

  bool inside(const PlanePoint& p) const override {
    double r2 = p.x1 * p.x1 + p.x2 * p.x2;
    if (r2 >= 1.0 - 1e-14) return false;
    return d_.dist_to_core(p) > d_.obstacle_radius + 1e-14;
  }

  bool unit_clear(const PlanePoint& a, const PlanePoint& b) const override {
    return segment_segment_distance(a, b, d_.center_a, d_.center_b) >
           d_.obstacle_radius + 1e-13;
  }

  std::optional<double> dirichlet(const PlanePoint&) const override { return std::nullopt; }

  std::optional<BoundaryCut> boundary_cut(const PlanePoint& from,
                                          const PlanePoint& to) const override {
    double w1 = to.x1 - from.x1, w2 = to.x2 - from.x2;
    double A = w1 * w1 + w2 * w2;
    double B = 2.0 * (from.x1 * w1 + from.x2 * w2);
    double C = from.x1 * from.x1 + from.x2 * from.x2 - 1.0;  // < 0 inside
    if (A < 1e-300) return std::nullopt;
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t = (-B + sq) / (2.0 * A);  // forward crossing
    if (!(t > 0.0) || t > 1.0 + 1e-12) return std::nullopt;
    t = std::min(t, 1.0);
    PlanePoint hit{from.x1 + t * w1, from.x2 + t * w2};
    if (segment_segment_distance(from, hit, d_.center_a, d_.center_b) <=
        d_.obstacle_radius + 1e-13)
      return std::nullopt;
    return BoundaryCut{std::max(t, 1e-9), -std::abs(hit.x1)};
  }

  double floor_value() const override { return -2.0; }  // data -|x1| stays above -1

 private:
  TwoDiskDomain d_;
};

}  // namespace

GridWindow two_disk_window() { return {-1.0, 1.0, -1.0, 1.0}; }

std::unique_ptr<DomainSpec> make_two_disk_spec() { return std::make_unique<TwoDiskSpec>(); }

ScalarField solve_two_disk(int n, double tol, int max_iters, SolveStats* stats) {
  TwoDiskSpec spec;
  return solve_minimal_concave(spec, two_disk_window(), n, n, tol, max_iters, stats);
}

CounterexampleReport counterexample_report(int grid_n, double tol, int max_iters) {
  CounterexampleReport rep;
  TwoDiskDomain d;
  rep.mean = {0.0, rep.mass_low * rep.value_low.x2 + (1.0 - rep.mass_low) * rep.value_high.x2};
  // every subinterval average lies on the segment x1 = 0, x2 in [-1, 1]
  rep.obstacle_clearance =
      segment_segment_distance({0.0, -1.0}, {0.0, 1.0}, d.center_a, d.center_a) -
      d.obstacle_radius;
  rep.obstacle_clearance = std::min(
      rep.obstacle_clearance,
      segment_segment_distance({0.0, -1.0}, {0.0, 1.0}, d.center_b, d.center_b) -
          d.obstacle_radius);
  rep.mean_outside_hull = !d.in_hull(rep.mean);
  rep.f_average = rep.mass_low * (-std::abs(rep.value_low.x1)) +
                  (1.0 - rep.mass_low) * (-std::abs(rep.value_high.x1)) + 0.0;
  rep.grid = grid_n;
  ScalarField field = solve_two_disk(grid_n, tol, max_iters, &rep.stats);
  rep.solver_value = query(field, rep.mean);
  rep.inequality_violated = rep.solver_value < rep.f_average;
  return rep;
}

}  // namespace bmolab
