#include "bmolab/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "bmolab/util.hpp"

namespace bmolab {

namespace {

constexpr double kRelMargin = 1e-9;   // children keep at least this fraction of the parent
constexpr double kLeafLength = 1e-11; // intervals shorter than this stop splitting

struct LineCoeffs {
  double k = 0.0;  // x2 = k*x1 + c
  double c = 0.0;
};

LineCoeffs chord_line(const CombDomain& d, long long n) {
  PlanePoint v = d.vertex(n);
  double k = d.chord_slope(n);
  return {k, v.x2 - k * v.x1};
}

SplitResult make_split(const PlaneStepFunction& psi, double a, double b, double m,
                       const CombDomain& d, SplitCase kind) {
  SplitResult s;
  s.kind = kind;
  s.t0 = (m - a) / (b - a);
  s.left_avg = psi.average(a, m);
  s.right_avg = psi.average(m, b);
  s.clearance = d.segment_clearance(s.left_avg, s.right_avg);
  PlanePoint parent = psi.average(a, b);
  double wl = (m - a) / (b - a), wr = (b - m) / (b - a);
  double r1 = wl * s.left_avg.x1 + wr * s.right_avg.x1 - parent.x1;
  double r2 = wl * s.left_avg.x2 + wr * s.right_avg.x2 - parent.x2;
  s.recombination_error = std::max(std::abs(r1), std::abs(r2));
  return s;
}

bool acceptable(const SplitResult& s, const CombDomain& d) {
  double tol = std::max(1e-10, d.snap_tol());
  return s.clearance <= tol && s.t0 > kRelMargin && s.t0 < 1.0 - kRelMargin;
}

// Roots of the piecewise-affine H(t) = S2(t) - k*S1(t) - c*t, where S are the
// integrals of psi from `a`; a root places the prefix average on the line.
std::vector<double> prefix_line_roots(const PlaneStepFunction& psi, double a, double b,
                                      const LineCoeffs& line) {
  const PrefixSums& ps = psi.prefix();
  auto H = [&](double t) {
    double S1, S2;
    ps.integrals(a, t, &S1, &S2);
    return S2 - line.k * S1 - line.c * (t - a);
  };
  std::vector<double> knots;
  knots.push_back(a);
  for (double br : ps.breaks)
    if (br > a + 1e-15 && br < b - 1e-15) knots.push_back(br);
  knots.push_back(b);

  double scale = 1e-12 * std::max({1.0, std::abs(line.k), std::abs(line.c)});
  std::vector<double> roots;
  double h_prev = 0.0;  // H(a) = 0 by construction
  for (size_t i = 1; i < knots.size(); ++i) {
    double h_cur = H(knots[i]);
    bool prev_zero = std::abs(h_prev) <= scale;
    bool cur_zero = std::abs(h_cur) <= scale;
    if (cur_zero && i + 1 < knots.size()) {
      roots.push_back(knots[i]);
    } else if (!prev_zero && !cur_zero && ((h_prev < 0.0) != (h_cur < 0.0))) {
      double t = knots[i - 1] + h_prev * (knots[i] - knots[i - 1]) / (h_prev - h_cur);
      roots.push_back(std::clamp(t, knots[i - 1], knots[i]));
    } else if (prev_zero && !cur_zero && i >= 2) {
      roots.push_back(knots[i - 1]);
    }
    h_prev = h_cur;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

std::vector<double> suffix_line_roots(const PlaneStepFunction& psi, double a, double b,
                                      const LineCoeffs& line) {
  const PrefixSums& ps = psi.prefix();
  auto G = [&](double t) {
    double S1, S2;
    ps.integrals(t, b, &S1, &S2);
    return S2 - line.k * S1 - line.c * (b - t);
  };
  std::vector<double> knots;
  knots.push_back(a);
  for (double br : ps.breaks)
    if (br > a + 1e-15 && br < b - 1e-15) knots.push_back(br);
  knots.push_back(b);

  double scale = 1e-12 * std::max({1.0, std::abs(line.k), std::abs(line.c)});
  std::vector<double> roots;
  double g_prev = G(knots[0]);
  for (size_t i = 1; i < knots.size(); ++i) {
    double g_cur = G(knots[i]);  // G(b) = 0 by construction
    bool prev_zero = std::abs(g_prev) <= scale;
    bool cur_zero = std::abs(g_cur) <= scale;
    if (prev_zero && i >= 2) {
      roots.push_back(knots[i - 1]);
    } else if (!prev_zero && !cur_zero && ((g_prev < 0.0) != (g_cur < 0.0))) {
      double t = knots[i - 1] + g_prev * (knots[i] - knots[i - 1]) / (g_prev - g_cur);
      roots.push_back(std::clamp(t, knots[i - 1], knots[i]));
    }
    g_prev = g_cur;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

// Case A: march the cut away from the midpoint until the chord between the
// moving child average and the parent grazes the hull, then bisect.
std::optional<SplitResult> case_a_march(const PlaneStepFunction& psi, double a, double b,
                                        const PlanePoint& x, const CombDomain& d,
                                        bool upward) {
  auto moving_clearance = [&](double t) {
    double m = a + t * (b - a);
    PlanePoint child = upward ? psi.average(a, m) : psi.average(m, b);
    return d.segment_clearance(child, x);
  };
  const int K = 512;
  double t_prev = 0.5;
  double c_prev = moving_clearance(t_prev);
  if (c_prev <= 0.0) {
    SplitResult s = make_split(psi, a, b, a + 0.5 * (b - a), d, SplitCase::A);
    if (acceptable(s, d)) return s;
  }
  for (int k = 1; k <= K; ++k) {
    double frac = static_cast<double>(k) / K;
    double t = upward ? 0.5 + 0.5 * frac * (1.0 - 2e-9) : 0.5 - 0.5 * frac * (1.0 - 2e-9);
    double c = moving_clearance(t);
    if (c <= 0.0 && c_prev > 0.0) {
      double lo = t_prev, hi = t;  // clearance positive at lo, nonpositive at hi
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (moving_clearance(mid) <= 0.0 ? hi : lo) = mid;
      }
      SplitResult s = make_split(psi, a, b, a + hi * (b - a), d, SplitCase::A);
      if (acceptable(s, d)) return s;
    }
    t_prev = t;
    c_prev = c;
  }
  return std::nullopt;
}

std::optional<SplitResult> case_b_lines(const PlaneStepFunction& psi, double a, double b,
                                        const CombDomain& d,
                                        const std::vector<long long>& chord_ids) {
  for (long long n : chord_ids) {
    LineCoeffs line = chord_line(d, n);
    for (double t : prefix_line_roots(psi, a, b, line)) {
      if (t - a < kRelMargin * (b - a) || b - t < kRelMargin * (b - a)) continue;
      SplitResult s = make_split(psi, a, b, t, d, SplitCase::BAbove);
      if (acceptable(s, d)) return s;
    }
    for (double t : suffix_line_roots(psi, a, b, line)) {
      if (t - a < kRelMargin * (b - a) || b - t < kRelMargin * (b - a)) continue;
      SplitResult s = make_split(psi, a, b, t, d, SplitCase::BBelow);
      if (acceptable(s, d)) return s;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(SplitCase c) {
  switch (c) {
    case SplitCase::A: return "A";
    case SplitCase::BAbove: return "B-above";
    case SplitCase::BBelow: return "B-below";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skipped: return "SKIPPED";
  }
  return "?";
}

SplitResult split(const PlaneStepFunction& psi, double a, double b, const CombDomain& d) {
  if (!(b > a)) throw std::invalid_argument("split: need a < b");
  PlanePoint x = psi.average(a, b);
  RegionTag tag = d.classify(x);
  if (tag.region == Region::InteriorHullComponent)
    throw std::invalid_argument("split: parent average inside the hull interior");
  if (tag.region == Region::OnRay &&
      x.x2 - x.x1 * x.x1 > d.epsilon() * d.epsilon() + d.snap_tol())
    throw std::invalid_argument("split: parent average on a forbidden ray");

  {
    SplitResult mid = make_split(psi, a, b, a + 0.5 * (b - a), d, SplitCase::A);
    if (acceptable(mid, d)) return mid;
  }

  if (tag.region == Region::OnChord || tag.region == Region::OnRay) {
    std::vector<long long> chords = tag.region == Region::OnChord
                                        ? std::vector<long long>{tag.n}
                                        : std::vector<long long>{tag.n - 1, tag.n};
    if (auto s = case_b_lines(psi, a, b, d, chords)) return *s;
  }

  // Select the crossing side for the marching construction.
  PlanePoint xl = psi.average(a, a + 0.5 * (b - a));
  double cl_left = d.segment_clearance(xl, x);
  PlanePoint xr = psi.average(a + 0.5 * (b - a), b);
  double cl_right = d.segment_clearance(x, xr);
  bool upward_first = cl_left >= cl_right;
  if (auto s = case_a_march(psi, a, b, x, d, upward_first)) return *s;
  if (auto s = case_a_march(psi, a, b, x, d, !upward_first)) return *s;

  throw ConvergenceError(
      "split: no admissible cut found for [" + fmt_g17(a) + ", " + fmt_g17(b) +
          "] (parent " + to_string(tag.region) + " at (" + fmt_g17(x.x1) + ", " +
          fmt_g17(x.x2) + "))",
      0.0, 0);
}

InductionTrace induct(const PlaneStepFunction& psi, const CombDomain& d,
                      const BellmanEvaluator& ev, int max_depth, double mass_tol) {
  InductionTrace trace;
  KahanSum leaf_sum;
  double mu = ev.mu();

  auto is_leaf = [&](double a, double b) { return psi.span_pieces(a, b) == 1; };
  auto leaf_value = [&](double a, double b) {
    return std::exp(mu * psi.value_at(0.5 * (a + b)).x1);
  };

  // Intervals still spanning several pieces but too short to cut further stay
  // in the frontier unsplit; their Bellman mass is reported, never converted.
  std::vector<std::pair<double, double>> active, stuck;
  if (is_leaf(0.0, 1.0)) {
    leaf_sum.add(leaf_value(0.0, 1.0));
    trace.leaf_mass = 1.0;
  } else {
    active.push_back({0.0, 1.0});
  }

  auto record_generation = [&]() {
    Generation g;
    KahanSum bell;
    bell.add(leaf_sum.value());
    for (const auto& bucket : {std::cref(active), std::cref(stuck)})
      for (auto [a, b] : bucket.get()) {
        PlanePoint x = psi.average(a, b);
        g.intervals.push_back({a, b, x});
        bell.add((b - a) * ev.evaluate(x).value);
      }
    g.bellman_sum = bell.value();
    trace.generations.push_back(std::move(g));
  };

  record_generation();

  auto frontier_mass = [&]() {
    double m = 0.0;
    for (auto [a, b] : active) m += b - a;
    for (auto [a, b] : stuck) m += b - a;
    return m;
  };

  int depth = 0;
  while (!active.empty() && depth < max_depth && frontier_mass() >= mass_tol) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : active) {
      SplitResult s = split(psi, a, b, d);
      ++trace.split_count;
      trace.worst_clearance = std::max(trace.worst_clearance, s.clearance);
      trace.worst_recombination = std::max(trace.worst_recombination, s.recombination_error);
      double m = a + s.t0 * (b - a);
      for (auto [ca, cb] : {std::pair{a, m}, std::pair{m, b}}) {
        if (is_leaf(ca, cb)) {
          leaf_sum.add((cb - ca) * leaf_value(ca, cb));
          trace.leaf_mass += cb - ca;
        } else if (cb - ca < kLeafLength) {
          stuck.push_back({ca, cb});
        } else {
          next.push_back({ca, cb});
        }
      }
    }
    std::sort(next.begin(), next.end());
    std::sort(stuck.begin(), stuck.end());
    active = std::move(next);
    ++depth;
    record_generation();
  }

  trace.frontier_mass = frontier_mass();
  trace.final_sum_f = leaf_sum.value();
  return trace;
}

MainInequalityReport verify_main_inequality(const StepFunction& phi, const CombDomain& d,
                                            const BellmanEvaluator& ev, int max_depth,
                                            double mass_tol) {
  MainInequalityReport rep;
  rep.membership = membership_A(phi, d, /*strict=*/false);

  KahanSum ef;
  for (const Piece& p : phi.pieces()) ef.add(p.length * std::exp(ev.mu() * p.value));
  rep.exp_avg = ef.value();

  if (!rep.membership.member) {
    rep.verdict = Verdict::Skipped;
    rep.reason = "not in the class: weak norm " + fmt_g17(rep.membership.weak_norm) +
                 " exceeds epsilon " + fmt_g17(d.epsilon());
    return rep;
  }

  PlaneStepFunction psi = lift(phi);
  PlanePoint x = psi.average(0.0, 1.0);
  RegionTag tag = d.classify(x);
  rep.root_ok = tag.region != Region::InteriorHullComponent &&
                !(tag.region == Region::OnRay &&
                  x.x2 - x.x1 * x.x1 > d.epsilon() * d.epsilon() + d.snap_tol());
  if (!rep.root_ok) {
    rep.verdict = Verdict::Skipped;
    rep.reason = "global average lies in the hull interior; interval-domain inputs "
                 "require it outside (circle inputs get this from the mean theorem)";
    return rep;
  }
  if (phi.space() == Space::Circle && !rep.membership.circle_mean_ok) {
    rep.verdict = Verdict::Fail;
    rep.reason = "circle mean landed inside the hull interior, contradicting the mean theorem";
    return rep;
  }

  rep.b0 = ev.evaluate(x).value;
  rep.trace = induct(psi, d, ev, max_depth, mass_tol);
  rep.margin = rep.b0 - rep.exp_avg;

  for (size_t k = 1; k < rep.trace.generations.size(); ++k) {
    if (rep.trace.generations[k].bellman_sum >
        rep.trace.generations[k - 1].bellman_sum + 1e-9) {
      rep.verdict = Verdict::Fail;
      rep.reason = "Bellman sums increased between generations " + std::to_string(k - 1) +
                   " and " + std::to_string(k);
      return rep;
    }
  }

  rep.verdict = rep.margin >= -1e-8 ? Verdict::Pass : Verdict::Fail;
  if (rep.verdict == Verdict::Fail)
    rep.reason = "inequality margin " + fmt_g17(rep.margin) + " below tolerance";
  return rep;
}

}  // namespace bmolab
