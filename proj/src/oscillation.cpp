#include "bmolab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bmolab/util.hpp"

namespace bmolab {

namespace {

constexpr double kMinLen = 1e-12;

struct Best {
  double var = -1.0;
  double a = 0.0, b = 0.0;
  void consider(double v, double x, double y) {
    if (v > var) {
      var = v;
      a = x;
      b = y;
    }
  }
};

// Variance over [x,y] assembled from within-piece masses; the endpoint terms
// are differences of nearby breakpoints, so short straddling intervals are
// evaluated without cancellation.
double var_eval(const PrefixSums& ps, double x, double y) {
  double L = y - x;
  if (!(L >= kMinLen)) return -1.0;
  int ix = ps.piece_index(x), iy = ps.piece_index(y);
  if (y <= ps.breaks[iy] && iy > ix) --iy;
  double S1, S2;
  if (ix >= iy) {
    S1 = ps.s1[ix] * L;
    S2 = ps.s2[ix] * L;
  } else {
    double head = ps.breaks[ix + 1] - x;
    double tail = y - ps.breaks[iy];
    S1 = ps.s1[ix] * head + (ps.c1[iy] - ps.c1[ix + 1]) + ps.s1[iy] * tail;
    S2 = ps.s2[ix] * head + (ps.c2[iy] - ps.c2[ix + 1]) + ps.s2[iy] * tail;
  }
  double m1 = S1 / L;
  return std::max(0.0, S2 / L - m1 * m1);
}

// Intersect [lo,hi] with { x : c_lo <= p + q*x <= c_hi }.
void clip_affine(double& lo, double& hi, double p, double q, double c_lo, double c_hi) {
  if (std::abs(q) < 1e-300) {
    if (p < c_lo || p > c_hi) lo = hi + 1.0;
    return;
  }
  double t0 = (c_lo - p) / q, t1 = (c_hi - p) / q;
  if (t0 > t1) std::swap(t0, t1);
  lo = std::max(lo, t0);
  hi = std::min(hi, t1);
}

// Golden-section maximization of a unimodal-ish slice; used only to polish an
// already located maximum.
template <typename F>
double golden_max(F f, double lo, double hi, int iters = 60) {
  const double g = 0.6180339887498949;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

// Supremum of variance over subintervals with mean on the lattice lambda*Z.
// The mean constraint pins <phi> = lambda*m, so the variance along each
// per-piece family is a Moebius function of the sliding endpoint and the
// maximum sits at a feasible-range endpoint.
Best weak_sup_core(const PrefixSums& ps, double lambda, double x_hi, double max_len) {
  int P = ps.piece_count();
  double vmin = ps.s1[0], vmax = ps.s1[0];
  for (double v : ps.s1) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  double vscale = std::max({1.0, std::abs(vmin), std::abs(vmax)});
  double ftol = 1e-13 * vscale;                   // flat-slope threshold for h
  double mtol = 1e-10 * std::max(1.0, vscale);    // h-value matching tolerance

  long long m_lo = static_cast<long long>(std::ceil((vmin - ftol) / lambda));
  long long m_hi = static_cast<long long>(std::floor((vmax + ftol) / lambda));
  if (m_hi - m_lo > 2000000)
    throw std::invalid_argument("weak_bmo: lattice spacing too small for the value range");

  Best best;
  for (long long m = m_lo; m <= m_hi; ++m) {
    double A = lambda * static_cast<double>(m);
    auto h_at = [&](int k) { return ps.c1[k] - A * ps.breaks[k]; };
    for (int i = 0; i < P; ++i) {
      double xi0 = ps.breaks[i];
      if (xi0 >= x_hi) break;
      double xi1 = std::min(ps.breaks[i + 1], x_hi);
      double si = ps.s1[i] - A;
      double hia = h_at(i);
      double hib = hia + si * (xi1 - xi0);
      bool flat_i = std::abs(si) <= ftol;
      for (int j = i; j < P; ++j) {
        double yj0 = ps.breaks[j], yj1 = ps.breaks[j + 1];
        if (yj0 - xi1 > max_len) break;
        double sj = ps.s1[j] - A;
        double hja = h_at(j);
        double hjb = hja + sj * (yj1 - yj0);
        bool flat_j = std::abs(sj) <= ftol;
        if (std::max(hia, hib) < std::min(hja, hjb) - mtol) continue;
        if (std::min(hia, hib) > std::max(hja, hjb) + mtol) continue;

        if (i == j) {
          if (flat_i && xi1 - xi0 >= kMinLen) best.consider(0.0, xi0, xi1);
          continue;
        }

        if (!flat_i && !flat_j) {
          double beta = si / sj;
          double alpha = yj0 + (hia - hja) / sj - beta * xi0;
          double lo = xi0, hi = xi1;
          clip_affine(lo, hi, alpha, beta, yj0, yj1);
          clip_affine(lo, hi, alpha, beta - 1.0, kMinLen, max_len);
          if (lo > hi) continue;
          for (double x : {lo, hi, 0.5 * (lo + hi)}) {
            double y = std::clamp(alpha + beta * x, yj0, yj1);
            best.consider(var_eval(ps, x, y), x, y);
          }
        } else if (flat_i && !flat_j) {
          double y = yj0 + (hia - hja) / sj;
          if (y < yj0 - mtol || y > yj1 + mtol) continue;
          y = std::clamp(y, yj0, yj1);
          double lo = std::max(xi0, y - max_len);
          double hi = std::min(xi1, y - kMinLen);
          if (lo > hi) continue;
          for (double x : {lo, hi}) best.consider(var_eval(ps, x, y), x, y);
        } else if (!flat_i && flat_j) {
          double x = xi0 + (hja - hia) / si;
          if (x < xi0 - mtol || x > xi1 + mtol) continue;
          x = std::clamp(x, xi0, xi1);
          double lo = std::max(yj0, x + kMinLen);
          double hi = std::min(yj1, x + max_len);
          if (lo > hi) continue;
          for (double y : {lo, hi}) best.consider(var_eval(ps, x, y), x, y);
        } else {
          if (std::abs(hia - hja) > mtol) continue;
          for (double x : {xi0, xi1})
            for (double yc : {yj0, yj1, x + max_len}) {
              double y = std::clamp(yc, yj0, yj1);
              if (y - x < kMinLen || y - x > max_len * (1 + 1e-12)) continue;
              best.consider(var_eval(ps, x, y), x, y);
            }
        }
      }
    }
  }
  return best;
}

}  // namespace

double variance(const StepFunction& f, double a, double b) {
  double m1 = f.average(a, b);
  double m2 = f.average_sq(a, b);
  return std::max(0.0, m2 - m1 * m1);
}

NormValue bmo_norm(const StepFunction& f) {
  if (f.space() != Space::Interval)
    throw std::invalid_argument("bmo_norm: interval-space functions only");
  const PrefixSums& ps = f.prefix();
  int P = ps.piece_count();
  Best best;
  best.consider(0.0, 0.0, 1.0);

  for (int i = 0; i < P; ++i) {
    double xi0 = ps.breaks[i], xi1 = ps.breaks[i + 1];
    double vi = ps.s1[i];
    for (int j = i + 1; j < P; ++j) {
      double yj0 = ps.breaks[j], yj1 = ps.breaks[j + 1];
      double vj = ps.s1[j];

      for (double x : {xi0, xi1})
        for (double y : {yj0, yj1}) best.consider(var_eval(ps, x, y), x, y);

      // Edge criticals: with one endpoint pinned the stationarity condition
      // (vL - S1)^2 = L*S2 - S1^2 is affine in the moving endpoint.
      for (double x : {xi0, xi1}) {
        double S10 = ps.c1[j] - ps.eval1(x);
        double S20 = ps.c2[j] - ps.eval2(x);
        double L0 = yj0 - x;
        double den = S20 + vj * vj * L0 - 2.0 * vj * S10;
        if (std::abs(den) > 1e-300) {
          double t = vj * L0 - S10;
          double delta = (t * t - (L0 * S20 - S10 * S10)) / den;
          double y = yj0 + delta;
          if (y >= yj0 && y <= yj1) best.consider(var_eval(ps, x, y), x, y);
        }
      }
      for (double y : {yj0, yj1}) {
        double S10 = ps.eval1(y) - ps.c1[i];
        double S20 = ps.eval2(y) - ps.c2[i];
        double L0 = y - xi0;
        double den = S20 + vi * vi * L0 - 2.0 * vi * S10;
        if (std::abs(den) > 1e-300) {
          double t = S10 - vi * L0;
          double delta = (L0 * S20 - S10 * S10 - t * t) / den;
          double x = xi0 + delta;
          if (x >= xi0 && x <= xi1) best.consider(var_eval(ps, x, y), x, y);
        }
      }

      // Interior criticals form a ridge x + y = const with constant variance.
      double dhalf = 0.5 * (vj - vi);
      if (std::abs(dhalf) > 1e-14) {
        double e1i = ps.c1[i] - vi * xi0;
        double e1j = ps.c1[j] - vj * yj0;
        double SA = -(e1j - e1i) / dhalf;
        double lo = std::max(xi0, SA - yj1), hi = std::min(xi1, SA - yj0);
        if (lo <= hi) {
          double x = 0.5 * (lo + hi), y = SA - x;
          best.consider(var_eval(ps, x, y), x, y);
        }
      }

      // Coarse sweep as a safety net for clipped configurations.
      for (int u = 1; u < 4; ++u)
        for (int w = 1; w < 4; ++w) {
          double x = xi0 + (xi1 - xi0) * u / 4.0;
          double y = yj0 + (yj1 - yj0) * w / 4.0;
          best.consider(var_eval(ps, x, y), x, y);
        }
    }
  }

  // Local polish around the winner, accepted only on improvement.
  for (int round = 0; round < 2; ++round) {
    double a = best.a, b = best.b;
    int ia = ps.piece_index(std::min(a, 1.0 - kMinLen));
    double axlo = ps.breaks[ia], axhi = std::min(ps.breaks[ia + 1], b - kMinLen);
    if (axlo < axhi) {
      double ax = golden_max([&](double x) { return var_eval(ps, x, b); }, axlo, axhi);
      best.consider(var_eval(ps, ax, b), ax, b);
    }
    a = best.a;
    b = best.b;
    int ib = ps.piece_index(std::max(b - 1e-15, 0.0));
    double bylo = std::max(ps.breaks[ib], a + kMinLen), byhi = ps.breaks[ib + 1];
    if (bylo < byhi) {
      double by = golden_max([&](double y) { return var_eval(ps, a, y); }, bylo, byhi);
      best.consider(var_eval(ps, a, by), a, by);
    }
  }

  NormValue out;
  out.value = std::sqrt(std::max(0.0, best.var));
  out.argmax = {best.a, best.b};
  out.attained = true;
  return out;
}

NormValue weak_bmo(const StepFunction& f, double lambda) {
  if (f.space() != Space::Interval)
    throw std::invalid_argument("weak_bmo: interval-space functions only");
  if (!(lambda > 0.0)) throw std::invalid_argument("weak_bmo: lambda must be positive");
  Best best = weak_sup_core(f.prefix(), lambda, 1.0, 1.0);
  NormValue out;
  out.attained = best.var >= 0.0;
  out.value = std::sqrt(std::max(0.0, best.var));
  out.argmax = out.attained ? IntervalArg{best.a, best.b} : IntervalArg{};
  return out;
}

CircleNormValue weak_bmo_circle(const StepFunction& f, double lambda, int k_max) {
  if (f.space() != Space::Circle)
    throw std::invalid_argument("weak_bmo_circle: circle-space functions only");
  if (!(lambda > 0.0)) throw std::invalid_argument("weak_bmo_circle: lambda must be positive");
  if (k_max < 1) throw std::invalid_argument("weak_bmo_circle: k_max must be >= 1");

  const auto& pieces = f.pieces();
  std::vector<double> lengths, w1, w2;
  lengths.reserve(pieces.size() * (k_max + 1));
  for (int rep = 0; rep < k_max + 1; ++rep)
    for (const Piece& p : pieces) {
      lengths.push_back(p.length);
      w1.push_back(p.value);
      w2.push_back(p.value * p.value);
    }
  PrefixSums unrolled = PrefixSums::build(lengths, w1, w2);

  Best best = weak_sup_core(unrolled, lambda, 1.0, static_cast<double>(k_max));
  CircleNormValue out;
  out.attained = best.var >= 0.0;
  out.value = std::sqrt(std::max(0.0, best.var));
  out.argmax = out.attained ? IntervalArg{best.a, best.b} : IntervalArg{};
  double M = std::max(std::abs(f.min_value()), std::abs(f.max_value()));
  out.error_bar = 6.0 * M * M / static_cast<double>(k_max);
  return out;
}

NormValue bmo_dyadic(const StepFunction& f, int depth) {
  if (depth < 0) throw std::invalid_argument("bmo_dyadic: depth must be >= 0");
  if (depth > 26) throw std::invalid_argument("bmo_dyadic: depth too large");
  const PrefixSums& ps = f.prefix();
  Best best;
  for (int g = 0; g <= depth; ++g) {
    double step = std::ldexp(1.0, -g);
    long long count = 1LL << g;
    for (long long k = 0; k < count; ++k) {
      double a = static_cast<double>(k) * step;
      double b = (k + 1 == count) ? 1.0 : static_cast<double>(k + 1) * step;
      best.consider(var_eval(ps, a, b), a, b);
    }
  }
  NormValue out;
  out.value = std::sqrt(std::max(0.0, best.var));
  out.argmax = {best.a, best.b};
  out.attained = true;
  return out;
}

double jn_classical(double eps) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw std::invalid_argument("jn_classical: requires 0 <= eps < 1 (sharp threshold 1)");
  return std::exp(-eps) / (1.0 - eps);
}

double jn_dyadic(double eps) {
  const double thr = std::sqrt(2.0) * std::log(2.0);
  if (!(eps >= 0.0) || !(eps < thr))
    throw std::invalid_argument("jn_dyadic: requires 0 <= eps < sqrt(2)*log(2) = " +
                                fmt_g17(thr));
  double e = std::exp(eps / std::sqrt(2.0));
  return std::exp(-eps / std::sqrt(2.0)) / (2.0 - e);
}

JnBounds jn_bounds(double eps) { return {jn_classical(eps), jn_dyadic(eps)}; }

Membership membership_A(const StepFunction& f, const CombDomain& d, bool strict,
                        int circle_k_max) {
  Membership out;
  out.strict = strict;
  IntervalArg arg;
  bool attained = false;
  if (f.space() == Space::Interval) {
    NormValue w = weak_bmo(f, d.lambda());
    out.weak_norm = w.value;
    arg = w.argmax;
    attained = w.attained;
  } else {
    CircleNormValue w = weak_bmo_circle(f, d.lambda(), circle_k_max);
    out.weak_norm = w.value;
    out.circle_error_bar = w.error_bar;
    arg = w.argmax;
    attained = w.attained;
  }
  out.member = strict ? (out.weak_norm < d.epsilon()) : (out.weak_norm <= d.epsilon());
  if (!out.member && attained) out.witness = arg;
  if (f.space() == Space::Circle) {
    PlanePoint mean = f.lift_average(0.0, 1.0);
    out.circle_mean_ok = d.classify(mean).region != Region::InteriorHullComponent;
  }
  return out;
}

}  // namespace bmolab
