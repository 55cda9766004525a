#include "bmolab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bmolab/oscillation.hpp"
#include "bmolab/util.hpp"

namespace bmolab {

double ExtremalSpec::s() const {
  return std::sqrt(lambda * lambda / 4.0 + epsilon * epsilon);
}

double ExtremalSpec::a() const {
  double sv = s();
  return (sv - lambda / 2.0) / (sv + lambda / 2.0);
}

double ExtremalSpec::value(int n) const {
  return (static_cast<double>(n) + 0.5) * lambda - s();
}

int default_piece_count(double lambda, double epsilon) {
  ExtremalSpec spec{lambda, epsilon, 1};
  double a = spec.a();
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("default_piece_count: bad parameters");
  int n = static_cast<int>(std::ceil(std::log(1e-12) / std::log(a)));
  return std::clamp(n, 1, 4000);
}

StepFunction build_extremal(const ExtremalSpec& spec) {
  if (spec.n_pieces < 1) throw std::invalid_argument("build_extremal: n_pieces must be >= 1");
  if (!(spec.lambda > 0.0) || !(spec.epsilon > 0.0))
    throw std::invalid_argument("build_extremal: lambda and epsilon must be positive");
  int N = spec.n_pieces;
  double a = spec.a();
  std::vector<Piece> pieces;
  pieces.reserve(N + 1);
  double aN = std::pow(a, N);
  pieces.push_back({aN, spec.value(N)});  // tail closure
  for (int n = N - 1; n >= 0; --n) {
    double an = std::pow(a, n);
    double an1 = std::pow(a, n + 1);
    pieces.push_back({an - an1, spec.value(n)});
  }
  return StepFunction(Space::Interval, std::move(pieces));
}

ExpAverage exp_average(const ExtremalSpec& spec, double mu) {
  double a = spec.a();
  int N = spec.n_pieces;
  ExpAverage out;
  out.ratio = a * std::exp(mu * spec.lambda);

  KahanSum partial;
  double an = 1.0;
  for (int n = 0; n < N; ++n) {
    double an1 = an * a;
    partial.add((an - an1) * std::exp(mu * spec.value(n)));
    an = an1;
  }
  out.partial_sum = partial.value();

  if (out.ratio >= 1.0 - 1e-15) {
    out.divergent = true;
    out.value = out.partial_sum;
    out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  // Exact geometric tail: sum_{n>=N} (1-a) a^n e^{mu v_n}
  //   = a^N e^{mu v_N} (1-a)/(1-r),  r = a e^{mu lambda}.
  double tail = an * std::exp(mu * spec.value(N)) * (1.0 - a) / (1.0 - out.ratio);
  out.tail_bound = tail;
  out.value = out.partial_sum + tail;
  return out;
}

long long partial_sum_exceeds(const ExtremalSpec& spec, double mu, double threshold,
                              long long max_terms) {
  double a = spec.a();
  double r = a * std::exp(mu * spec.lambda);
  double term = (1.0 - a) * std::exp(mu * spec.value(0));
  KahanSum sum;
  for (long long n = 0; n < max_terms; ++n) {
    sum.add(term);
    if (sum.value() > threshold) return n + 1;
    term *= r;
    if (std::isinf(term)) return n + 2 <= max_terms ? n + 2 : -1;
  }
  return -1;
}

TrajectoryReport verify_trajectory(const ExtremalSpec& spec) {
  TrajectoryReport rep;
  const int N = spec.n_pieces;
  const double a = spec.a();
  const double lam = spec.lambda, eps = spec.epsilon;
  const double v0 = spec.value(0);
  StepFunction phi = build_extremal(spec);
  PlaneStepFunction psi = lift(phi);

  // Prefix curve hits the ray tips: gamma(a^n) = (n*lambda, (n*lambda)^2 + eps^2)
  // up to the tail-closure defect a^{N-n} * (|v0| resp. |2N*lambda*v0 + v0^2 - eps^2|).
  {
    double worst = 0.0, worst_bound = 0.0;
    for (int n = 1; n < N; ++n) {
      double an = std::pow(a, n);
      PlanePoint g = gamma(psi, an);
      double tail = std::pow(a, N - n);
      double b1 = tail * std::abs(v0) + 1e-9;
      double b2 = tail * std::abs(2.0 * N * lam * v0 + v0 * v0 - eps * eps) + 1e-9;
      double e1 = std::abs(g.x1 - lam * n);
      double e2 = std::abs(g.x2 - (lam * n * lam * n + eps * eps));
      if (e1 / b1 > worst) {
        worst = e1 / b1;
        worst_bound = b1;
      }
      if (e2 / b2 > worst) {
        worst = e2 / b2;
        worst_bound = b2;
      }
    }
    rep.checks.push_back({"prefix curve hits ray tips (relative to tail bound)", worst,
                          1.0, worst <= 1.0});
    (void)worst_bound;
  }

  {
    double mean = phi.average(0.0, 1.0);
    double bound = std::pow(a, N) * std::abs(v0) + 1e-12;
    rep.checks.push_back({"global mean = 0", std::abs(mean), bound, std::abs(mean) <= bound});
  }

  {
    double var = variance(phi, 0.0, 1.0);
    double bound = std::pow(a, N) *
                       std::abs(2.0 * N * lam * v0 + v0 * v0 - eps * eps) +
                   1e-10;
    rep.checks.push_back({"global variance = eps^2", std::abs(var - eps * eps), bound,
                          std::abs(var - eps * eps) <= bound});
  }

  {
    NormValue w = weak_bmo(phi, lam);
    double err = std::abs(w.value - eps);
    rep.checks.push_back({"weak norm = eps", err, 1e-6, err <= 1e-6});
  }

  {
    CombDomain d(lam, eps + 1e-9);
    Membership m = membership_A(phi, d, /*strict=*/false);
    rep.checks.push_back({"member of the class at eps + 1e-9", m.weak_norm, eps + 1e-9,
                          m.member});
  }

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace bmolab
