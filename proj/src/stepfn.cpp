#include "bmolab/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bmolab/util.hpp"

namespace bmolab {

namespace {
constexpr double kMinInterval = 1e-13;  // shorter averages are refused, not mis-rounded
}

int PrefixSums::piece_index(double t) const {
  auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  int i = static_cast<int>(it - breaks.begin()) - 1;
  return std::clamp(i, 0, piece_count() - 1);
}

double PrefixSums::eval1(double t) const {
  int i = piece_index(t);
  return c1[i] + s1[i] * (t - breaks[i]);
}

double PrefixSums::eval2(double t) const {
  int i = piece_index(t);
  return c2[i] + s2[i] * (t - breaks[i]);
}

double PrefixSums::eval1_periodic(double t) const {
  double T = total_length();
  double k = std::floor(t / T);
  return k * c1.back() + eval1(t - k * T);
}

double PrefixSums::eval2_periodic(double t) const {
  double T = total_length();
  double k = std::floor(t / T);
  return k * c2.back() + eval2(t - k * T);
}

void PrefixSums::integrals(double a, double b, double* s1_out, double* s2_out) const {
  int ia = piece_index(a), ib = piece_index(b);
  if (ib > ia && b <= breaks[ib]) --ib;
  if (ia >= ib) {
    double L = b - a;
    *s1_out = s1[ia] * L;
    *s2_out = s2[ia] * L;
    return;
  }
  double head = breaks[ia + 1] - a;
  double tail = b - breaks[ib];
  *s1_out = s1[ia] * head + (c1[ib] - c1[ia + 1]) + s1[ib] * tail;
  *s2_out = s2[ia] * head + (c2[ib] - c2[ia + 1]) + s2[ib] * tail;
}

void PrefixSums::integrals_periodic(double a, double b, double* s1_out, double* s2_out) const {
  double T = total_length();
  double k = std::floor(a / T);
  a -= k * T;
  b -= k * T;
  if (b <= T) {
    integrals(a, b, s1_out, s2_out);
    return;
  }
  double whole = std::floor((b - T) / T);  // full periods after the head span
  double rest = b - (whole + 1.0) * T;     // in [0, T)
  double h1, h2;
  integrals(a, T, &h1, &h2);
  double t1 = 0.0, t2 = 0.0;
  if (rest > 0.0) integrals(0.0, std::min(rest, T), &t1, &t2);
  *s1_out = h1 + whole * c1.back() + t1;
  *s2_out = h2 + whole * c2.back() + t2;
}

PrefixSums PrefixSums::build(const std::vector<double>& lengths,
                             const std::vector<double>& w1,
                             const std::vector<double>& w2) {
  PrefixSums ps;
  size_t n = lengths.size();
  ps.breaks.resize(n + 1);
  ps.c1.resize(n + 1);
  ps.c2.resize(n + 1);
  ps.s1 = w1;
  ps.s2 = w2;
  ps.breaks[0] = ps.c1[0] = ps.c2[0] = 0.0;
  KahanSum b, a1, a2;
  for (size_t i = 0; i < n; ++i) {
    b.add(lengths[i]);
    a1.add(lengths[i] * w1[i]);
    a2.add(lengths[i] * w2[i]);
    ps.breaks[i + 1] = b.value();
    ps.c1[i + 1] = a1.value();
    ps.c2[i + 1] = a2.value();
  }
  return ps;
}

StepFunction::StepFunction(Space space, std::vector<Piece> pieces, double sum_tol)
    : space_(space), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("StepFunction: no pieces");
  KahanSum total;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (!(p.length > 0.0) || !std::isfinite(p.length))
      throw std::invalid_argument("StepFunction: pieces[" + std::to_string(i) +
                                  "].length must be positive");
    if (!std::isfinite(p.value))
      throw std::invalid_argument("StepFunction: pieces[" + std::to_string(i) +
                                  "].value must be finite");
    total.add(p.length);
  }
  double sum = total.value();
  if (std::abs(sum - 1.0) > sum_tol + 1e-15)
    throw std::invalid_argument("StepFunction: piece lengths sum to " + fmt_g17(sum) +
                                ", not 1 within " + fmt_g17(sum_tol));
  std::vector<double> lengths(pieces_.size()), w1(pieces_.size()), w2(pieces_.size());
  for (size_t i = 0; i < pieces_.size(); ++i) {
    pieces_[i].length /= sum;
    lengths[i] = pieces_[i].length;
    w1[i] = pieces_[i].value;
    w2[i] = pieces_[i].value * pieces_[i].value;
  }
  ps_ = PrefixSums::build(lengths, w1, w2);
  ps_.breaks.back() = 1.0;  // pin the right endpoint exactly
  min_v_ = max_v_ = pieces_[0].value;
  for (const Piece& p : pieces_) {
    min_v_ = std::min(min_v_, p.value);
    max_v_ = std::max(max_v_, p.value);
  }
}

StepFunction StepFunction::constant(double c, Space space) {
  return StepFunction(space, {{1.0, c}});
}

double StepFunction::value_at(double t) const {
  if (space_ == Space::Circle) t -= std::floor(t);
  return pieces_[ps_.piece_index(t)].value;
}

void StepFunction::check_range(double a, double b) const {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
    throw std::invalid_argument("average: need a < b");
  if (b - a < kMinInterval)
    throw std::invalid_argument("average: interval shorter than " + fmt_g17(kMinInterval));
  if (space_ == Space::Interval) {
    if (a < -1e-12 || b > 1.0 + 1e-12)
      throw std::invalid_argument("average: [a,b] must lie in [0,1] for interval functions");
  }
}

double StepFunction::average(double a, double b) const {
  return lift_average(a, b).x1;
}

double StepFunction::average_sq(double a, double b) const {
  return lift_average(a, b).x2;
}

PlanePoint StepFunction::lift_average(double a, double b) const {
  check_range(a, b);
  double S1, S2;
  if (space_ == Space::Interval) {
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    ps_.integrals(a, b, &S1, &S2);
  } else {
    ps_.integrals_periodic(a, b, &S1, &S2);
  }
  return {S1 / (b - a), S2 / (b - a)};
}

PlaneStepFunction::PlaneStepFunction(Space space, std::vector<double> lengths,
                                     std::vector<PlanePoint> values)
    : space_(space), values_(std::move(values)) {
  if (lengths.size() != values_.size() || values_.empty())
    throw std::invalid_argument("PlaneStepFunction: mismatched or empty pieces");
  std::vector<double> w1(values_.size()), w2(values_.size());
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!(lengths[i] > 0.0))
      throw std::invalid_argument("PlaneStepFunction: lengths must be positive");
    w1[i] = values_[i].x1;
    w2[i] = values_[i].x2;
  }
  ps_ = PrefixSums::build(lengths, w1, w2);
  double total = ps_.breaks.back();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("PlaneStepFunction: lengths must sum to 1");
  ps_.breaks.back() = 1.0;
}

PlanePoint PlaneStepFunction::value_at(double t) const {
  if (space_ == Space::Circle) t -= std::floor(t);
  return values_[ps_.piece_index(t)];
}

PlanePoint PlaneStepFunction::average(double a, double b) const {
  if (!(b > a)) throw std::invalid_argument("average: need a < b");
  if (b - a < kMinInterval)
    throw std::invalid_argument("average: interval shorter than " + fmt_g17(kMinInterval));
  double S1, S2;
  if (space_ == Space::Interval) {
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    ps_.integrals(a, b, &S1, &S2);
  } else {
    ps_.integrals_periodic(a, b, &S1, &S2);
  }
  return {S1 / (b - a), S2 / (b - a)};
}

int PlaneStepFunction::span_pieces(double a, double b) const {
  int ia = ps_.piece_index(std::nextafter(a, b));
  int ib = ps_.piece_index(std::nextafter(b, a));
  return std::max(1, ib - ia + 1);
}

PlaneStepFunction lift(const StepFunction& f) {
  std::vector<double> lengths;
  std::vector<PlanePoint> values;
  lengths.reserve(f.pieces().size());
  values.reserve(f.pieces().size());
  for (const Piece& p : f.pieces()) {
    lengths.push_back(p.length);
    values.push_back({p.value, p.value * p.value});
  }
  return PlaneStepFunction(f.space(), std::move(lengths), std::move(values));
}

PlanePoint gamma(const PlaneStepFunction& psi, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("gamma: need t > 0");
  if (t > 1.0 + 1e-12) throw std::invalid_argument("gamma: need t <= 1");
  t = std::min(t, 1.0);
  if (t <= psi.prefix().breaks[1]) return psi.values()[0];  // constant prefix, exact
  return psi.average(0.0, t);
}

}  // namespace bmolab
