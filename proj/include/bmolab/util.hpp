#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bmolab {

// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

uint64_t splitmix64(uint64_t x);

// Independent substream per (seed, stream); results do not depend on call order.
std::mt19937_64 seeded_rng(uint64_t seed, uint64_t stream = 0);

// Round-trip-safe float formatting ("%.17g", C locale).
std::string fmt_g17(double x);

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual = 0.0;
  int iterations = 0;
};

}  // namespace bmolab
