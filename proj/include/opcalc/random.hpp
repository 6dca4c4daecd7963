#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "opcalc/core.hpp"

namespace opcalc {

/// The single generator behind every random draw. mt19937_64 has a fixed
/// output sequence across standard libraries; the distributions below are
/// written out by hand because std:: distributions are not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  Vector vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }

  Vector unit_vector(Index n) {
    Vector v = vector(n);
    return v / v.norm();
  }

  RealVector real_vector(Index n) {
    RealVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Operator matrix(Index rows, Index cols) {
    Operator m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }

  Index index(Index n) { return static_cast<Index>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace opcalc
