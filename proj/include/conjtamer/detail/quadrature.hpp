#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "conjtamer/space.hpp"

namespace conjtamer::detail {

inline double lagrange4(double t, double y0, double y1, double y2, double y3) {
  const double t0 = t, t1 = t - 1.0, t2 = t - 2.0, t3 = t - 3.0;
  return -y0 * t1 * t2 * t3 / 6.0 + y1 * t0 * t2 * t3 / 2.0 - y2 * t0 * t1 * t3 / 2.0 +
         y3 * t0 * t1 * t2 / 6.0;
}

/// Five-point Gauss-Legendre rule on [start, start + length]. The length is
/// passed separately so tiny intervals near 1 keep full relative precision.
template <typename F>
double gauss_legendre(double start, double length, F&& f) {
  static constexpr std::array<double, 5> nodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                  -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.5688888888888889, 0.4786286704993665,
                                                    0.4786286704993665, 0.2369268850561891,
                                                    0.2369268850561891};
  const double half = 0.5 * length;
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(start + half * (1.0 + nodes[k]));
  return sum * half;
}

}  // namespace conjtamer::detail
