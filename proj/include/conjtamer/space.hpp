#pragma once

#include <cmath>
#include <cstddef>

#include "conjtamer/errors.hpp"

namespace conjtamer {

enum class SpaceKind { Interval, Circle };

/// Uniform grid on [0,1] (interval) or R/Z (circle).
struct Space {
  SpaceKind kind = SpaceKind::Interval;
  int grid_size = 4096;

  static Space interval(int grid_size = 4096) { return checked({SpaceKind::Interval, grid_size}); }
  static Space circle(int grid_size = 4096) { return checked({SpaceKind::Circle, grid_size}); }

  static Space checked(Space s) {
    const int n = s.grid_size;
    if (n < 16 || (n & (n - 1)) != 0)
      throw Error(ErrorCode::InvalidSpace, "grid_size must be a power of two >= 16");
    return s;
  }

  bool is_circle() const { return kind == SpaceKind::Circle; }
  double step() const { return 1.0 / grid_size; }
  /// Number of stored samples: the interval keeps its right endpoint.
  std::size_t sample_count() const {
    return static_cast<std::size_t>(grid_size) + (is_circle() ? 0 : 1);
  }
  double node(std::size_t i) const { return static_cast<double>(i) / grid_size; }

  /// Circle: representative in [0,1). Interval: clamped to [0,1].
  double reduce(double x) const {
    if (is_circle()) {
      double r = x - std::floor(x);
      return r >= 1.0 ? 0.0 : r;
    }
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
  }

  /// Distance in the space (circular distance on the circle).
  double distance(double a, double b) const {
    double d = std::abs(a - b);
    if (is_circle()) {
      d -= std::floor(d);
      d = std::min(d, 1.0 - d);
    }
    return d;
  }

  friend bool operator==(const Space&, const Space&) = default;
};

inline const char* to_string(SpaceKind k) { return k == SpaceKind::Circle ? "circle" : "interval"; }

inline void require_same_space(const Space& a, const Space& b) {
  if (!(a == b)) throw Error(ErrorCode::SpaceMismatch, "operands live on different spaces or grids");
}

}  // namespace conjtamer
