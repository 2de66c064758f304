#pragma once

#include <span>
#include <vector>

#include "conjtamer/space.hpp"

namespace conjtamer {

namespace detail {

/// Four-point Lagrange interpolation of uniform samples. Interval grids use a
/// one-sided stencil in the end cells; circle grids wrap around.
double cubic_interpolate(const Space& space, std::span<const double> samples, double x);
double cubic_in_cell(const Space& space, std::span<const double> samples, std::size_t cell, double x);

}  // namespace detail

/// Real-valued samples on the nodes of a Space.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Space space, std::vector<double> samples);

  static GridFunction zeros(Space space) {
    return GridFunction(space, std::vector<double>(space.sample_count(), 0.0));
  }
  template <typename F>
  static GridFunction from_function(Space space, F&& f) {
    std::vector<double> v(space.sample_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(space.node(i));
    return GridFunction(space, std::move(v));
  }

  const Space& space() const { return space_; }
  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Interpolated value at x (reduced into the space).
  double at(double x) const { return detail::cubic_interpolate(space_, samples_, x); }

  double sup_norm() const;
  /// Integral of exp of the interpolant over [0,1], Gauss-Legendre per cell.
  double integral_of_exp() const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction operator*(double s) const;
  GridFunction shifted(double c) const;

 private:
  Space space_{};
  std::vector<double> samples_;
};

}  // namespace conjtamer
