#pragma once

#include <span>
#include <utility>
#include <vector>

#include "conjtamer/grid_function.hpp"

namespace conjtamer {

/// Orientation-preserving C^1 diffeomorphism of the interval or the circle,
/// stored through its log-derivative.
///
/// The log-derivative samples are the primary data. Values are recovered by
/// integrating exp of the interpolated log-derivative (Gauss-Legendre per
/// cell) and normalised so that f(0)=0, f(1)=1 on the interval or
/// f(x+1)=f(x)+1 on the circle. The normalisation shifts the stored
/// log-derivative by a constant, so values and derivative always agree
/// exactly and Df > 0 holds by construction.
///
/// Circle maps are handled as lifts with f(0) = offset in [0,1).
class Diffeo {
 public:
  Diffeo() = default;

  /// Builds from log-derivative samples. Non-finite samples throw NonFinite.
  static Diffeo from_log_derivative(Space space, std::vector<double> log_deriv, double offset = 0.0);
  static Diffeo from_log_derivative(const GridFunction& log_deriv, double offset = 0.0) {
    return from_log_derivative(log_deriv.space(), {log_deriv.samples().begin(), log_deriv.samples().end()},
                               offset);
  }
  static Diffeo identity(Space space) { return from_log_derivative(space, std::vector<double>(space.sample_count(), 0.0)); }
  /// Rigid rotation x -> x + angle on the circle.
  static Diffeo rotation(Space space, double angle);

  const Space& space() const { return space_; }
  GridFunction log_derivative() const { return GridFunction(space_, log_deriv_); }
  std::span<const double> log_derivative_samples() const { return log_deriv_; }
  double offset() const { return offset_; }
  /// Lift values at nodes 0..grid_size (the circle entry n is offset + 1).
  std::span<const double> node_values() const { return values_; }

  /// f(x), reduced into the space.
  double operator()(double x) const { return space_.reduce(lift(x)); }
  /// Lift value: circle accepts any real x; interval clamps to [0,1].
  double lift(double x) const;
  double log_derivative_at(double x) const;
  double derivative_at(double x) const;

  /// f^{-1}(y), reduced into the space.
  double inverse(double y) const { return space_.reduce(inverse_lift(y)); }
  /// Lift of the inverse: for circle maps, inverse_lift(lift(x)) = x for every real x.
  double inverse_lift(double y) const;

  /// log((f(x+dx) - f(x)) / dx), accurate for tiny |dx| (no cancellation).
  double secant_log(double x, double dx) const;

  /// Interval only: 1 - f(1 - d), accurate for tiny d.
  double complement(double d) const;

 private:
  Diffeo(Space space, std::vector<double> log_deriv, double offset);
  double cell_integral(std::size_t cell, double a, double b) const;
  double primitive(double x) const;  // integral of Df over [0, x], x in [0,1]
  double solve_primitive(double target) const;

  Space space_{};
  std::vector<double> log_deriv_;
  std::vector<double> cum_;   // cum_[i] = integral over [0, x_i]
  std::vector<double> rcum_;  // rcum_[i] = integral over [x_i, 1]
  std::vector<double> values_;
  double offset_ = 0.0;
};

/// Value and derivative at a point.
std::pair<double, double> evaluate_and_derivative(const Diffeo& f, double x);

/// f o g. Log-derivative: log Dg + (log Df) o g at the nodes.
Diffeo compose(const Diffeo& f, const Diffeo& g);

/// Inverse map; log-derivative -(log Df) o f^{-1}.
Diffeo invert(const Diffeo& f);

/// phi o f o phi^{-1}.
Diffeo conjugate_action(const Diffeo& f, const Diffeo& phi);

struct C1Distance {
  double c0 = 0.0;
  double dlog = 0.0;
};

/// Sup over nodes of |f - g| (circular on the circle) and |log Df - log Dg|.
C1Distance c1_distance(const Diffeo& f, const Diffeo& g);

/// Largest jump of the log-derivative track between adjacent nodes.
double max_log_derivative_jump(const Diffeo& f);

}  // namespace conjtamer
