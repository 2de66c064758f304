#pragma once

#include <optional>
#include <vector>

#include "conjtamer/action.hpp"
#include "conjtamer/periodic.hpp"

namespace conjtamer {

/// Homeomorphism psi that equals the power germ x_j + sign(y - x_j) r a (|y - x_j|/r)^{1/alpha}
/// near each flagged point x_j, blended C^1 into the identity at distance r.
/// It is C^1 away from the flagged points; at them Dpsi is infinite
/// (alpha > 1). Conjugates psi o g o psi^{-1} of maps that permute the
/// flagged points are C^1 and are evaluated through the closed-form germ.
class Flattening {
 public:
  Flattening() = default;
  Flattening(Space space, std::vector<double> points, double alpha, double radius);
  static Flattening identity(Space space) { return Flattening(space, {}, 1.0, 0.05); }

  const Space& space() const { return space_; }
  const std::vector<double>& points() const { return points_; }
  double alpha() const { return alpha_; }
  double radius() const { return radius_; }
  bool is_identity() const { return points_.empty() || alpha_ == 1.0; }

  /// Lift values (circle inputs may be any real).
  double value(double x) const;
  double inverse(double y) const;
  /// log Dpsi(x); +infinity at flagged points when alpha > 1.
  double log_derivative_at(double x) const;

  /// psi o g o psi^{-1} at y, pointwise.
  double conjugate_value(const Diffeo& g, double y) const;
  double conjugate_log_derivative(const Diffeo& g, double y) const;
  /// The conjugate sampled on the grid.
  Diffeo conjugate(const Diffeo& g) const;

  /// Profile on [0,1]: p(t) = (1 - b(t)) a t^{1/alpha} + b(t) t, with b a
  /// smoothstep on [1/2, 1].
  double profile(double t) const;
  double profile_log_derivative(double t) const;
  double profile_inverse(double s) const;

 private:
  struct Zone {
    int index = -1;
    double d = 0.0;  // signed offset from the flagged point
  };
  struct Germ {
    double xj = 0.0;
    double xk_lift = 0.0;
    double dz = 0.0;      // psi^{-1}(y) - x_j
    double dw = 0.0;      // g(psi^{-1}(y)) - g(x_j)
    double secant = 0.0;  // log(dw / dz)
  };
  Zone zone(double x) const;
  double inverse_offset(double d) const;
  /// Germ data when y is near x_j and g maps x_j to a flagged point.
  std::optional<Germ> germ(const Diffeo& g, double y) const;

  Space space_{};
  std::vector<double> points_;
  double alpha_ = 1.0;
  double radius_ = 0.05;
  double a_ = 1.0;
};

struct FlattenOptions {
  double delta = 0.1;
  std::optional<double> alpha_override;
  /// Germ radius: min(radius_cap, half the minimal gap, distance to unflagged endpoints).
  double radius_cap = 0.25;
  int period_max = 4;
  int orbit_radius = 8;
  std::size_t max_points = 64;
  PeriodicSearch periodic{};
};

struct FlaggedOrbit {
  std::size_t generator = 0;
  PeriodicOrbit orbit;
};

struct FlattenResult {
  Flattening psi;
  Action tamed;
  double alpha = 1.0;
  /// Hyperbolic periodic orbits of the generators.
  std::vector<FlaggedOrbit> hyperbolic;
};

/// Flags the Gamma-closure of the generators' hyperbolic periodic points,
/// picks alpha = max(1, max |log multiplier| / delta) and conjugates.
/// Throws InfiniteHyperbolicSet when the closure does not stabilise.
FlattenResult flatten_hyperbolic(const Action& a, const FlattenOptions& opts);

}  // namespace conjtamer
