#pragma once

#include <optional>
#include <vector>

#include "conjtamer/action.hpp"
#include "conjtamer/diffeo.hpp"

namespace conjtamer {

struct PeriodicOrbit {
  std::vector<double> points;
  int period = 1;
  /// log Df^N at each orbit point (equal up to rounding).
  std::vector<double> log_multipliers;
  bool hyperbolic = false;
  /// f^N is the identity on the whole grid; points holds a single representative.
  bool identity_like = false;

  double log_multiplier() const { return log_multipliers.front(); }
};

struct PeriodicSearch {
  double tol = 1e-10;
  /// Orbits with |log Df^N| above this are hyperbolic.
  double hyperbolic_threshold = 1e-6;
};

/// Sign-change scan of f^N(x) - x - p on the grid for N = 1..n_max, refined
/// by bisection. Orbits of smaller minimal period are reported once, at that
/// period. The scan stops at the first N for which f^N is identity-like.
std::vector<PeriodicOrbit> find_periodic_points(const Diffeo& f, int n_max, PeriodicSearch opts = {});

struct RotationNumber {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// (F^iters(x) - x) / iters on a lift, averaged over x = 0, 1/3, 2/3.
RotationNumber rotation_number(const Diffeo& f, int iters);

struct ResilientWitness {
  Word f_word;
  Word g_word;
  double x = 0.0;
  double y = 0.0;
  /// f(x)-x, f(y)-f(x), g(x)-f(y), g(y)-g(x), y-g(y).
  std::vector<double> margins;
};

/// The five gaps of x < f(x) < f(y) < g(x) < g(y) < y. On the circle the
/// images are read in the window [x, x+1) and y must lie in (x, x+1).
std::vector<double> resilient_margins(const Diffeo& f, const Diffeo& g, double x, double y);

/// Exhaustive search over pairs of distinct nontrivial elements of B(L) and
/// pairs x < y of the search grid with spacing `resolution`. Returns the
/// lexicographically smallest (f index, g index, x index, y index) witness
/// whose margins all exceed `resolution`.
std::optional<ResilientWitness> detect_resilient(const Action& a, int L, double resolution,
                                                 std::size_t cap = kDefaultSizeCap);

/// Distinct points of {e(x) : e in B(radius)}, merged within tol.
std::vector<double> gamma_orbit(const Action& a, double x, int radius, double tol = 1e-9);

}  // namespace conjtamer
