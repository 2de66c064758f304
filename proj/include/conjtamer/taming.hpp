#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "conjtamer/action.hpp"

namespace conjtamer {

/// Truncated measure mu = sum over the ball B(N) of lambda^l(e) (e^{-1})_* Leb
/// and its normalised distribution function
///
///   F(x) = sum lambda^l(e) (e(x) - e(0)) / sum lambda^l(e),
///
/// which is the same series as the one over e^{-1} because balls are
/// symmetric. On the circle F is a lift with F(x+1) = F(x) + 1.
class DeroinMeasure {
 public:
  DeroinMeasure() = default;

  double lambda() const { return lambda_; }
  int radius() const { return radius_; }
  /// F at the grid nodes.
  const GridFunction& cdf() const { return cdf_; }
  /// Unnormalised truncated mass sum_{l(e) <= N} lambda^l(e).
  double mass() const { return mass_; }
  /// sum_{n > N} lambda^n |S(n)|, unnormalised.
  double tail_bound() const { return tail_; }
  /// True when the tail comes from exact sphere counts (free abelian groups),
  /// false when the sphere growth was extrapolated from the measured ratio.
  bool tail_exact() const { return tail_exact_; }
  /// Measured sphere sizes |S(0)|, ..., |S(N)|.
  const std::vector<std::size_t>& sphere_sizes() const { return spheres_; }
  /// Smallest C with |B(n)| <= C ((lambda+1)/(2 lambda))^n for n <= N.
  double growth_constant() const { return growth_constant_; }
  /// 2C / (1 - lambda') with lambda' = (lambda+1)/2.
  double mass_bound() const { return 2.0 * growth_constant_ / (1.0 - 0.5 * (lambda_ + 1.0)); }

  /// F(x) by direct summation over the ball (lift on the circle).
  double value(double x) const;
  /// dF/dx(x).
  double density(double x) const;
  std::pair<double, double> value_and_density(double x) const;
  /// F^{-1}(y) (lift on the circle).
  double inverse(double y) const;

  const Space& space() const { return cdf_.space(); }

 private:
  friend DeroinMeasure deroin_cdf(const Action& a, double lambda, int N);
  struct Series;

  double lambda_ = 0.5;
  int radius_ = 0;
  GridFunction cdf_;
  double mass_ = 1.0;
  double tail_ = 0.0;
  bool tail_exact_ = true;
  std::vector<std::size_t> spheres_;
  double growth_constant_ = 1.0;
  std::shared_ptr<const Series> series_;
};

/// Throws LambdaOutOfRange unless 0 < lambda < 1, SizeOverflow when the ball
/// exceeds the size cap.
DeroinMeasure deroin_cdf(const Action& a, double lambda, int N);

struct LipschitzEstimate {
  std::string name;
  /// Maximal difference quotients of the tamed map over spacings h and 2h.
  double dq_h = 0.0;
  double dq_2h = 0.0;
  double inverse_dq_h = 0.0;
  double inverse_dq_2h = 0.0;
  /// Same quotients for the untamed generator.
  double untamed_dq_h = 0.0;
  double untamed_inverse_dq_h = 0.0;
};

struct TamingReport {
  double lambda = 0.5;
  int radius = 0;
  double mass = 1.0;
  double tail_bound = 0.0;
  /// tail_bound / mass.
  double slack = 0.0;
  /// (1/lambda)(1 + slack).
  double bound = 2.0;
  std::vector<LipschitzEstimate> generators;
  bool certified = false;
  /// Empty when certified.
  std::string reason;
};

struct TamingResult {
  DeroinMeasure measure;
  Action tamed;
  TamingReport report;
};

/// F o g o F^{-1} for every generator g. The report quotients come from the
/// pointwise conjugate at the nodes; the tamed maps are sampled from its
/// log-derivative log rho(g x) + log Dg(x) - log rho(x), x = F^{-1}(y).
TamingResult tame_lipschitz(const Action& a, double lambda, int N);

/// F(g(F^{-1}(y))) as a lift.
double tamed_value(const DeroinMeasure& m, const Diffeo& g, double y);

struct PushforwardCheck {
  std::size_t intervals = 0;
  std::size_t violations = 0;
  /// Smallest value of mu(I)/lambda + 2 tail - mu(g^{-1} I), normalised.
  double worst_margin = 0.0;
};

/// mu(g^{-1} I) <= mu(I)/lambda + 2 tail_bound for every alphabet letter g,
/// its inverse and every grid interval I.
PushforwardCheck check_pushforward(const DeroinMeasure& m, const Action& a);

}  // namespace conjtamer
