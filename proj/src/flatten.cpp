#include "conjtamer/flatten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conjtamer {

namespace {

constexpr double kT0 = 0.5;

double wrap(const Space& s, double d) { return s.is_circle() ? d - std::round(d) : d; }

}  // namespace

Flattening::Flattening(Space space, std::vector<double> points, double alpha, double radius)
    : space_(space), points_(std::move(points)), alpha_(alpha), radius_(radius) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::NoAdmissibleRadius, "flattening radius must be positive");
  std::sort(points_.begin(), points_.end());
  a_ = std::pow(kT0, 1.0 - 1.0 / alpha_);
}

double Flattening::profile(double t) const {
  if (t <= kT0) return a_ * std::pow(t, 1.0 / alpha_);
  if (t >= 1.0) return t;
  const double s = (t - kT0) / (1.0 - kT0);
  const double b = s * s * (3.0 - 2.0 * s);
  return (1.0 - b) * a_ * std::pow(t, 1.0 / alpha_) + b * t;
}

double Flattening::profile_log_derivative(double t) const {
  if (t <= 0.0) return alpha_ > 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  if (t < kT0) return std::log(a_ / alpha_) + (1.0 / alpha_ - 1.0) * std::log(t);
  if (t >= 1.0) return 0.0;
  const double s = (t - kT0) / (1.0 - kT0);
  const double b = s * s * (3.0 - 2.0 * s);
  const double db = 6.0 * s * (1.0 - s) / (1.0 - kT0);
  const double germ = a_ * std::pow(t, 1.0 / alpha_);
  const double dgerm = germ / (alpha_ * t);
  return std::log((1.0 - b) * dgerm + b + db * (t - germ));
}

double Flattening::profile_inverse(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return s;
  if (s <= kT0) return std::pow(s / a_, alpha_);
  double lo = kT0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    (profile(m) < s ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

Flattening::Zone Flattening::zone(double x) const {
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const double d = wrap(space_, x - points_[j]);
    if (std::abs(d) < radius_) return {static_cast<int>(j), d};
  }
  return {};
}

double Flattening::value(double x) const {
  if (is_identity()) return x;
  const Zone z = zone(x);
  if (z.index < 0) return x;
  const double t = std::abs(z.d) / radius_;
  return (x - z.d) + (z.d < 0.0 ? -radius_ : radius_) * profile(t);
}

double Flattening::inverse(double y) const {
  if (is_identity()) return y;
  const Zone z = zone(y);
  if (z.index < 0) return y;
  return (y - z.d) + inverse_offset(z.d);
}

double Flattening::inverse_offset(double d) const {
  return (d < 0.0 ? -radius_ : radius_) * profile_inverse(std::abs(d) / radius_);
}

double Flattening::log_derivative_at(double x) const {
  if (is_identity()) return 0.0;
  const Zone z = zone(x);
  if (z.index < 0) return 0.0;
  return profile_log_derivative(std::abs(z.d) / radius_);
}

std::optional<Flattening::Germ> Flattening::germ(const Diffeo& g, double y) const {
  if (is_identity()) return std::nullopt;
  const Zone zy = zone(y);
  if (zy.index < 0) return std::nullopt;
  const double xj = points_[static_cast<std::size_t>(zy.index)];
  const double gxj = g.lift(xj);
  const Zone zk = zone(gxj);
  if (zk.index < 0 || std::abs(zk.d) > 1e-9) return std::nullopt;
  Germ r;
  r.xj = xj;
  r.xk_lift = gxj - zk.d;
  r.dz = inverse_offset(zy.d);
  if (r.dz == 0.0) {
    r.secant = g.log_derivative_at(xj);
    r.dw = 0.0;
  } else {
    r.secant = g.secant_log(xj, r.dz);
    r.dw = r.dz * std::exp(r.secant);
  }
  if (std::abs(r.dw) >= radius_) return std::nullopt;
  return r;
}

double Flattening::conjugate_value(const Diffeo& g, double y) const {
  if (const auto gm = germ(g, y)) {
    // Offsets from the flagged points are carried through g as secants, so
    // points next to a flagged point keep full relative precision.
    const double t = std::abs(gm->dw) / radius_;
    return gm->xk_lift + (gm->dw < 0.0 ? -radius_ : radius_) * profile(t);
  }
  return value(g.lift(inverse(y)));
}

double Flattening::conjugate_log_derivative(const Diffeo& g, double y) const {
  if (const auto gm = germ(g, y)) {
    const double tz = std::abs(gm->dz) / radius_;
    const double tw = std::abs(gm->dw) / radius_;
    const double z = gm->xj + gm->dz;
    if (tz < kT0 && tw < kT0) return (1.0 / alpha_ - 1.0) * gm->secant + g.log_derivative_at(z);
    return profile_log_derivative(tw) + g.log_derivative_at(z) - profile_log_derivative(tz);
  }
  const double z = inverse(y);
  return log_derivative_at(g.lift(z)) + g.log_derivative_at(z) - log_derivative_at(z);
}

Diffeo Flattening::conjugate(const Diffeo& g) const {
  require_same_space(space_, g.space());
  if (is_identity()) return g;
  std::vector<double> ld(space_.sample_count());
  parallel_for(ld.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ld[i] = conjugate_log_derivative(g, space_.node(static_cast<int>(i)));
  });
  return Diffeo::from_log_derivative(space_, std::move(ld), conjugate_value(g, 0.0));
}

FlattenResult flatten_hyperbolic(const Action& a, const FlattenOptions& opts) {
  if (!(opts.delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const Space& s = a.space();
  FlattenResult res;
  double worst = 0.0;
  std::vector<double> seeds;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    for (auto& o : find_periodic_points(a.map(i), opts.period_max, opts.periodic)) {
      if (!o.hyperbolic || o.identity_like) continue;
      worst = std::max(worst, std::abs(o.log_multiplier()));
      seeds.insert(seeds.end(), o.points.begin(), o.points.end());
      res.hyperbolic.push_back({i, std::move(o)});
    }
  }
  res.alpha = opts.alpha_override.value_or(std::max(1.0, worst / opts.delta));
  if (seeds.empty() || res.alpha == 1.0) {
    res.psi = Flattening::identity(s);
    res.tamed = a;
    return res;
  }

  const double merge = 1e-8;
  std::vector<double> flagged;
  for (double x : seeds) {
    const auto inner = gamma_orbit(a, x, opts.orbit_radius - 1, merge);
    const auto outer = gamma_orbit(a, x, opts.orbit_radius, merge);
    if (inner.size() != outer.size() || outer.size() > opts.max_points)
      throw Error(ErrorCode::InfiniteHyperbolicSet,
                  "orbit of the hyperbolic point " + std::to_string(x) + " does not close up within radius " +
                      std::to_string(opts.orbit_radius));
    for (double p : outer) {
      const bool known = std::any_of(flagged.begin(), flagged.end(), [&](double q) {
        return std::abs(wrap(s, p - q)) < merge;
      });
      if (!known) flagged.push_back(p);
    }
    if (flagged.size() > opts.max_points)
      throw Error(ErrorCode::InfiniteHyperbolicSet, "more than " + std::to_string(opts.max_points) + " flagged points");
  }
  std::sort(flagged.begin(), flagged.end());

  double r = opts.radius_cap;
  for (std::size_t i = 0; i + 1 < flagged.size(); ++i) r = std::min(r, 0.5 * (flagged[i + 1] - flagged[i]));
  if (s.is_circle() && flagged.size() > 1) r = std::min(r, 0.5 * (flagged.front() + 1.0 - flagged.back()));
  if (!s.is_circle()) {
    if (flagged.front() > 0.0) r = std::min(r, flagged.front());
    if (flagged.back() < 1.0) r = std::min(r, 1.0 - flagged.back());
  }
  if (!(r > 2.0 * s.step()))
    throw Error(ErrorCode::NoAdmissibleRadius, "flagged points are closer than the grid resolves");

  res.psi = Flattening(s, std::move(flagged), res.alpha, r);
  std::vector<Diffeo> gens;
  for (std::size_t i = 0; i < a.rank(); ++i) gens.push_back(res.psi.conjugate(a.map(i)));
  res.tamed = a.with_generators(std::move(gens));
  return res;
}

}  // namespace conjtamer
