#include "conjtamer/diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conjtamer/detail/quadrature.hpp"
#include "conjtamer/parallel.hpp"

namespace conjtamer {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

Diffeo::Diffeo(Space space, std::vector<double> log_deriv, double offset)
    : space_(space), log_deriv_(std::move(log_deriv)), offset_(offset) {}

Diffeo Diffeo::from_log_derivative(Space space, std::vector<double> log_deriv, double offset) {
  Space::checked(space);
  if (log_deriv.size() != space.sample_count())
    throw Error(ErrorCode::InvalidArgument, "log-derivative sample count does not match the grid");
  for (double v : log_deriv)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "log-derivative sample is not finite");
  if (!std::isfinite(offset)) throw Error(ErrorCode::NonFinite, "offset is not finite");
  if (space.is_circle())
    offset -= std::floor(offset);
  else
    offset = 0.0;

  Diffeo f(space, std::move(log_deriv), offset);
  const int n = space.grid_size;
  const double h = space.step();
  std::vector<double> cells(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) cells[static_cast<std::size_t>(c)] = f.cell_integral(static_cast<std::size_t>(c), c * h, h);
  double total = 0.0;
  for (double v : cells) total += v;
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorCode::NonFinite, "exp(log-derivative) does not integrate to a finite positive mass");
  const double shift = std::log(total);
  for (double& v : f.log_deriv_) v -= shift;
  for (double& v : cells) v /= total;

  f.cum_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  f.rcum_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int c = 0; c < n; ++c) f.cum_[c + 1] = f.cum_[c] + cells[c];
  for (int c = n - 1; c >= 0; --c) f.rcum_[c] = f.rcum_[c + 1] + cells[c];
  f.cum_[n] = 1.0;
  f.rcum_[0] = 1.0;
  f.values_ = f.cum_;
  for (double& v : f.values_) v += offset;
  for (int c = 1; c < n; ++c) {
    if (!(f.cum_[c] > f.cum_[c - 1]))
      throw Error(ErrorCode::NonMonotone, "reconstructed values are not strictly increasing");
  }
  return f;
}

Diffeo Diffeo::rotation(Space space, double angle) {
  if (!space.is_circle()) throw Error(ErrorCode::NotCircle, "rotations live on the circle");
  return from_log_derivative(space, std::vector<double>(space.sample_count(), 0.0), angle);
}

double Diffeo::cell_integral(std::size_t cell, double start, double length) const {
  return detail::gauss_legendre(start, length, [&](double x) {
    return std::exp(detail::cubic_in_cell(space_, log_deriv_, cell, x));
  });
}

double Diffeo::primitive(double x) const {
  const int n = space_.grid_size;
  const double h = space_.step();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto cell = std::min<std::size_t>(static_cast<std::size_t>(x * n), static_cast<std::size_t>(n - 1));
  const double a = static_cast<double>(cell) * h;
  return cum_[cell] + cell_integral(cell, a, x - a);
}

double Diffeo::solve_primitive(double target) const {
  const int n = space_.grid_size;
  const double h = space_.step();
  if (target <= 0.0) return 0.0;
  if (target >= 1.0) return 1.0;
  auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  auto cell = static_cast<std::size_t>(std::distance(cum_.begin(), it)) - 1;
  cell = std::min<std::size_t>(cell, static_cast<std::size_t>(n - 1));
  const double a = static_cast<double>(cell) * h;
  const double r = target - cum_[cell];
  if (r <= 0.0) return a;
  const double mass = cum_[cell + 1] - cum_[cell];
  double lo = 0.0, hi = h;
  double s = std::clamp(h * r / mass, 0.0, h);
  for (int iter = 0; iter < 80; ++iter) {
    const double g = cell_integral(cell, a, s) - r;
    if (std::abs(g) <= 2.0 * kEps * r) break;
    if (g > 0.0)
      hi = s;
    else
      lo = s;
    const double slope = std::exp(detail::cubic_in_cell(space_, log_deriv_, cell, a + s));
    double next = s - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= kEps * std::max(s, 1e-300)) {
      s = next;
      break;
    }
    s = next;
  }
  return a + s;
}

double Diffeo::lift(double x) const {
  if (space_.is_circle()) {
    const double k = std::floor(x);
    return k + offset_ + primitive(x - k);
  }
  return primitive(x);
}

double Diffeo::log_derivative_at(double x) const { return detail::cubic_interpolate(space_, log_deriv_, x); }

double Diffeo::derivative_at(double x) const { return std::exp(log_derivative_at(x)); }

double Diffeo::inverse_lift(double y) const {
  if (space_.is_circle()) {
    const double z = y - offset_;
    const double k = std::floor(z);
    return k + solve_primitive(z - k);
  }
  return solve_primitive(y);
}

double Diffeo::secant_log(double x, double dx) const {
  if (dx == 0.0) return log_derivative_at(x);
  if (std::abs(dx) < 1e-3 * space_.step()) {
    // Far below the cell width: average Df over the span directly, so
    // rounding of x + dx never changes the length being divided by.
    const double mean = detail::gauss_legendre(0.0, 1.0, [&](double t) { return std::exp(log_derivative_at(x + t * dx)); });
    return std::log(mean);
  }
  double a = dx > 0.0 ? x : x + dx;
  const double len = std::abs(dx);
  const double h = space_.step();
  const int n = space_.grid_size;
  if (space_.is_circle()) {
    a -= std::floor(a);
  } else {
    a = std::clamp(a, 0.0, 1.0);
  }
  if (len > 2.0 * h) {
    const double diff = space_.is_circle() ? lift(a + len) - lift(a) : primitive(a + len) - primitive(a);
    return std::log(diff / len);
  }
  // Walk the (at most three) cells covered by [a, a + len].
  double integral = 0.0;
  double pos = a;
  double remaining = len;
  while (remaining > 0.0) {
    auto cell = static_cast<std::size_t>(std::floor(pos * n));
    if (!space_.is_circle()) cell = std::min<std::size_t>(cell, static_cast<std::size_t>(n - 1));
    const double cell_end = static_cast<double>(cell + 1) * h;
    const double piece = std::min(remaining, std::max(cell_end - pos, 0.0));
    const double step = (piece > 0.0) ? piece : remaining;
    const std::size_t owner = space_.is_circle() ? cell % static_cast<std::size_t>(n) : cell;
    const double shift = space_.is_circle() ? static_cast<double>(cell - owner) * h : 0.0;
    integral += cell_integral(owner, pos - shift, step);
    pos += step;
    remaining -= step;
    if (!space_.is_circle() && pos >= 1.0) break;
  }
  return std::log(integral / len);
}

double Diffeo::complement(double d) const {
  if (space_.is_circle()) throw Error(ErrorCode::InvalidArgument, "complement is defined on the interval only");
  const int n = space_.grid_size;
  const double h = space_.step();
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  if (d <= h) return cell_integral(static_cast<std::size_t>(n - 1), 1.0 - d, d);
  const double x = 1.0 - d;
  const auto cell = std::min<std::size_t>(static_cast<std::size_t>(x * n), static_cast<std::size_t>(n - 1));
  const double end = static_cast<double>(cell + 1) * h;
  return rcum_[cell + 1] + cell_integral(cell, x, end - x);
}

std::pair<double, double> evaluate_and_derivative(const Diffeo& f, double x) {
  return {f(x), f.derivative_at(x)};
}

Diffeo compose(const Diffeo& f, const Diffeo& g) {
  require_same_space(f.space(), g.space());
  const Space& sp = f.space();
  std::vector<double> ld(sp.sample_count());
  const auto gl = g.log_derivative_samples();
  parallel_for(ld.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ld[i] = gl[i] + f.log_derivative_at(g.lift(sp.node(i)));
  });
  return Diffeo::from_log_derivative(sp, std::move(ld), f.lift(g.lift(0.0)));
}

Diffeo invert(const Diffeo& f) {
  const Space& sp = f.space();
  std::vector<double> ld(sp.sample_count());
  parallel_for(ld.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ld[i] = -f.log_derivative_at(f.inverse_lift(sp.node(i)));
  });
  return Diffeo::from_log_derivative(sp, std::move(ld), f.inverse_lift(0.0));
}

Diffeo conjugate_action(const Diffeo& f, const Diffeo& phi) {
  require_same_space(f.space(), phi.space());
  const Space& sp = f.space();
  std::vector<double> ld(sp.sample_count());
  parallel_for(ld.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double z = phi.inverse_lift(sp.node(i));
      const double w = f.lift(z);
      ld[i] = phi.log_derivative_at(w) + f.log_derivative_at(z) - phi.log_derivative_at(z);
    }
  });
  return Diffeo::from_log_derivative(sp, std::move(ld), phi.lift(f.lift(phi.inverse_lift(0.0))));
}

C1Distance c1_distance(const Diffeo& f, const Diffeo& g) {
  require_same_space(f.space(), g.space());
  C1Distance d;
  const auto fv = f.node_values();
  const auto gv = g.node_values();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    double diff = fv[i] - gv[i];
    if (f.space().is_circle()) diff -= std::round(diff);
    d.c0 = std::max(d.c0, std::abs(diff));
  }
  const auto fl = f.log_derivative_samples();
  const auto gl = g.log_derivative_samples();
  for (std::size_t i = 0; i < fl.size(); ++i) d.dlog = std::max(d.dlog, std::abs(fl[i] - gl[i]));
  return d;
}

double max_log_derivative_jump(const Diffeo& f) {
  const auto l = f.log_derivative_samples();
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < l.size(); ++i) m = std::max(m, std::abs(l[i + 1] - l[i]));
  if (f.space().is_circle()) m = std::max(m, std::abs(l.front() - l.back()));
  return m;
}

}  // namespace conjtamer
