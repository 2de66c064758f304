#include "conjtamer/build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conjtamer {

namespace {

constexpr double kMinDerivative = 1e-9;
constexpr double kEndpointTolerance = 1e-9;

void check_samples(const Space& space, const std::vector<double>& values, const std::vector<double>& derivs,
                   double right_value) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(derivs[i]))
      throw Error(ErrorCode::NonFinite, "map is not finite at x = " + std::to_string(space.node(i)));
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1]))
      throw Error(ErrorCode::NonMonotone, "sampled values not strictly increasing near x = " + std::to_string(space.node(i)));
  }
  if (!(right_value > values.back()))
    throw Error(ErrorCode::NonMonotone, "sampled values not strictly increasing near x = 1");
  for (std::size_t i = 0; i < derivs.size(); ++i) {
    if (!(derivs[i] >= kMinDerivative))
      throw Error(ErrorCode::DegenerateDerivative,
                  "derivative below 1e-9 at x = " + std::to_string(space.node(i)));
  }
  if (space.is_circle()) {
    if (std::abs(right_value - values.front() - 1.0) > kEndpointTolerance)
      throw Error(ErrorCode::InvalidArgument, "circle map must satisfy f(x+1) = f(x) + 1");
  } else {
    if (std::abs(values.front()) > kEndpointTolerance || std::abs(right_value - 1.0) > kEndpointTolerance)
      throw Error(ErrorCode::InvalidArgument, "interval map must fix 0 and 1");
  }
}

std::vector<double> logs(const std::vector<double>& d) {
  std::vector<double> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](double v) { return std::log(v); });
  return out;
}

}  // namespace

Diffeo build_diffeo(const Expression& f, Space space) {
  Space::checked(space);
  const std::size_t m = space.sample_count();
  const std::size_t stored = space.is_circle() ? m : m - 1;
  std::vector<double> values(m), derivs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Dual d = f.eval({space.node(i), 1.0});
    values[i] = d.value;
    derivs[i] = d.deriv;
  }
  const double right = f(1.0);
  check_samples(space, std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(stored)),
                std::vector<double>(derivs.begin(), derivs.begin() + static_cast<std::ptrdiff_t>(stored)), right);
  if (!space.is_circle() && !(derivs.back() >= kMinDerivative))
    throw Error(ErrorCode::DegenerateDerivative, "derivative below 1e-9 at x = 1");
  return Diffeo::from_log_derivative(space, logs(derivs), values.front());
}

Diffeo build_diffeo(std::string_view expression, Space space) {
  return build_diffeo(Expression::parse(expression), space);
}

double invert_expression(const Expression& h, double y, bool circle) {
  double lo = circle ? y - 1.0 : 0.0;
  double hi = circle ? y + 1.0 : 1.0;
  if (circle) {
    while (h(lo) > y) lo -= 1.0;
    while (h(hi) < y) hi += 1.0;
  } else {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const Dual d = h.eval({x, 1.0});
    const double g = d.value - y;
    if (g == 0.0) return x;
    if (g > 0.0)
      hi = x;
    else
      lo = x;
    double next = x - g / d.deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

Diffeo build_conjugated(const Expression& f, const Expression& h, Space space) {
  Space::checked(space);
  const bool circle = space.is_circle();
  std::vector<double> ld(space.sample_count());
  for (std::size_t i = 0; i < ld.size(); ++i) {
    const double z = invert_expression(h, space.node(i), circle);
    const Dual fz = f.eval({z, 1.0});
    const Dual hz = h.eval({z, 1.0});
    const Dual hw = h.eval({fz.value, 1.0});
    if (!(fz.deriv > kMinDerivative && hz.deriv > kMinDerivative && hw.deriv > kMinDerivative))
      throw Error(ErrorCode::DegenerateDerivative, "derivative below 1e-9 in conjugated generator");
    ld[i] = std::log(hw.deriv) + std::log(fz.deriv) - std::log(hz.deriv);
  }
  const double offset = h(f(invert_expression(h, 0.0, circle)));
  return Diffeo::from_log_derivative(space, std::move(ld), offset);
}

Diffeo build_from_knots(const std::vector<std::pair<double, double>>& knots, Space space) {
  Space::checked(space);
  if (knots.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first))
      throw Error(ErrorCode::InvalidArgument, "knot abscissae must increase");
    if (!(knots[i].second > knots[i - 1].second))
      throw Error(ErrorCode::NonMonotone, "knot ordinates must increase");
  }
  if (knots.front().first != 0.0 || knots.back().first != 1.0)
    throw Error(ErrorCode::InvalidArgument, "knots must span [0, 1]");
  const bool circle = space.is_circle();
  if (!circle && (knots.front().second != 0.0 || knots.back().second != 1.0))
    throw Error(ErrorCode::InvalidArgument, "interval knots must fix 0 and 1");
  if (circle && std::abs(knots.back().second - knots.front().second - 1.0) > kEndpointTolerance)
    throw Error(ErrorCode::InvalidArgument, "circle knots must have degree one");

  auto pl = [&](double x) {
    double shift = 0.0;
    if (circle) {
      shift = std::floor(x);
      x -= shift;
    }
    x = std::clamp(x, 0.0, 1.0);
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    if (it == knots.end()) return knots.back().second + shift;
    const auto& b = *it;
    const auto& a = *(it - 1);
    return shift + a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
  };
  const double delta = 0.5 * space.step();
  std::vector<double> ld(space.sample_count());
  for (std::size_t i = 0; i < ld.size(); ++i) {
    const double x = space.node(i);
    double lo = x - delta, hi = x + delta;
    if (!circle) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, 1.0);
    }
    ld[i] = std::log((pl(hi) - pl(lo)) / (hi - lo));
  }
  return Diffeo::from_log_derivative(space, std::move(ld), knots.front().second);
}

}  // namespace conjtamer
