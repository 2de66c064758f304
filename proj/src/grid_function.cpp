#include "conjtamer/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "conjtamer/detail/quadrature.hpp"

namespace conjtamer {

namespace detail {

double cubic_interpolate(const Space& space, std::span<const double> samples, double x) {
  const int n = space.grid_size;
  x = space.reduce(x);
  const auto cell = std::min<std::size_t>(static_cast<std::size_t>(x * n), static_cast<std::size_t>(n - 1));
  return cubic_in_cell(space, samples, cell, x);
}

double cubic_in_cell(const Space& space, std::span<const double> samples, std::size_t cell, double x) {
  const int n = space.grid_size;
  const double h = space.step();
  const double w = (x - static_cast<double>(cell) * h) / h;  // local coordinate in [0,1]
  if (space.is_circle()) {
    const double t = w + 1.0;
    const auto wrap = [n](std::ptrdiff_t i) { return static_cast<std::size_t>(((i % n) + n) % n); };
    const auto c = static_cast<std::ptrdiff_t>(cell);
    const double y0 = samples[wrap(c - 1)], y1 = samples[wrap(c)], y2 = samples[wrap(c + 1)],
                 y3 = samples[wrap(c + 2)];
    return lagrange4(t, y0, y1, y2, y3);
  }
  const auto start = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(cell) - 1, 0, n - 3));
  const double t = w + static_cast<double>(cell) - static_cast<double>(start);
  return lagrange4(t, samples[start], samples[start + 1], samples[start + 2], samples[start + 3]);
}

}  // namespace detail

GridFunction::GridFunction(Space space, std::vector<double> samples)
    : space_(space), samples_(std::move(samples)) {
  if (samples_.size() != space_.sample_count())
    throw Error(ErrorCode::InvalidArgument, "sample count does not match the grid");
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::integral_of_exp() const {
  const int n = space_.grid_size;
  const double h = space_.step();
  double total = 0.0;
  for (int c = 0; c < n; ++c) {
    const double a = c * h;
    total += detail::gauss_legendre(a, h, [&](double x) {
      return std::exp(detail::cubic_in_cell(space_, samples_, static_cast<std::size_t>(c), x));
    });
  }
  return total;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_space(space_, o.space_);
  std::vector<double> v(samples_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.samples_[i];
  return {space_, std::move(v)};
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_space(space_, o.space_);
  std::vector<double> v(samples_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.samples_[i];
  return {space_, std::move(v)};
}

GridFunction GridFunction::operator*(double s) const {
  std::vector<double> v(samples_);
  for (double& x : v) x *= s;
  return {space_, std::move(v)};
}

GridFunction GridFunction::shifted(double c) const {
  std::vector<double> v(samples_);
  for (double& x : v) x += c;
  return {space_, std::move(v)};
}

}  // namespace conjtamer
