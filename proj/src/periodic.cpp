#include "conjtamer/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conjtamer {

namespace {

double iterate(const Diffeo& f, double x, int n) {
  for (int k = 0; k < n; ++k) x = f.lift(x);
  return x;
}

double circular_gap(const Space& s, double a, double b) {
  double d = a - b;
  if (s.is_circle()) d -= std::round(d);
  return std::abs(d);
}

}  // namespace

std::vector<PeriodicOrbit> find_periodic_points(const Diffeo& f, int n_max, PeriodicSearch opts) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  const Space& s = f.space();
  const int n = s.grid_size;
  const double dedup = 2.0 / n;
  std::vector<PeriodicOrbit> orbits;
  std::vector<double> d(static_cast<std::size_t>(n) + 1);

  for (int N = 1; N <= n_max; ++N) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i <= n; ++i) {
      const double x = s.node(i);
      d[static_cast<std::size_t>(i)] = iterate(f, x, N) - x;
      lo = std::min(lo, d[static_cast<std::size_t>(i)]);
      hi = std::max(hi, d[static_cast<std::size_t>(i)]);
    }
    if (hi - lo < opts.tol && std::abs(hi - std::round(hi)) < opts.tol) {
      PeriodicOrbit o;
      o.period = N;
      o.points = {0.0};
      o.identity_like = true;
      o.log_multipliers = {0.0};
      orbits.push_back(o);
      break;
    }
    const long p_lo = s.is_circle() ? static_cast<long>(std::floor(lo)) : 0;
    const long p_hi = s.is_circle() ? static_cast<long>(std::ceil(hi)) : 0;
    std::vector<double> roots;
    for (long p = p_lo; p <= p_hi; ++p) {
      auto g = [&](double x) { return iterate(f, x, N) - x - static_cast<double>(p); };
      const int last = s.is_circle() ? n - 1 : n;
      for (int i = 0; i <= last; ++i) {
        const double gi = d[static_cast<std::size_t>(i)] - static_cast<double>(p);
        if (std::abs(gi) < opts.tol) {
          roots.push_back(s.node(i));
          continue;
        }
        if (i == n) continue;
        const double gj = d[static_cast<std::size_t>(i) + 1] - static_cast<double>(p);
        if (std::abs(gj) < opts.tol || (gi > 0) == (gj > 0)) continue;
        double a = s.node(i), b = s.node(i + 1), ga = gi;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
          const double m = 0.5 * (a + b);
          if (m <= a || m >= b) break;
          const double gm = g(m);
          if (gm == 0.0) {
            a = b = m;
            break;
          }
          if ((gm > 0) == (ga > 0)) {
            a = m;
            ga = gm;
          } else {
            b = m;
          }
        }
        const double r = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
        if (std::abs(g(r)) < opts.tol) roots.push_back(r);
      }
    }
    std::sort(roots.begin(), roots.end());
    for (double r : roots) {
      bool known = false;
      for (const auto& o : orbits)
        for (double q : o.points)
          if (circular_gap(s, q, r) < dedup) known = true;
      if (known) continue;
      std::vector<double> pts{r};
      bool shorter = false;
      double x = r;
      for (int k = 1; k < N; ++k) {
        x = f.lift(x);
        if (circular_gap(s, x, r) < 1e-8) shorter = true;
        pts.push_back(s.reduce(x));
      }
      if (shorter) continue;
      PeriodicOrbit o;
      o.period = N;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        double sum = 0.0;
        double y = pts[k];
        for (int j = 0; j < N; ++j) {
          sum += f.log_derivative_at(y);
          y = f.lift(y);
        }
        o.log_multipliers.push_back(sum);
      }
      o.points = std::move(pts);
      o.hyperbolic = std::abs(o.log_multiplier()) > opts.hyperbolic_threshold;
      orbits.push_back(std::move(o));
    }
  }
  return orbits;
}

RotationNumber rotation_number(const Diffeo& f, int iters) {
  if (!f.space().is_circle()) throw Error(ErrorCode::NotCircle, "rotation number needs a circle map");
  if (iters < 100) throw Error(ErrorCode::InvalidArgument, "rotation number needs at least 100 iterations");
  double sum = 0.0;
  for (double x0 : {0.0, 1.0 / 3.0, 2.0 / 3.0}) sum += (iterate(f, x0, iters) - x0) / iters;
  return {sum / 3.0, 1.0 / iters};
}

std::vector<double> resilient_margins(const Diffeo& f, const Diffeo& g, double x, double y) {
  auto window = [&](double v) {
    if (!f.space().is_circle()) return v;
    return v - std::floor(v - x);
  };
  const double yy = window(y);
  const double fx = window(f.lift(x)), fy = window(f.lift(y));
  const double gx = window(g.lift(x)), gy = window(g.lift(y));
  return {fx - x, fy - fx, gx - fy, gy - gx, yy - gy};
}

std::optional<ResilientWitness> detect_resilient(const Action& a, int L, double resolution, std::size_t cap) {
  if (L < 1) throw Error(ErrorCode::InvalidArgument, "word length bound must be >= 1");
  if (!(resolution > 0.0 && resolution < 0.5)) throw Error(ErrorCode::InvalidArgument, "resolution must be in (0, 0.5)");
  const Ball ball = enumerate_ball(a.presentation(), L, cap);
  const Space& s = a.space();
  const int m = static_cast<int>(std::ceil(1.0 / resolution - 1e-9));
  const int npts = s.is_circle() ? m : m + 1;
  std::vector<double> grid(static_cast<std::size_t>(npts));
  for (int i = 0; i < npts; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;

  std::vector<std::vector<double>> vals(ball.size(), std::vector<double>(grid.size()));
  propagate_tracks(a, ball, grid, false, [&](std::size_t e, std::size_t begin, auto v, auto) {
    for (std::size_t j = 0; j < v.size(); ++j) vals[e][begin + j] = v[j];
  });

  struct Hit {
    std::size_t f = 0, g = 0;
    int x = 0, y = 0;
    bool found = false;
  };
  const std::size_t count = ball.size();
  std::vector<Hit> hits(count);
  auto window = [&](double v, double x) { return s.is_circle() ? v - std::floor(v - x) : v; };
  parallel_for(
      count,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t fi = std::max<std::size_t>(begin, 1); fi < end; ++fi) {
          const auto& fv = vals[fi];
          for (std::size_t gi = 1; gi < count && !hits[fi].found; ++gi) {
            if (gi == fi) continue;
            const auto& gv = vals[gi];
            for (int xi = 0; xi < npts && !hits[fi].found; ++xi) {
              const double x = grid[static_cast<std::size_t>(xi)];
              const double fx = window(fv[static_cast<std::size_t>(xi)], x);
              const double gx = window(gv[static_cast<std::size_t>(xi)], x);
              if (!(fx - x > resolution) || !(gx - fx > resolution)) continue;
              for (int yi = xi + 1; yi < npts; ++yi) {
                const double y = grid[static_cast<std::size_t>(yi)];
                const double fy = window(fv[static_cast<std::size_t>(yi)], x);
                const double gy = window(gv[static_cast<std::size_t>(yi)], x);
                if (fy - fx > resolution && gx - fy > resolution && gy - gx > resolution && y - gy > resolution) {
                  hits[fi] = {fi, gi, xi, yi, true};
                  break;
                }
              }
            }
          }
          if (hits[fi].found) return;
        }
      },
      1);
  for (const Hit& h : hits) {
    if (!h.found) continue;
    ResilientWitness w;
    w.f_word = ball.elements[h.f];
    w.g_word = ball.elements[h.g];
    w.x = grid[static_cast<std::size_t>(h.x)];
    w.y = grid[static_cast<std::size_t>(h.y)];
    const double x = w.x;
    const double fx = window(vals[h.f][static_cast<std::size_t>(h.x)], x);
    const double fy = window(vals[h.f][static_cast<std::size_t>(h.y)], x);
    const double gx = window(vals[h.g][static_cast<std::size_t>(h.x)], x);
    const double gy = window(vals[h.g][static_cast<std::size_t>(h.y)], x);
    w.margins = {fx - x, fy - fx, gx - fy, gy - gx, w.y - gy};
    return w;
  }
  return std::nullopt;
}

std::vector<double> gamma_orbit(const Action& a, double x, int radius, double tol) {
  const Ball ball = enumerate_ball(a.presentation(), radius);
  const Space& s = a.space();
  std::vector<double> pts;
  const std::vector<double> base{x};
  propagate_tracks(a, ball, base, false, [&](std::size_t, std::size_t, auto v, auto) { pts.push_back(s.reduce(v[0])); });
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || circular_gap(s, p, out.back()) > tol) out.push_back(p);
  if (s.is_circle() && out.size() > 1 && circular_gap(s, out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

}  // namespace conjtamer
