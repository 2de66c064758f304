#include "conjtamer/cohomology.hpp"

#include <algorithm>
#include <cmath>

namespace conjtamer {

namespace {

GridFunction normalized(const GridFunction& u) { return u.shifted(-std::log(u.integral_of_exp())); }

std::vector<double> node_points(const Space& s) {
  std::vector<double> x(s.sample_count());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.node(i);
  return x;
}

void require_free_abelian(const Action& a) {
  if (!a.presentation().abelian())
    throw Error(ErrorCode::InvalidArgument, "positive-ball averages need a free abelian presentation");
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::string to_string(Construction c) {
  switch (c) {
    case Construction::BirkhoffPositiveBall: return "BirkhoffPositiveBall";
    case Construction::NilpotentShell: return "NilpotentShell";
    case Construction::Composite: return "Composite";
  }
  return "Unknown";
}

double CohomSolution::max_defect() const {
  double m = 0.0;
  for (const auto& d : defects) m = std::max(m, d.sup);
  return m;
}

std::vector<DefectInfo> cocycle_defect(const GridFunction& u, const Action& a) {
  require_same_space(u.space(), a.space());
  const Space& s = a.space();
  std::vector<DefectInfo> out;
  for (std::size_t g = 0; g < a.rank(); ++g) {
    const Diffeo& f = a.map(g);
    DefectInfo info;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = s.node(i);
      const double d = std::abs(u[i] - u.at(f.lift(x)) - f.log_derivative_samples()[i]);
      if (d > info.sup) {
        info.sup = d;
        info.location = x;
      }
    }
    info.refined = info.sup;
    for (int c = 0; c < s.grid_size; ++c) {
      const double x = (c + 0.5) * s.step();
      info.refined = std::max(info.refined, std::abs(u.at(x) - u.at(f.lift(x)) - f.log_derivative_at(x)));
    }
    out.push_back(info);
  }
  return out;
}

std::vector<GridFunction> birkhoff_sequence(const Action& a, int n_max) {
  require_free_abelian(a);
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const int d = static_cast<int>(a.rank());
  const Ball ball = enumerate_positive_ball(d, n_max);
  const Space& s = a.space();
  const std::vector<double> base = node_points(s);
  std::vector<int> top(ball.size(), 0);
  for (std::size_t e = 0; e < ball.size(); ++e) {
    std::vector<int> exps(static_cast<std::size_t>(d), 0);
    for (const Letter& l : ball.elements[e]) ++exps[static_cast<std::size_t>(l.gen)];
    top[e] = *std::max_element(exps.begin(), exps.end());
  }
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(n_max), std::vector<double>(base.size(), 0.0));
  propagate_tracks(a, ball, base, true, [&](std::size_t e, std::size_t begin, auto, auto c) {
    auto& row = acc[static_cast<std::size_t>(top[e])];
    for (std::size_t j = 0; j < c.size(); ++j) row[begin + j] += c[j];
  });
  std::vector<GridFunction> out;
  std::vector<double> sum(base.size(), 0.0);
  for (int m = 1; m <= n_max; ++m) {
    const auto& row = acc[static_cast<std::size_t>(m) - 1];
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
    const double count = std::pow(static_cast<double>(m), d);
    std::vector<double> u(sum.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = sum[j] / count;
    out.push_back(normalized(GridFunction(s, std::move(u))));
  }
  return out;
}

CohomSolution birkhoff_solution(const Action& a, int n) {
  CohomSolution sol;
  sol.u = birkhoff_sequence(a, n).back();
  sol.defects = cocycle_defect(sol.u, a);
  sol.construction = Construction::BirkhoffPositiveBall;
  sol.parameter = n;
  return sol;
}

GridFunction ball_average(const Action& a, int k) {
  const Ball ball = enumerate_ball(a.presentation(), k);
  const Space& s = a.space();
  const std::vector<double> base = node_points(s);
  std::vector<double> sum(base.size(), 0.0);
  propagate_tracks(a, ball, base, true, [&](std::size_t, std::size_t begin, auto, auto c) {
    for (std::size_t j = 0; j < c.size(); ++j) sum[begin + j] += c[j];
  });
  for (double& v : sum) v /= static_cast<double>(ball.size());
  return normalized(GridFunction(s, std::move(sum)));
}

NilpotentSolution nilpotent_average_solution(const Action& a, int shell_index, const ShellOptions& opts) {
  const Presentation& p = a.presentation();
  const ShellSelection sel = select_shell_radii(p, opts.k_max, opts.C);
  if (shell_index < 0 || static_cast<std::size_t>(shell_index) >= sel.radii.size())
    throw Error(ErrorCode::NoAdmissibleRadius,
                "no admissible shell radius #" + std::to_string(shell_index) + " for C = " + std::to_string(opts.C) +
                    " up to k_max = " + std::to_string(opts.k_max) + " (measured minimal C " +
                    std::to_string(sel.measured_constant) + ")");
  const int k = sel.radii[static_cast<std::size_t>(shell_index)];
  NilpotentSolution out;
  out.measured_C = sel.measured_constant;
  out.solution.u = ball_average(a, k);
  out.solution.defects = cocycle_defect(out.solution.u, a);
  out.solution.construction = Construction::NilpotentShell;
  out.solution.parameter = k;

  const Space& s = a.space();
  const std::vector<double> base = node_points(s);
  const int M = p.bounded_generation();
  double max_c = 0.0;
  double delta = 0.0;
  for (std::size_t j = 0; j < p.alphabet().size(); ++j) {
    for (int sign : {1, -1}) {
      const Diffeo& f = a.letter({static_cast<int>(j), sign});
      max_c = std::max(max_c, sup_abs(f.log_derivative_samples()));
      std::vector<double> x = base, c(base.size(), 0.0);
      for (int m = 1; m <= M * k; ++m) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          c[i] += f.log_derivative_at(x[i]);
          x[i] = f.lift(x[i]);
        }
        if (m >= opts.N0) delta = std::max(delta, sup_abs(c) / m);
      }
    }
  }
  out.delta = delta;
  out.small_exponent_term = opts.C * opts.N0 * max_c / k;
  out.large_exponent_term = M * opts.C * delta;
  return out;
}

double empirical_measure_integral(const Action& a, std::size_t i, int n, double x) {
  require_free_abelian(a);
  if (i >= a.rank()) throw Error(ErrorCode::UnknownGenerator, "generator index out of range");
  const Ball ball = enumerate_positive_ball(static_cast<int>(a.rank()), n);
  const Diffeo& f = a.map(i);
  const std::vector<double> base{x};
  double sum = 0.0;
  propagate_tracks(a, ball, base, false, [&](std::size_t, std::size_t, auto v, auto) { sum += f.log_derivative_at(v[0]); });
  return sum / static_cast<double>(ball.size());
}

Diffeo conjugacy_from_log_density(const GridFunction& u) { return Diffeo::from_log_derivative(u); }

double invariant_mean_log_derivative(const Diffeo& f, const PeriodicOrbit& orbit) {
  const Space& s = f.space();
  const std::size_t n = orbit.points.size();
  if (n == 0) throw Error(ErrorCode::NotPeriodic, "empty orbit");
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = orbit.points[(k + 1) % n];
    if (s.distance(f(orbit.points[k]), next) > 1e-8)
      throw Error(ErrorCode::NotPeriodic, "points do not form an orbit of the map");
    sum += f.log_derivative_at(orbit.points[k]);
  }
  return sum / static_cast<double>(n);
}

double invariant_mean_log_derivative(const Diffeo& f, double x, int N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  double sum = 0.0;
  for (int k = 0; k < N; ++k) {
    sum += f.log_derivative_at(x);
    x = f.lift(x);
  }
  return sum / N;
}

std::vector<DefectInfo> composite_defect(const GridFunction& w, const Flattening& psi, const Action& a) {
  require_same_space(w.space(), a.space());
  const Space& s = a.space();
  auto flagged = [&](double x) {
    for (double p : psi.points())
      if (s.distance(x, p) == 0.0) return true;
    return false;
  };
  auto u = [&](double x) { return w.at(psi.value(x)) + psi.log_derivative_at(x); };
  std::vector<DefectInfo> out;
  for (std::size_t g = 0; g < a.rank(); ++g) {
    const Diffeo& f = a.map(g);
    DefectInfo info;
    for (std::size_t i = 0; i < s.sample_count(); ++i) {
      const double x = s.node(i);
      if (!psi.is_identity() && flagged(x)) continue;
      const double d = std::abs(u(x) - u(f.lift(x)) - f.log_derivative_samples()[i]);
      if (d > info.sup) {
        info.sup = d;
        info.location = x;
      }
    }
    info.refined = info.sup;
    out.push_back(info);
  }
  return out;
}

std::vector<GridFunction> solution_sequence(const Action& a, int n_max) {
  if (a.presentation().abelian()) return birkhoff_sequence(a, n_max);
  std::vector<GridFunction> out;
  for (int n = 1; n <= n_max; ++n) out.push_back(ball_average(a, n));
  return out;
}

void for_each_path_sample(const Action& a, int n_max, int steps_per_unit,
                          const std::function<void(const PathSample&)>& sink) {
  if (n_max < 1 || steps_per_unit < 1) throw Error(ErrorCode::InvalidArgument, "n_max and steps must be >= 1");
  const std::vector<GridFunction> us = solution_sequence(a, n_max);
  const std::size_t total = static_cast<std::size_t>(n_max - 1) * static_cast<std::size_t>(steps_per_unit) + 1;
  const std::size_t batch = std::max<std::size_t>(2, 2 * thread_count());
  std::vector<Diffeo> previous;
  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t count = std::min(batch, total - start);
    std::vector<PathSample> samples(count);
    parallel_for(
        count,
        [&](std::size_t b, std::size_t e) {
          for (std::size_t q = b; q < e; ++q) {
            const std::size_t k = start + q;
            const std::size_t n = 1 + k / static_cast<std::size_t>(steps_per_unit);
            const double s = static_cast<double>(k % static_cast<std::size_t>(steps_per_unit)) / steps_per_unit;
            PathSample& ps = samples[q];
            ps.t = static_cast<double>(n) + s;
            GridFunction v = s == 0.0 ? us[n - 1] : us[n - 1] * (1.0 - s) + us[n] * s;
            v = normalized(v);
            ps.phi = conjugacy_from_log_density(v);
            ps.conjugated = a.conjugated(ps.phi);
            for (std::size_t g = 0; g < a.rank(); ++g)
              ps.c1_gap = std::max(ps.c1_gap, sup_abs(ps.conjugated.map(g).log_derivative_samples()));
            for (const auto& d : cocycle_defect(v, a)) ps.defects.push_back(d.sup);
          }
        },
        1);
    for (PathSample& ps : samples) {
      if (!previous.empty()) {
        for (std::size_t g = 0; g < a.rank(); ++g) {
          const C1Distance d = c1_distance(ps.conjugated.map(g), previous[g]);
          ps.step_distance = std::max(ps.step_distance, std::max(d.c0, d.dlog));
        }
      }
      previous = ps.conjugated.generators();
      sink(ps);
    }
  }
}

std::vector<PathSample> path_of_conjugates(const Action& a, int n_max, int steps_per_unit) {
  std::vector<PathSample> out;
  for_each_path_sample(a, n_max, steps_per_unit, [&](const PathSample& s) { out.push_back(s); });
  return out;
}

}  // namespace conjtamer
