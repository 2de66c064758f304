#include "conjtamer/taming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace conjtamer {

struct DeroinMeasure::Series {
  Action action;
  Space space;
  std::vector<std::ptrdiff_t> parent;
  std::vector<Letter> letter;
  std::vector<double> weight;  // lambda^l / mass
  std::vector<double> origin;  // e(0) as a lift

  // Normalised F(x) and its density.
  std::pair<double, double> evaluate(double x, bool with_density = true) const {
    thread_local std::vector<double> values, logs;
    const std::size_t m = weight.size();
    values.resize(m);
    logs.resize(m);
    if (!space.is_circle()) x = std::clamp(x, 0.0, 1.0);
    values[0] = x;
    logs[0] = 0.0;
    double f = weight[0] * (x - origin[0]);
    double rho = weight[0];
    for (std::size_t i = 1; i < m; ++i) {
      const auto p = static_cast<std::size_t>(parent[i]);
      const Diffeo& s = action.letter(letter[i]);
      values[i] = s.lift(values[p]);
      f += weight[i] * (values[i] - origin[i]);
      if (with_density) {
        logs[i] = logs[p] + s.log_derivative_at(values[p]);
        rho += weight[i] * std::exp(logs[i]);
      }
    }
    return {f, rho};
  }
};

double DeroinMeasure::value(double x) const { return series_->evaluate(x, false).first; }

std::pair<double, double> DeroinMeasure::value_and_density(double x) const { return series_->evaluate(x); }

double DeroinMeasure::density(double x) const { return series_->evaluate(x).second; }

double DeroinMeasure::inverse(double y) const {
  const Space& sp = space();
  double shift = 0.0;
  if (sp.is_circle()) {
    shift = std::floor(y);
    y -= shift;
  } else {
    y = std::clamp(y, 0.0, 1.0);
  }
  const auto nodes = cdf_.samples();
  const std::size_t n = static_cast<std::size_t>(sp.grid_size);
  auto node_value = [&](std::size_t i) { return i < nodes.size() ? nodes[i] : 1.0; };
  std::size_t lo = 0, hi = n;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (node_value(mid) <= y ? lo : hi) = mid;
  }
  double a = sp.node(lo), b = sp.node(hi);
  double fa = node_value(lo), fb = node_value(hi);
  double x = fb > fa ? a + (y - fa) / (fb - fa) * (b - a) : a;
  for (int it = 0; it < 80; ++it) {
    const auto [f, rho] = series_->evaluate(x);
    const double r = f - y;
    if (r == 0.0) break;
    if (r < 0.0) {
      a = x;
      fa = f;
    } else {
      b = x;
      fb = f;
    }
    double next = x - r / rho;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (next == x || b - a <= 4 * std::numeric_limits<double>::epsilon()) break;
    x = next;
    if (std::abs(r) < 1e-17) break;
  }
  return x + shift;
}

namespace {

double l1_sphere(int d, int n) {
  // Counts grow polynomially; doubles are exact enough far beyond the range of
  // l1_ball_count.
  double total = 0.0;
  // |S(n)| = sum_k 2^k C(d,k) C(n-1,k-1)
  for (int k = 1; k <= std::min(d, n); ++k) {
    double c1 = 1.0, c2 = 1.0;
    for (int j = 0; j < k; ++j) c1 = c1 * (d - j) / (j + 1);
    for (int j = 0; j < k - 1; ++j) c2 = c2 * (n - 1 - j) / (j + 1);
    total += std::ldexp(c1 * c2, k);
  }
  return n == 0 ? 1.0 : total;
}

}  // namespace

DeroinMeasure deroin_cdf(const Action& a, double lambda, int N) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda must lie in (0,1), got " << lambda;
    throw Error(ErrorCode::LambdaOutOfRange, os.str());
  }
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "truncation radius must be >= 0");
  const Presentation& p = a.presentation();
  const Ball ball = enumerate_ball(p, N);

  DeroinMeasure m;
  m.lambda_ = lambda;
  m.radius_ = N;
  m.spheres_ = ball.sphere_sizes();
  m.spheres_.resize(static_cast<std::size_t>(N) + 1, 0);

  double mass = 0.0;
  for (int n = N; n >= 0; --n) mass += std::pow(lambda, n) * static_cast<double>(m.spheres_[static_cast<std::size_t>(n)]);
  m.mass_ = mass;

  const bool free_abelian = p.abelian() && p.alphabet().size() == p.rank();
  double tail = 0.0;
  if (free_abelian) {
    const int d = static_cast<int>(p.rank());
    for (int n = N + 1;; ++n) {
      const double term = std::pow(lambda, n) * l1_sphere(d, n);
      tail += term;
      if ((term < 1e-18 * mass && n > N + 8) || n > N + 1000000) break;
    }
    m.tail_exact_ = true;
  } else {
    const double last = static_cast<double>(m.spheres_.back());
    const double prev = N >= 1 ? static_cast<double>(m.spheres_[static_cast<std::size_t>(N) - 1]) : 1.0;
    const double q = N >= 1 ? last / prev : 2.0 * static_cast<double>(p.alphabet().size());
    tail = last == 0.0 ? 0.0 : (lambda * q < 1.0 ? last * lambda * q / (1.0 - lambda * q)
                                                 : std::numeric_limits<double>::infinity());
    m.tail_exact_ = false;
  }
  m.tail_ = tail;

  const double growth = (lambda + 1.0) / (2.0 * lambda);
  double ball_count = 0.0, C = 0.0;
  for (int n = 0; n <= N; ++n) {
    ball_count += static_cast<double>(m.spheres_[static_cast<std::size_t>(n)]);
    C = std::max(C, ball_count / std::pow(growth, n));
  }
  m.growth_constant_ = C;

  auto series = std::make_shared<DeroinMeasure::Series>();
  series->action = a;
  series->space = a.space();
  series->parent = ball.parent;
  series->letter = ball.letter;
  series->weight.resize(ball.size());
  series->origin.resize(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    series->weight[i] = std::pow(lambda, ball.lengths[i]) / mass;
    series->origin[i] = i == 0 ? 0.0 : a.letter(ball.letter[i]).lift(series->origin[static_cast<std::size_t>(ball.parent[i])]);
  }
  m.series_ = series;

  const Space sp = a.space();
  std::vector<double> nodes(sp.sample_count());
  parallel_for(
      nodes.size(),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) nodes[i] = series->evaluate(sp.node(i), false).first;
      },
      16);
  nodes.front() = 0.0;
  if (!sp.is_circle()) nodes.back() = 1.0;
  m.cdf_ = GridFunction(sp, std::move(nodes));
  return m;
}

double tamed_value(const DeroinMeasure& m, const Diffeo& g, double y) {
  return m.value(g.lift(m.inverse(y)));
}

namespace {

struct Quotients {
  double h = 0.0;
  double h2 = 0.0;
};

// Lift values at nodes 0..n.
Quotients max_quotients(const Space& sp, const std::vector<double>& v) {
  const std::size_t n = static_cast<std::size_t>(sp.grid_size);
  const double step = sp.step();
  auto at = [&](std::size_t i) { return i <= n ? v[i] : v[i - n] + 1.0; };
  Quotients q;
  for (std::size_t i = 0; i < n; ++i) q.h = std::max(q.h, (at(i + 1) - at(i)) / step);
  const std::size_t last = sp.is_circle() ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) q.h2 = std::max(q.h2, (at(i + 2) - at(i)) / (2 * step));
  return q;
}

bool agree(const Quotients& q) { return std::abs(q.h - q.h2) <= 0.05 * std::max(q.h, q.h2); }

}  // namespace

TamingResult tame_lipschitz(const Action& a, double lambda, int N) {
  TamingResult out;
  out.measure = deroin_cdf(a, lambda, N);
  const DeroinMeasure& m = out.measure;
  const Space sp = a.space();
  const std::size_t n = static_cast<std::size_t>(sp.grid_size);

  // Preimages of the nodes under F.
  std::vector<double> pre(n + 1), pre_rho(n + 1);
  parallel_for(
      n + 1,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          pre[i] = m.inverse(sp.node(i));
          pre_rho[i] = m.density(pre[i]);
        }
      },
      16);

  TamingReport& r = out.report;
  r.lambda = lambda;
  r.radius = N;
  r.mass = m.mass();
  r.tail_bound = m.tail_bound();
  r.slack = m.tail_bound() / m.mass();
  r.bound = (1.0 / lambda) * (1.0 + r.slack);

  std::vector<Diffeo> tamed;
  bool within = true, agreeing = true;
  for (std::size_t gi = 0; gi < a.rank(); ++gi) {
    const Diffeo& g = a.map(gi);
    const Diffeo& gi_inv = a.inverse_map(gi);
    std::vector<double> forward(n + 1), backward(n + 1), untamed(n + 1), untamed_inv(n + 1);
    std::vector<double> logd(sp.sample_count());
    parallel_for(
        n + 1,
        [&](std::size_t b, std::size_t e) {
          for (std::size_t i = b; i < e; ++i) {
            const double x = pre[i];
            const double gx = g.lift(x);
            const auto [fgx, rho_gx] = m.value_and_density(gx);
            forward[i] = fgx;
            backward[i] = m.value(gi_inv.lift(x));
            untamed[i] = g.lift(sp.node(i));
            untamed_inv[i] = gi_inv.lift(sp.node(i));
            if (i < logd.size()) logd[i] = std::log(rho_gx) + g.log_derivative_at(x) - std::log(pre_rho[i]);
          }
        },
        16);
    LipschitzEstimate est;
    est.name = a.name(gi);
    const Quotients qf = max_quotients(sp, forward), qb = max_quotients(sp, backward);
    est.dq_h = qf.h;
    est.dq_2h = qf.h2;
    est.inverse_dq_h = qb.h;
    est.inverse_dq_2h = qb.h2;
    est.untamed_dq_h = max_quotients(sp, untamed).h;
    est.untamed_inverse_dq_h = max_quotients(sp, untamed_inv).h;
    within = within && std::max(qf.h, qb.h) <= r.bound;
    agreeing = agreeing && agree(qf) && agree(qb);
    r.generators.push_back(est);
    const double offset = sp.is_circle() ? sp.reduce(forward[0]) : 0.0;
    tamed.push_back(Diffeo::from_log_derivative(sp, std::move(logd), offset));
  }
  out.tamed = a.with_generators(std::move(tamed));

  std::ostringstream why;
  if (!(r.slack <= 1e-3)) why << "tail bound is " << r.slack << " of the total mass (limit 1e-3); ";
  if (!within) why << "difference quotients exceed (1/lambda)(1+slack); ";
  if (!agreeing) why << "quotients at spacings h and 2h differ by more than 5%; ";
  r.reason = why.str();
  if (!r.reason.empty()) r.reason.resize(r.reason.size() - 2);
  r.certified = r.reason.empty();
  return out;
}

PushforwardCheck check_pushforward(const DeroinMeasure& m, const Action& a) {
  const Space sp = a.space();
  const std::size_t n = static_cast<std::size_t>(sp.grid_size);
  const auto F = m.cdf().samples();
  auto cdf_at = [&](std::size_t i) { return i < F.size() ? F[i] : 1.0; };
  const double extra = 2.0 * m.tail_bound() / m.mass();
  PushforwardCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < a.presentation().alphabet().size(); ++li) {
    for (int sign : {1, -1}) {
      const Diffeo& g_inv = a.letter(Letter{static_cast<int>(li), -sign});
      std::vector<double> P(n + 1);
      parallel_for(
          n + 1,
          [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) P[i] = m.value(g_inv.lift(sp.node(i)));
          },
          16);
      for (std::size_t i = 0; i < n; ++i) {
        const double margin = (cdf_at(i + 1) - cdf_at(i)) / m.lambda() + extra - (P[i + 1] - P[i]);
        out.worst_margin = std::min(out.worst_margin, margin);
        ++out.intervals;
        if (margin < -1e-13) ++out.violations;
      }
    }
  }
  return out;
}

}  // namespace conjtamer
