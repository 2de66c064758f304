// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "conjtamer/build.hpp"
#include "conjtamer/cohomology.hpp"
#include "conjtamer/flatten.hpp"
#include "conjtamer/periodic.hpp"
#include "conjtamer/pipeline.hpp"
#include "conjtamer/taming.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace conjtamer;

namespace {

const Space kInterval = Space::interval(4096);
const Space kCircle = Space::circle(4096);
const double kGridTol = 1.0 / 4096;

ActionSpec load(const std::string& name) {
  std::ifstream in(std::filesystem::path(CONJ_TAMER_SPEC_DIR) / name);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_action_spec(os.str());
}

Action a4() { return Action(Presentation::free_abelian({"f"}), {build_diffeo("x/(2-x)", kInterval)}); }

double max_jump(const Diffeo& f) {
  const auto ld = f.log_derivative_samples();
  double m = 0.0;
  for (std::size_t i = 1; i < ld.size(); ++i) m = std::max(m, std::abs(ld[i] - ld[i - 1]));
  return m;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char timing[96];
  std::snprintf(timing, sizeof timing, "%.1fs (limit %.0fs)", secs, limit_s);
  if (secs > limit_s) {
    o.pass = false;
    o.detail += "; over time";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %s: %s  %s  [%s]\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

}  // namespace

int main() {
  run(1, "Lipschitz taming of A4", 10, [] {
    const double lambda = std::exp(-0.1);
    const TamingResult t = tame_lipschitz(a4(), lambda, 40);
    const auto& g = t.report.generators.front();
    const double bound = std::exp(0.1) * (1.0 + t.report.slack);
    const bool ok = g.dq_h <= bound && g.inverse_dq_h <= bound && t.report.slack < 0.02;
    return Outcome{ok, fmt("lip %.4f lip_inv %.4f bound %.4f slack %.2e untamed %.4f", g.dq_h, g.inverse_dq_h, bound,
                           t.report.slack, g.untamed_dq_h)};
  });

  run(2, "pushforward inequality on A4 and A3", 10, [] {
    const auto m4 = deroin_cdf(a4(), std::exp(-0.1), 40);
    const auto p4 = check_pushforward(m4, a4());
    const ActionSpec a3 = load("a3.spec");
    const auto m3 = deroin_cdf(a3.action, a3.pipeline.lambda, a3.pipeline.radius);
    const auto p3 = check_pushforward(m3, a3.action);
    return Outcome{p4.violations == 0 && p3.violations == 0,
                   fmt("A4 %zu/%zu violations, A3 %zu/%zu violations", p4.violations, p4.intervals, p3.violations,
                       p3.intervals)};
  });

  run(3, "telescoping identity on A3 as Z^2, n = 8", 30, [] {
    const Action g = testsupport::a3(kCircle, true);
    const auto sol = birkhoff_solution(g, 8);
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      const Diffeo& f = g.map(i);
      for (std::size_t j = 0; j < kCircle.sample_count(); j += 17) {
        const double x = kCircle.node(j);
        const double lhs = std::abs(sol.u[j] - sol.u.at(f.lift(x)) - f.log_derivative_samples()[j]);
        worst = std::max(worst, std::abs(lhs - std::abs(empirical_measure_integral(g, i, 8, x))));
      }
    }
    return Outcome{worst <= 1e-8, fmt("max gap %.2e", worst)};
  });

  run(4, "defect decay on A3", 60, [] {
    const Action g = testsupport::a3(kCircle);
    const auto us = birkhoff_sequence(g, 32);
    std::string detail = "defects";
    double prev = INFINITY;
    bool ok = true;
    for (int n : {2, 4, 8, 16, 32}) {
      const double d = cocycle_defect(us[static_cast<std::size_t>(n) - 1], g)[0].sup;
      ok = ok && d < prev;
      prev = d;
      detail += fmt(" %.4g", d);
    }
    ok = ok && prev < 0.05;
    const double exact = cocycle_defect(testsupport::a3_exact_solution(kCircle), g)[0].sup;
    ok = ok && exact < 5 * kGridTol;
    return Outcome{ok, detail + fmt("; exact %.2e (limit %.2e)", exact, 5 * kGridTol)};
  });

  run(5, "flattening limit law on A4", 60, [] {
    const Diffeo f = build_diffeo("x/(2-x)", kInterval);
    const Space fine = Space::interval(8192);
    const Diffeo f_fine = build_diffeo("x/(2-x)", fine);
    bool ok = true;
    std::string detail;
    for (double alpha : {2.0, 4.0, 8.0}) {
      FlattenOptions opts;
      opts.alpha_override = alpha;
      const auto res = flatten_hyperbolic(a4(), opts);
      const Flattening& psi = res.psi;
      const double h = 1e-6;
      const double at0 = (psi.conjugate_value(f, h) - psi.conjugate_value(f, 0.0)) / h;
      const double err = std::abs(at0 - std::pow(2.0, -1.0 / alpha));
      const Diffeo& g = res.tamed.map(0);
      const Flattening psi_fine(fine, psi.points(), alpha, psi.radius());
      const double jump = max_jump(g), jump_fine = max_jump(psi_fine.conjugate(f_fine));
      double gap = 0.0;
      for (int i = 0; i <= 1000; ++i) gap = std::max(gap, std::abs(g(i / 1000.0) - psi.conjugate_value(f, i / 1000.0)));
      ok = ok && err < 1e-4 && jump_fine <= 0.6 * jump && gap < 1e-5;
      detail += fmt("alpha %g: err %.1e jumps %.3g->%.3g gap %.1e; ", alpha, err, jump, jump_fine, gap);
    }
    return Outcome{ok, detail};
  });

  run(6, "periodic multipliers under certified tame-c1", 120, [] {
    bool ok = true;
    std::string detail;
    for (const char* name : {"trivial.spec", "rotations.spec", "a3.spec", "a4.spec", "heisenberg.spec", "ping_pong.spec"}) {
      const ActionSpec spec = load(name);
      TameC1Outcome o;
      try {
        o = tame_c1(spec);
      } catch (const StageError& e) {
        detail += fmt("%s: %s stage error; ", name, e.stage().c_str());
        continue;
      }
      if (!o.certified) {
        detail += fmt("%s: not certified; ", name);
        continue;
      }
      std::size_t orbits = 0;
      for (std::size_t g = 0; g < o.final_action.rank(); ++g)
        for (const auto& orb : find_periodic_points(o.final_action.map(g), spec.pipeline.period_max)) {
          ++orbits;
          const double m = std::abs(orb.log_multiplier());
          if (!(m < orb.period * o.final_max * (1.0 + 1e-6)) && m > 1e-12) ok = false;
        }
      detail += fmt("%s: eps %.3g, %zu orbits; ", name, o.final_max, orbits);
    }
    return Outcome{ok, detail};
  });

  run(7, "path of conjugates on A3", 300, [] {
    const ActionSpec spec = load("a3.spec");
    const Action& a = spec.action;
    double step8 = 0.0, step16 = 0.0;
    PathSample last;
    for_each_path_sample(a, 24, 8, [&](const PathSample& s) {
      step8 = std::max(step8, s.step_distance);
      last = s;
    });
    for_each_path_sample(a, 24, 16, [&](const PathSample& s) { step16 = std::max(step16, s.step_distance); });
    const double r1 = rotation_number(last.conjugated.map(0), 100000).value;
    const double r2 = rotation_number(last.conjugated.map(1), 100000).value;
    const double e1 = std::abs(r1 - testsupport::kA3Alpha), e2 = std::abs(r2 - testsupport::kA3Beta);
    const bool ok = step8 <= 3 * step16 && last.t == 24.0 && last.c1_gap < 0.05 && e1 < 1e-4 && e2 < 1e-4;
    return Outcome{ok, fmt("steps %.3g vs %.3g, gap at t=24 %.3g, rotation errors %.1e %.1e", step8, step16,
                           last.c1_gap, e1, e2)};
  });

  run(8, "resilient detection", 60, [] {
    const ActionSpec pp = load("ping_pong.spec");
    const auto w = detect_resilient(pp.action, 4, 0.01);
    if (!w) return Outcome{false, "no witness for ping-pong"};
    double min_margin = INFINITY;
    for (double m : w->margins) min_margin = std::min(min_margin, m);
    const bool none_rot = !detect_resilient(load("rotations.spec").action, 4, 0.01).has_value();
    const bool none_a3 = !detect_resilient(load("a3.spec").action, 4, 0.01).has_value();
    const TamingResult t = tame_lipschitz(pp.action, 0.25, 5);
    const Diffeo f = word_realize(t.tamed, w->f_word), g = word_realize(t.tamed, w->g_word);
    const double x = t.measure.value(w->x), y = t.measure.value(w->y);
    double tamed_min = INFINITY;
    for (double m : resilient_margins(f, g, x, y)) tamed_min = std::min(tamed_min, m);
    const bool ok = min_margin > 0.01 && none_rot && none_a3 && tamed_min > 0.0;
    return Outcome{ok, fmt("min margin %.3g; rotations %s, A3 %s; after taming min margin %.3g", min_margin,
                           none_rot ? "none" : "FOUND", none_a3 ? "none" : "FOUND", tamed_min)};
  });

  run(9, "oracle equivalences", 60, [] {
    // Direct series for A4: f^k(x) = x / (2^k - (2^k - 1) x) for all integers k.
    const double lambda = 0.5;
    const int N = 12;
    const auto m = deroin_cdf(a4(), lambda, N);
    double cdf_err = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double x = 0.05 + 0.1 * i;
      double num = 0.0, den = 0.0;
      for (int k = -N; k <= N; ++k) {
        const double w = std::pow(lambda, std::abs(k)), p = std::pow(2.0, k);
        num += w * x / (p - (p - 1) * x);
        den += w;
      }
      cdf_err = std::max(cdf_err, std::abs(m.value(x) - num / den));
    }
    const auto expected = oracle::heisenberg_ball_sizes(8);
    const auto sizes = ball_sizes(load("heisenberg.spec").presentation, 8);
    const bool balls = sizes == expected;
    // Circle lifts are compared mod 1: invert normalises the offset into [0,1).
    std::mt19937 rng(5);
    double round_trip = 0.0;
    for (int trial = 0; trial < 4; ++trial)
      for (const Space& s : {kInterval, kCircle}) {
        const Diffeo f = build_diffeo(s.is_circle() ? testsupport::random_circle_expr(rng) : testsupport::random_interval_expr(rng), s);
        const Diffeo g = invert(f);
        for (int i = 0; i <= 1000; ++i) {
          const double x = i / 1000.0;
          for (double d : {f.lift(g.lift(x)) - x, g.lift(f.lift(x)) - x})
            round_trip = std::max(round_trip, std::abs(s.is_circle() ? d - std::round(d) : d));
        }
        round_trip = std::max(round_trip, c1_distance(compose(f, g), Diffeo::identity(s)).c0);
      }
    const bool ok = cdf_err <= 1e-9 && balls && round_trip <= 1e-8;
    return Outcome{ok, fmt("cdf err %.1e; H3 balls %s; round trip %.1e", cdf_err, balls ? "match" : "differ", round_trip)};
  });

  return failures == 0 ? 0 : 1;
}
