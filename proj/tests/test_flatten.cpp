#include <cmath>

#include "conjtamer/build.hpp"
#include "conjtamer/flatten.hpp"
#include "doctest.h"

using namespace conjtamer;

namespace {

const Space kInterval = Space::interval(4096);

Action a4() { return Action(Presentation::free_abelian({"f"}), {build_diffeo("x/(2-x)", kInterval)}); }

}  // namespace

TEST_CASE("profile is a C1 increasing homeomorphism of [0,1]") {
  const Flattening psi(kInterval, {0.0}, 4.0, 0.05);
  CHECK(psi.profile(0.0) == 0.0);
  CHECK(psi.profile(1.0) == 1.0);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double p = psi.profile(t);
    REQUIRE(p > prev);
    prev = p;
    CHECK(psi.profile_inverse(p) == doctest::Approx(t).epsilon(1e-12));
    const double h = 1e-7;
    if (t < 0.999 && std::abs(t - 0.5) > 1e-3) {
      const double fd = (psi.profile(t + h) - psi.profile(t - h)) / (2 * h);
      CHECK(std::log(fd) == doctest::Approx(psi.profile_log_derivative(t)).epsilon(1e-5));
    }
  }
  CHECK(psi.profile_log_derivative(1.0) == 0.0);
  CHECK(psi.profile_log_derivative(0.999999) == doctest::Approx(0.0).scale(1.0).epsilon(1e-4));
}

TEST_CASE("only parabolic orbits leave the action unchanged") {
  const Space circle = Space::circle(4096);
  const Action rot(Presentation::free_abelian({"r"}), {Diffeo::rotation(circle, 0.3)});
  const auto res = flatten_hyperbolic(rot, {});
  CHECK(res.alpha == 1.0);
  CHECK(res.psi.is_identity());
  CHECK(res.hyperbolic.empty());
}

TEST_CASE("A4 flattening at delta = 0.1") {
  FlattenOptions opts;
  opts.delta = 0.1;
  const auto res = flatten_hyperbolic(a4(), opts);
  CHECK(res.alpha == doctest::Approx(std::log(2.0) / 0.1).epsilon(1e-9));
  CHECK(res.psi.points() == std::vector<double>{0.0, 1.0});
  const Diffeo f = build_diffeo("x/(2-x)", kInterval);
  CHECK(res.psi.conjugate_log_derivative(f, 0.0) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(res.psi.conjugate_log_derivative(f, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
  const Diffeo& g = res.tamed.map(0);
  CHECK(g.derivative_at(0.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-4));
  CHECK(g.derivative_at(1.0) == doctest::Approx(std::exp(0.1)).epsilon(1e-4));
}

TEST_CASE("flattening limit law for alpha in {2, 4, 8}") {
  const Diffeo f = build_diffeo("x/(2-x)", kInterval);
  for (double alpha : {2.0, 4.0, 8.0}) {
    FlattenOptions opts;
    opts.alpha_override = alpha;
    const auto res = flatten_hyperbolic(a4(), opts);
    const Flattening& psi = res.psi;
    // Finite differences on the pointwise conjugate against 2^{-1/alpha} and 2^{1/alpha}.
    const double h = 1e-6;
    const double at0 = (psi.conjugate_value(f, h) - psi.conjugate_value(f, 0.0)) / h;
    const double at1 = (psi.conjugate_value(f, 1.0) - psi.conjugate_value(f, 1.0 - h)) / h;
    CHECK(std::abs(at0 - std::pow(2.0, -1.0 / alpha)) < 1e-4);
    CHECK(std::abs(at1 - std::pow(2.0, 1.0 / alpha)) < 1e-4);
    if (alpha == 4.0) {
      CHECK(std::pow(2.0, -0.25) == doctest::Approx(0.8409).epsilon(1e-4));
      CHECK(std::pow(2.0, 0.25) == doctest::Approx(1.1892).epsilon(1e-4));
    }
    // The grid conjugate is C1: its derivative-track jumps shrink with the
    // grid step, and grid values match the pointwise map.
    const Diffeo& g = res.tamed.map(0);
    const Space fine = Space::interval(8192);
    const Flattening psi_fine(fine, psi.points(), alpha, psi.radius());
    const Diffeo g_fine = psi_fine.conjugate(build_diffeo("x/(2-x)", fine));
    CHECK(max_log_derivative_jump(g_fine) <= 0.6 * max_log_derivative_jump(g));
    CHECK(max_log_derivative_jump(g) < 0.2);
    double gap = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double y = i / 1000.0;
      gap = std::max(gap, std::abs(g(y) - psi.conjugate_value(f, y)));
    }
    CHECK(gap < 1e-5);
  }
}
