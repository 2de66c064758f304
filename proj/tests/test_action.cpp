#include <cmath>
#include <random>

#include "conjtamer/action.hpp"
#include "conjtamer/build.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace conjtamer;

namespace {

const Space kInterval = Space::interval(4096);
const Space kCircle = Space::circle(4096);

}  // namespace

TEST_CASE("word_realize examples") {
  const Action a(Presentation::free_abelian({"f"}), {build_diffeo("x/(2-x)", kInterval)});
  const auto& p = a.presentation();
  CHECK(c1_distance(word_realize(a, {}), Diffeo::identity(kInterval)).c0 == 0.0);
  CHECK(c1_distance(word_realize(a, p.parse_word("f f^-1")), Diffeo::identity(kInterval)).c0 < 1e-12);
  const Diffeo f3 = word_realize(a, p.parse_word("f^3"));
  CHECK(f3.derivative_at(1.0) == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(f3.derivative_at(0.0) == doctest::Approx(0.125).epsilon(1e-9));
  CHECK_THROWS_AS(word_realize(a, {Letter{3, 1}}), Error);
}

TEST_CASE("realization is a homomorphism on random words") {
  std::mt19937 rng(19);
  const Action a(Presentation::free_abelian({"f", "g"}),
                 {build_diffeo(testsupport::random_circle_expr(rng), kCircle),
                  build_diffeo(testsupport::random_circle_expr(rng), kCircle)});
  std::uniform_int_distribution<int> gen(0, 1), sign(0, 1), len(0, 8);
  for (int t = 0; t < 10; ++t) {
    Word w1, w2;
    for (int i = len(rng); i > 0; --i) w1.push_back({gen(rng), sign(rng) ? 1 : -1});
    for (int i = len(rng); i > 0; --i) w2.push_back({gen(rng), sign(rng) ? 1 : -1});
    const auto d = c1_distance(word_realize(a, concat(w1, w2)), compose(word_realize(a, w1), word_realize(a, w2)));
    CHECK(d.c0 < 1e-9);
    CHECK(d.dlog < 1e-6);
  }
}

TEST_CASE("relations of commuting conjugated rotations") {
  const Expression h = Expression::parse("x + 0.1*sin(2*pi*x)");
  const Action a(Presentation::free_abelian({"g1", "g2"}),
                 {build_conjugated(Expression::parse("x + 0.618034"), h, kCircle),
                  build_conjugated(Expression::parse("x + 0.41421356237309503"), h, kCircle)});
  const auto dev = check_relations(a, {a.presentation().parse_word("[g1,g2]")}, 1e-6);
  REQUIRE(dev.size() == 1);
  CHECK(dev[0].c0 < 1e-9);
  const Action bad(Presentation::free_abelian({"f", "g"}),
                   {build_diffeo("x/(2-x)", kInterval), build_diffeo("x + 0.2*x*(1-x)", kInterval)});
  CHECK_THROWS_WITH_AS(check_relations(bad, {bad.presentation().parse_word("[f,g]")}, 1e-6),
                       doctest::Contains("RelationViolation"), Error);
}

TEST_CASE("orbit tracks agree with realized words") {
  std::mt19937 rng(23);
  const Action a(Presentation::with_rules({"f", "g"}, {}, 1),
                 {build_diffeo(testsupport::random_circle_expr(rng), kCircle),
                  build_diffeo(testsupport::random_circle_expr(rng), kCircle)});
  const Ball ball = enumerate_ball(a.presentation(), 3);
  std::vector<double> base;
  for (int j = 0; j < 300; ++j) base.push_back(j / 300.0);
  std::vector<std::vector<double>> vals(ball.size(), std::vector<double>(base.size()));
  std::vector<std::vector<double>> logs = vals;
  propagate_tracks(a, ball, base, true, [&](std::size_t e, std::size_t begin, auto v, auto c) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      vals[e][begin + j] = v[j];
      logs[e][begin + j] = c[j];
    }
  });
  for (std::size_t e = 0; e < ball.size(); ++e) {
    const Diffeo w = word_realize(a, ball.elements[e]);
    for (std::size_t j = 0; j < base.size(); j += 37) {
      const double gap = vals[e][j] - w.lift(base[j]);
      CHECK(std::abs(gap - std::round(gap)) < 1e-9);
      CHECK(logs[e][j] == doctest::Approx(w.log_derivative_at(base[j])).epsilon(1e-6).scale(1.0));
    }
  }
}
